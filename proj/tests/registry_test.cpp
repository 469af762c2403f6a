#include <gtest/gtest.h>

#include "smtlink/error.hpp"
#include "support.hpp"

using namespace smtlink;
using namespace smtlink::testing;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Contract;
}

SExpr body(const std::string& text) { return parse_sexpr(text).expr; }

}  // namespace

TEST(RegisterDefun, NonRecursive) {
  auto reg = register_defun({}, "X^2-Y^2", {"X", "Y"}, body("(+ (* x x) (- (* y y)))"));
  const FnDef* f = reg.function("X^2-Y^2");
  ASSERT_NE(f, nullptr);
  EXPECT_FALSE(f->recursive);
  EXPECT_EQ(f->formals, (std::vector<std::string>{"X", "Y"}));
  EXPECT_EQ(f->body, term("(+ (* x x) (- (* y y)))"));
}

TEST(RegisterDefun, RecursiveFlag) {
  auto reg = register_defun({}, "LEN", {"L"}, body("(if (consp l) (+ 1 (len (cdr l))) 0)"));
  EXPECT_TRUE(reg.function("LEN")->recursive);
}

TEST(RegisterDefun, MutualRecursionRejected) {
  std::vector<DefunForm> group = {{"F", {"X"}, body("(g x)")}, {"G", {"X"}, body("(f x)")}};
  EXPECT_EQ(kind_of([&] { register_defuns({}, group); }), ErrorKind::MutualRecursion);
  EXPECT_EQ(kind_of([] {
              registry("(mutual-recursion (defun f (x) (g x)) (defun g (x) (f x)))");
            }),
            ErrorKind::MutualRecursion);
}

TEST(RegisterDefun, ErrorPaths) {
  auto reg = register_defun({}, "F", {"X"}, body("x"));
  EXPECT_EQ(kind_of([&] { register_defun(reg, "F", {"X"}, body("x")); }),
            ErrorKind::DuplicateName);
  EXPECT_EQ(kind_of([&] { register_defun(reg, "G", {"X"}, body("(h x)")); }),
            ErrorKind::UnknownFunction);
}

TEST(RegisterFty, IntegerList) {
  auto reg = register_fty({}, make_list("INTEGER-LIST", "INTEGERP"));
  const FtyTypeDef* d = reg.type("INTEGER-LIST");
  ASSERT_NE(d, nullptr);
  ASSERT_TRUE(std::holds_alternative<ListDef>(*d));
  EXPECT_EQ(std::get<ListDef>(*d).element_recognizer, "INTEGERP");
  EXPECT_TRUE(std::get<ListDef>(*d).true_listp);
  EXPECT_EQ(std::get<ListDef>(*d).recognizer, "INTEGER-LIST-P");
}

TEST(RegisterFty, MaybeInteger) {
  auto reg = register_fty({}, make_option("MAYBE-INTEGER", "INTEGERP"));
  const FtyTypeDef* d = reg.type("MAYBE-INTEGER");
  ASSERT_NE(d, nullptr);
  ASSERT_TRUE(std::holds_alternative<OptionDef>(*d));
  EXPECT_EQ(std::get<OptionDef>(*d).base_recognizer, "INTEGERP");
  EXPECT_EQ(reg.recognizer_kind("MAYBE-INTEGER-P").tag, RecognizerKind::Tag::Option);
}

TEST(RegisterFty, CyclicProductsRejected) {
  std::vector<FtyTypeDef> group = {make_prod("A", {{"B-FIELD", "B-P"}}),
                                   make_prod("B", {{"A-FIELD", "A-P"}})};
  EXPECT_EQ(kind_of([&] { register_fty_group({}, group); }),
            ErrorKind::CyclicTypeReference);
}

TEST(RegisterFty, UnknownRecognizerRejected) {
  EXPECT_EQ(kind_of([] { register_fty({}, make_list("WIDGETS", "WIDGET-P")); }),
            ErrorKind::UnknownRecognizer);
}

TEST(RegisterFty, TrueListpRequired) {
  EXPECT_EQ(kind_of([] { registry("(deflist il :elt-type integerp :true-listp nil)"); }),
            ErrorKind::BadGoalFile);
}

TEST(RecognizerKind, Examples) {
  auto reg = register_fty({}, make_list("INTEGER-LIST", "INTEGERP"));
  auto r = recognizer_kind(reg, "RATIONALP");
  EXPECT_EQ(r.tag, RecognizerKind::Tag::Primitive);
  EXPECT_EQ(r.primitive, Primitive::Rationalp);
  EXPECT_EQ(recognizer_kind(reg, "INTEGER-LIST-P").tag, RecognizerKind::Tag::List);
  EXPECT_EQ(recognizer_kind(reg, "BINARY-+").tag, RecognizerKind::Tag::NotARecognizer);
}

TEST(RecognizerKind, RealpAliasNeedsFlag) {
  EXPECT_FALSE(recognizer_kind({}, "REALP").is_recognizer());
  TypeRegistry aliased(TypeRegistry::Options{true});
  auto r = recognizer_kind(aliased, "REALP");
  EXPECT_EQ(r.tag, RecognizerKind::Tag::Primitive);
  EXPECT_EQ(r.primitive, Primitive::Rationalp);
}

// Closure holds after every registration of every corpus file.
TEST(RegistryProperties, ClosureRevalidates) {
  for (const char* name : {"poly.lisp", "len.lisp", "alist.lisp", "ringosc.lisp",
                           "maybe-integer.lisp", "symbols.lisp"}) {
    GoalFile f = load_goal_file(corpus(name));
    EXPECT_NO_THROW(f.reg.validate()) << name;
  }
  TypeRegistry reg;
  reg = register_fty(reg, make_list("INTEGER-LIST", "INTEGERP"));
  reg.validate();
  reg = register_fty(reg, make_prod("POINT", {{"X", "INTEGERP"}, {"TAGS", "INTEGER-LIST-P"}}));
  reg.validate();
  reg = register_defun(reg, "NORM", {"P"}, body("(+ (point->x p) 1)"));
  reg.validate();
}

// recursive == the name occurs in the body, over random bodies.
TEST(RegistryProperties, RecursiveFlagMatchesOccurrence) {
  Carriers gen(3);
  const std::vector<std::string> leaves = {"x", "1", "'a", "(cdr x)"};
  std::function<std::string(int)> build = [&](int depth) -> std::string {
    if (depth == 0) return leaves[gen.pick(leaves.size())];
    switch (gen.pick(4)) {
      case 0: return "(if (consp x) " + build(depth - 1) + " " + build(depth - 1) + ")";
      case 1: return "(cons " + build(depth - 1) + " " + build(depth - 1) + ")";
      case 2: return "(f " + build(depth - 1) + ")";
      default: return "(car " + build(depth - 1) + ")";
    }
  };
  int recursive = 0;
  for (int i = 0; i < 500; ++i) {
    std::string text = build(static_cast<int>(gen.pick(4)));
    auto reg = register_defun({}, "F", {"X"}, body(text));
    const FnDef* f = reg.function("F");
    EXPECT_EQ(f->recursive, occurs_fn(f->body, "F")) << text;
    EXPECT_EQ(f->recursive, text.find("(f ") != std::string::npos) << text;
    recursive += f->recursive;
  }
  EXPECT_GT(recursive, 50);
  EXPECT_LT(recursive, 450);
}

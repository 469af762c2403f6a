#include "smtlink/goalfile.hpp"

#include <fstream>
#include <sstream>

#include "smtlink/error.hpp"
#include "smtlink/pipeline.hpp"

namespace smtlink {

namespace {

[[noreturn]] void bad(const std::string& what, const SExpr& at) {
  throw Error(ErrorKind::BadGoalFile, what, at.offset());
}

std::string symbol_arg(const SExpr& form, std::size_t i, const char* what) {
  if (form.size() <= i || !form[i].is_symbol() || form[i].is_keyword()) {
    bad(std::string("expected ") + what + " in " + form[0].text(), form);
  }
  return form[i].text();
}

// Value following `key` among the trailing keyword arguments, if present.
const SExpr* keyword_arg(const SExpr& form, std::size_t from, std::string_view key) {
  for (std::size_t i = from; i + 1 < form.size(); ++i) {
    if (form[i].is_symbol(key)) return &form[i + 1];
  }
  return nullptr;
}

DefunForm read_defun(const SExpr& form) {
  if (form.size() != 4 && form.size() != 5) bad("DEFUN takes a name, formals and a body", form);
  DefunForm d;
  d.name = symbol_arg(form, 1, "function name");
  if (!form[2].is_list()) bad("DEFUN formals must be a list", form[2]);
  for (const auto& f : form[2].items()) {
    if (!f.is_symbol()) bad("formal parameter must be a symbol", f);
    d.formals.push_back(f.text());
  }
  // (defun f (x) (declare ...) body) keeps only the body.
  d.body = form[form.size() - 1];
  return d;
}

FtyTypeDef read_type(const SExpr& form) {
  std::string name = symbol_arg(form, 1, "type name");
  if (form.head_is("DEFPROD")) {
    if (form.size() < 3 || !form[2].is_list()) bad("DEFPROD needs a field list", form);
    std::vector<std::pair<std::string, std::string>> fields;
    for (const auto& f : form[2].items()) {
      if (!f.is_list() || f.size() < 2 || !f[0].is_symbol() || !f[1].is_symbol()) {
        bad("DEFPROD field must be (name recognizer)", f);
      }
      fields.emplace_back(f[0].text(), f[1].text());
    }
    return make_prod(name, fields);
  }
  if (form.head_is("DEFLIST")) {
    const SExpr* elt = keyword_arg(form, 2, ":ELT-TYPE");
    if (!elt && form.size() >= 3 && !form[2].is_keyword()) elt = &form[2];
    if (!elt || !elt->is_symbol()) bad("DEFLIST needs an element type", form);
    if (const SExpr* tl = keyword_arg(form, 2, ":TRUE-LISTP");
        tl && !tl->is_symbol("T")) {
      bad("only :TRUE-LISTP T lists are supported", *tl);
    }
    return make_list(name, elt->text());
  }
  if (form.head_is("DEFALIST")) {
    const SExpr* key = keyword_arg(form, 2, ":KEY-TYPE");
    const SExpr* val = keyword_arg(form, 2, ":VAL-TYPE");
    if (!key && !val && form.size() == 4) {
      key = &form[2];
      val = &form[3];
    }
    if (!key || !val || !key->is_symbol() || !val->is_symbol()) {
      bad("DEFALIST needs a key type and a value type", form);
    }
    return make_alist(name, key->text(), val->text());
  }
  if (form.head_is("DEFOPTION")) {
    if (form.size() != 3 || !form[2].is_symbol()) bad("DEFOPTION needs a base type", form);
    return make_option(name, form[2].text());
  }
  bad("unknown type form " + form[0].text(), form);
}

bool is_type_form(const SExpr& f) {
  return f.head_is("DEFPROD") || f.head_is("DEFLIST") || f.head_is("DEFALIST") ||
         f.head_is("DEFOPTION");
}

// Accepts a bare plist, (("Goal" :smtlink plist)) or (:smtlink plist).
SExpr hint_plist(const SExpr& h) {
  if (h.is_symbol("NIL")) return SExpr::list({}, h.offset());
  if (!h.is_list()) bad(":HINTS must be a list", h);
  if (h.size() == 1 && h[0].is_list() && h[0].size() >= 1 && h[0][0].is_string()) {
    const SExpr* s = keyword_arg(h[0], 1, ":SMTLINK");
    if (!s) bad("goal hint without :SMTLINK", h[0]);
    return hint_plist(*s);
  }
  if (h.size() == 2 && h[0].is_symbol(":SMTLINK")) return hint_plist(h[1]);
  return h;
}

class Loader {
 public:
  Loader(const std::string& text, std::string path, TypeRegistry::Options options)
      : text_(text) {
    file_.path = std::move(path);
    file_.reg = TypeRegistry(options);
  }

  GoalFile run() {
    std::vector<SExpr> forms;
    try {
      forms = parse_all(text_);
    } catch (const Error& e) {
      rethrow(e, 0);
    }
    for (const auto& form : forms) {
      try {
        load(form);
      } catch (const Error& e) {
        rethrow(e, form.offset());
      }
    }
    return std::move(file_);
  }

 private:
  [[noreturn]] void rethrow(const Error& e, std::size_t fallback) {
    std::size_t at = e.offset().value_or(fallback);
    throw Error(e.kind(),
                file_.path + ":" + std::to_string(line_of(text_, at)) + ": " + e.what(),
                at);
  }

  void load(const SExpr& form) {
    if (!form.is_list() || form.size() == 0 || !form[0].is_symbol()) {
      bad("expected a top-level form", form);
    }
    if (form.head_is("DEFUN")) {
      auto d = read_defun(form);
      file_.reg = register_defun(file_.reg, d.name, d.formals, d.body);
    } else if (form.head_is("MUTUAL-RECURSION")) {
      std::vector<DefunForm> group;
      for (std::size_t i = 1; i < form.size(); ++i) {
        if (!form[i].head_is("DEFUN")) bad("MUTUAL-RECURSION takes DEFUNs", form[i]);
        group.push_back(read_defun(form[i]));
      }
      file_.reg = register_defuns(file_.reg, group);
    } else if (is_type_form(form)) {
      file_.reg = register_fty(file_.reg, read_type(form));
    } else if (form.head_is("DEFTYPES")) {
      std::vector<FtyTypeDef> group;
      for (std::size_t i = 2; i < form.size(); ++i) {
        if (!is_type_form(form[i])) bad("DEFTYPES takes type forms", form[i]);
        group.push_back(read_type(form[i]));
      }
      file_.reg = register_fty_group(file_.reg, group);
    } else if (form.head_is("DEFAULT-HINTS")) {
      if (form.size() != 2) bad("DEFAULT-HINTS takes one hint list", form);
      HintSpec h = parse_hints(hint_plist(form[1]), file_.reg);
      defaults_ = merge_hints(defaults_, h);
    } else if (form.head_is("DEFTHM")) {
      load_theorem(form);
    } else if (form.head_is("IN-PACKAGE") || form.head_is("INCLUDE-BOOK")) {
      // Harmless ACL2 boilerplate.
    } else {
      bad("unknown form " + form[0].text(), form);
    }
  }

  void load_theorem(const SExpr& form) {
    if (form.size() != 3 && form.size() != 5) {
      bad("DEFTHM takes a name, a body and optionally :HINTS", form);
    }
    std::string name = symbol_arg(form, 1, "theorem name");
    for (const auto& t : file_.theorems) {
      if (t.name == name) bad("duplicate theorem " + name, form);
    }
    HintSpec user;
    if (form.size() == 5) {
      if (!form[3].is_symbol(":HINTS")) bad("expected :HINTS", form[3]);
      user = parse_hints(hint_plist(form[4]), file_.reg);
    }
    Term body = sexpr_to_term(form[2], file_.reg);
    HintSpec hints = merge_hints(defaults_, user);
    validate_hints(hints, file_.reg);
    file_.theorems.push_back(
        Theorem{name, body, clausify(body), std::move(hints), line_of(text_, form.offset())});
  }

  const std::string& text_;
  GoalFile file_;
  HintSpec defaults_;
};

}  // namespace

const Theorem& GoalFile::select(const std::optional<std::string>& name) const {
  if (name) {
    std::string want = canonical_name(*name);
    for (const auto& t : theorems) {
      if (t.name == want) return t;
    }
    throw Error(ErrorKind::BadGoalFile, path + ": no theorem named " + want);
  }
  if (theorems.empty()) throw Error(ErrorKind::BadGoalFile, path + ": no DEFTHM");
  if (theorems.size() > 1) {
    throw Error(ErrorKind::BadGoalFile,
                path + ": several theorems; choose one with --theorem");
  }
  return theorems.front();
}

GoalFile load_goal_text(const std::string& text, const std::string& path,
                        TypeRegistry::Options options) {
  return Loader(text, path, options).run();
}

GoalFile load_goal_file(const std::string& path, TypeRegistry::Options options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::BadGoalFile, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_goal_text(buf.str(), path, options);
}

}  // namespace smtlink

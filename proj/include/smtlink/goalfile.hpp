#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "smtlink/hints.hpp"
#include "smtlink/registry.hpp"
#include "smtlink/term.hpp"

namespace smtlink {

struct Theorem {
  std::string name;
  Term body;
  Clause goal;
  // Defaults in force at the defthm merged with its own :hints.
  HintSpec hints;
  std::size_t line = 0;
};

struct GoalFile {
  std::string path;
  TypeRegistry reg;
  std::vector<Theorem> theorems;

  // The named theorem, or the only one when `name` is empty.  Throws
  // BadGoalFile when the choice is missing or ambiguous.
  const Theorem& select(const std::optional<std::string>& name) const;
};

// Forms, in order: defun, mutual-recursion, defprod, deflist, defalist,
// defoption, deftypes, default-hints, defthm.  Errors carry "path:line:".
GoalFile load_goal_text(const std::string& text, const std::string& path,
                        TypeRegistry::Options options = {});
GoalFile load_goal_file(const std::string& path,
                        TypeRegistry::Options options = {});

}  // namespace smtlink

#pragma once

#include <string>

#include "ghostwit/program.hpp"

namespace ghostwit {

// Renders a program back to DSL text. The output is canonical: declaration
// order is preserved, statements are one per line with two-space indentation,
// and the global-read temps the frontend introduced are folded back into the
// consuming statement whenever that reproduces the identical control flow on
// reparse. For frontend-parsed programs the text reparses to a structurally
// identical program (node renaming aside); render equality is the structural
// equality used throughout.
//
// Throws std::invalid_argument for control flow the surface syntax cannot
// express (guards inside atomics, non-structured branching).
std::string render_program(const Program& p);

// True iff both programs render to the same text.
bool programs_equal(const Program& a, const Program& b);

}  // namespace ghostwit

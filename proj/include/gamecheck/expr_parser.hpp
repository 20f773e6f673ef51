#pragma once

#include <string_view>

#include "gamecheck/expr.hpp"

namespace gamecheck {

// Parses the expression grammar (see docs/expressions.md). Precedence, tightest
// first: unary minus; * div mod; + -; comparisons; !; &; |; -> (right assoc).
// Function forms: abs(e) min(a,b) max(a,b) ite(c,a,b) clamp(x,lo,hi) pre(name).
// Throws MalformedExpression; `where` is attached to the error for reporting.
Expr parse_expression(std::string_view text, SourceLocation where = {});

}  // namespace gamecheck

#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gamecheck/ctl.hpp"
#include "gamecheck/game.hpp"
#include "gamecheck/spec_io.hpp"

namespace gamecheck {

struct SmvUnit {
  std::string text;
  Bindings bindings;
  std::vector<std::string> diagnostics;
};

// SMV rendering of a resolved expression. `ref` renders attribute references
// (pre and plain); parameters become literals, choices must be bound first.
std::string smv_expr(const Expr& e, const std::function<std::string(const Expr& ref)>& ref);
std::string smv_expr(const Expr& e);  // attributes by name, pre(x) as x

std::string smv_ctl(const CtlFormula& f);

// Substitutes parameter values and the given choice valuation, then folds.
Expr specialise(const Expr& e, std::span<const Value> choices = {});

// Tags: <action>_guard, <action>_effect, one per parameter (its value) and one
// per proposition (its predicate). Symbols whose tag would not be a valid tag
// identifier are skipped with a diagnostic.
Bindings generate_bindings(const GameSpec& spec, std::vector<std::string>* diagnostics = nullptr);

// Self-contained module: VAR, DEFINE (propositions), INIT, TRANS and one
// CTLSPEC per property.
SmvUnit emit_module(const GameSpec& spec, const std::vector<NamedProperty>& properties);

SmvUnit compile_with_template(std::string_view tmpl, const GameSpec& spec, std::string_view testcase);

}  // namespace gamecheck

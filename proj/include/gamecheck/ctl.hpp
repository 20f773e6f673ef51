#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gamecheck/game.hpp"

namespace gamecheck {

enum class CtlOp { True, False, Prop, Not, And, Or, Implies, EX, AX, EF, AF, EG, AG, EU, AU };

struct CtlNode;

class CtlFormula {
 public:
  CtlFormula() = default;

  static CtlFormula constant(bool b);
  static CtlFormula prop(std::string name, int index);
  static CtlFormula unary(CtlOp op, CtlFormula a);
  static CtlFormula binary(CtlOp op, CtlFormula a, CtlFormula b);

  explicit operator bool() const noexcept { return node_ != nullptr; }
  CtlOp op() const;
  const std::string& name() const;  // Prop only
  int index() const;                // Prop only: proposition index
  const CtlFormula& lhs() const;
  const CtlFormula& rhs() const;    // binary only

  friend bool operator==(const CtlFormula& a, const CtlFormula& b);

 private:
  explicit CtlFormula(std::shared_ptr<const CtlNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const CtlNode> node_;
};

struct CtlNode {
  CtlOp op;
  std::string name;
  int index = -1;
  CtlFormula a, b;
};

// Grammar, loosest first: `->` (right associative), `|`, `&`, then the
// prefix operators `!`, EX, AX, EF, AF, EG, AG; primaries are true, false,
// proposition names, `( f )`, `E [ f U g ]` and `A [ f U g ]`.
CtlFormula parse_ctl(std::string_view text, std::span<const std::string> props);
CtlFormula parse_ctl(std::string_view text, const GameSpec& spec);

std::string to_string(const CtlFormula& f);

// Rewrite into {true, Prop, !, &, EX, EU, EG}.
CtlFormula to_basis(const CtlFormula& f);

// Temporal operator nesting depth.
int temporal_depth(const CtlFormula& f);

struct NamedProperty {
  std::string name;
  std::string text;
  CtlFormula formula;
};

}  // namespace gamecheck

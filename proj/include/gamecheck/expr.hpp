#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gamecheck/error.hpp"

namespace gamecheck {

using Value = std::int64_t;

enum class Type : std::uint8_t { Int, Bool };

enum class Op : std::uint8_t {
  Int, Bool, Ref,
  Neg, Not, Abs,
  Add, Sub, Mul, Div, Mod, Min, Max,
  Lt, Le, Eq, Ne, Ge, Gt,
  And, Or, Implies,
  Ite, Clamp,
};

// What a reference node points at once names have been bound against a game.
enum class RefKind : std::uint8_t { Unresolved, Attribute, PreAttribute, Parameter, Choice };

const char* op_symbol(Op op);

struct ExprTypeError : Error {
  explicit ExprTypeError(const std::string& m) : Error("MalformedExpression", m) {}
};

struct ExprNode;

// Immutable, shared expression tree. Nodes are type checked on construction:
// boolean and integer subtrees never mix, and references are always integers.
class Expr {
 public:
  Expr() = default;

  static Expr integer(Value v);
  static Expr boolean(bool b);
  static Expr ref(std::string name);
  static Expr pre(std::string name);
  static Expr unary(Op op, Expr a);
  static Expr binary(Op op, Expr a, Expr b);
  static Expr ite(Expr cond, Expr then_e, Expr else_e);
  static Expr clamp(Expr x, Expr lo, Expr hi);
  static Expr make(Op op, std::vector<Expr> args);

  // Copy of a reference node with its binding filled in.
  Expr bound(RefKind kind, int slot, Value value = 0) const;

  explicit operator bool() const noexcept { return node_ != nullptr; }
  Op op() const;
  Type type() const;
  Value literal() const;           // Int / Bool literal, or bound Parameter value
  const std::string& name() const; // Ref only
  bool is_pre() const;             // Ref only: pre(x)
  RefKind ref_kind() const;
  int slot() const;
  std::span<const Expr> args() const;

  // Same node object (cheap identity, not structural equality).
  bool identical_to(const Expr& o) const noexcept { return node_ == o.node_; }

  bool is_literal() const { return op() == Op::Int || op() == Op::Bool; }

  // Structural equality: bindings are ignored, names and shape are compared.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op;
  Type type;
  Value value = 0;
  std::string name;
  bool pre = false;
  RefKind kind = RefKind::Unresolved;
  int slot = -1;
  std::vector<Expr> args;
};

// Euclidean pair: (a div b) * b + (a mod b) == a and 0 <= a mod b < |b|.
Value euclid_div(Value a, Value b);
Value euclid_mod(Value a, Value b);

// Binding environment for evaluation. Bound references read the spans by slot;
// unresolved ones are looked up by name in `names` ("pre(x)" for pre refs).
struct EvalFrame {
  std::span<const Value> state;
  std::span<const Value> pre;
  std::span<const Value> choices;
  const std::map<std::string, Value>* names = nullptr;
};

// Tree-walking evaluator. Booleans come back as 0 / 1. `and`, `or`, `->` and
// `ite` are lazy, so guarded divisions never trap on the untaken side.
Value evaluate(const Expr& e, const EvalFrame& frame);

using Scalar = std::variant<Value, bool>;
using Env = std::map<std::string, Value>;

Scalar eval_expr(const Expr& e, const Env& env);

// Rebuilds `e`, replacing every Ref node by fn(ref). Returning the argument
// unchanged keeps the node.
Expr map_refs(const Expr& e, const std::function<Expr(const Expr&)>& fn);

void visit_refs(const Expr& e, const std::function<void(const Expr&)>& fn);

// Folds literal-only subtrees and the boolean/ite identities. Subtrees whose
// evaluation would raise (division by zero, overflow) are left as they are.
Expr fold(const Expr& e);

// Canonical text in the expression grammar; parse_expression(to_string(e)) == e.
std::string to_string(const Expr& e);

// Flat stack program for the hot evaluation paths (state-space construction and
// exhaustive validation). Produces exactly what `evaluate` produces.
class Program {
 public:
  Program() = default;
  static Program compile(const Expr& e);
  Value run(const EvalFrame& frame) const;
  bool empty() const { return code_.empty(); }

 private:
  enum class Code : std::uint8_t {
    Const, Attr, Pre, Choice, Name,
    Neg, Not, Abs,
    Add, Sub, Mul, Div, Mod, Min, Max,
    Lt, Le, Eq, Ne, Ge, Gt,
    Clamp,
    Jump, JumpIfFalse, JumpIfFalseKeep, JumpIfTrueKeep, Pop,
  };
  struct Instr {
    Code code;
    Value arg;
  };
  void emit(const Expr& e, int depth);
  std::vector<Instr> code_;
  std::vector<std::string> names_;
  int max_depth_ = 0;
};

}  // namespace gamecheck

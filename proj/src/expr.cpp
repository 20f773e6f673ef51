#include "gamecheck/expr.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <limits>

namespace gamecheck {

std::string format_location(const SourceLocation& loc) {
  return "line " + std::to_string(loc.line) + ", column " + std::to_string(loc.column);
}

UnresolvedTag::UnresolvedTag(std::vector<std::string> tags)
    : Error("UnresolvedTag",
            [&] {
              std::string m = "unresolved tag(s):";
              for (const auto& t : tags) m += " " + t;
              return m;
            }()),
      tags_(std::move(tags)) {}

const char* op_symbol(Op op) {
  switch (op) {
    case Op::Neg: return "-";
    case Op::Not: return "!";
    case Op::Abs: return "abs";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "div";
    case Op::Mod: return "mod";
    case Op::Min: return "min";
    case Op::Max: return "max";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Implies: return "->";
    case Op::Ite: return "ite";
    case Op::Clamp: return "clamp";
    default: return "?";
  }
}

namespace {

bool is_arith(Op op) {
  switch (op) {
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Mod: case Op::Min: case Op::Max:
      return true;
    default:
      return false;
  }
}
bool is_compare(Op op) { return op >= Op::Lt && op <= Op::Gt; }
bool is_logic(Op op) { return op == Op::And || op == Op::Or || op == Op::Implies; }

const char* type_name(Type t) { return t == Type::Int ? "integer" : "boolean"; }

void expect(const Expr& e, Type t, Op in) {
  if (e.type() != t) {
    throw ExprTypeError(std::string("operand of '") + op_symbol(in) + "' must be " + type_name(t) +
                        ", got " + type_name(e.type()));
  }
}

}  // namespace

Expr Expr::integer(Value v) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{Op::Int, Type::Int, v, {}, false, RefKind::Unresolved, -1, {}}));
}

Expr Expr::boolean(bool b) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{Op::Bool, Type::Bool, b ? 1 : 0, {}, false, RefKind::Unresolved, -1, {}}));
}

Expr Expr::ref(std::string name) {
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{Op::Ref, Type::Int, 0, std::move(name), false, RefKind::Unresolved, -1, {}}));
}

Expr Expr::pre(std::string name) {
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{Op::Ref, Type::Int, 0, std::move(name), true, RefKind::Unresolved, -1, {}}));
}

Expr Expr::unary(Op op, Expr a) { return make(op, {std::move(a)}); }
Expr Expr::binary(Op op, Expr a, Expr b) { return make(op, {std::move(a), std::move(b)}); }
Expr Expr::ite(Expr c, Expr t, Expr e) { return make(Op::Ite, {std::move(c), std::move(t), std::move(e)}); }
Expr Expr::clamp(Expr x, Expr lo, Expr hi) { return make(Op::Clamp, {std::move(x), std::move(lo), std::move(hi)}); }

Expr Expr::make(Op op, std::vector<Expr> args) {
  for (const auto& a : args) {
    if (!a) throw ExprTypeError("null operand");
  }
  auto arity = [&](std::size_t n) {
    if (args.size() != n) {
      throw ExprTypeError(std::string("'") + op_symbol(op) + "' expects " + std::to_string(n) + " operand(s)");
    }
  };
  Type result = Type::Int;
  switch (op) {
    case Op::Neg:
    case Op::Abs:
      arity(1);
      expect(args[0], Type::Int, op);
      break;
    case Op::Not:
      arity(1);
      expect(args[0], Type::Bool, op);
      result = Type::Bool;
      break;
    case Op::Ite:
      arity(3);
      expect(args[0], Type::Bool, op);
      if (args[1].type() != args[2].type()) throw ExprTypeError("branches of 'ite' have different types");
      result = args[1].type();
      break;
    case Op::Clamp:
      arity(3);
      for (const auto& a : args) expect(a, Type::Int, op);
      break;
    default:
      arity(2);
      if (is_arith(op)) {
        expect(args[0], Type::Int, op);
        expect(args[1], Type::Int, op);
        if ((op == Op::Div || op == Op::Mod) && args[1].op() == Op::Int && args[1].literal() == 0) {
          throw ExprTypeError(std::string("'") + op_symbol(op) + "' by literal zero");
        }
      } else if (is_compare(op)) {
        expect(args[0], Type::Int, op);
        expect(args[1], Type::Int, op);
        result = Type::Bool;
      } else if (is_logic(op)) {
        expect(args[0], Type::Bool, op);
        expect(args[1], Type::Bool, op);
        result = Type::Bool;
      } else {
        throw ExprTypeError("not an operator node");
      }
  }
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{op, result, 0, {}, false, RefKind::Unresolved, -1, std::move(args)}));
}

Expr Expr::bound(RefKind kind, int slot, Value value) const {
  assert(op() == Op::Ref);
  ExprNode n = *node_;
  n.kind = kind;
  n.slot = slot;
  n.value = value;
  return Expr(std::make_shared<const ExprNode>(std::move(n)));
}

Op Expr::op() const { return node_->op; }
Type Expr::type() const { return node_->type; }
Value Expr::literal() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
bool Expr::is_pre() const { return node_->pre; }
RefKind Expr::ref_kind() const { return node_->kind; }
int Expr::slot() const { return node_->slot; }
std::span<const Expr> Expr::args() const { return node_->args; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const ExprNode& x = *a.node_;
  const ExprNode& y = *b.node_;
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::Int:
    case Op::Bool:
      return x.value == y.value;
    case Op::Ref:
      return x.name == y.name && x.pre == y.pre;
    default:
      return x.args == y.args;
  }
}

// ---------------------------------------------------------------------------
// Arithmetic

namespace {

Value checked_add(Value a, Value b) {
  Value r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow();
  return r;
}
Value checked_sub(Value a, Value b) {
  Value r;
  if (__builtin_sub_overflow(a, b, &r)) throw ArithmeticOverflow();
  return r;
}
Value checked_mul(Value a, Value b) {
  Value r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow();
  return r;
}
Value checked_neg(Value a) {
  if (a == std::numeric_limits<Value>::min()) throw ArithmeticOverflow();
  return -a;
}
Value checked_abs(Value a) { return a < 0 ? checked_neg(a) : a; }

}  // namespace

Value euclid_mod(Value a, Value b) {
  if (b == 0) throw DivisionByZero();
  if (b == -1) return 0;
  Value r = a % b;
  if (r < 0) r += (b < 0 ? -b : b);
  return r;
}

Value euclid_div(Value a, Value b) {
  if (b == 0) throw DivisionByZero();
  if (b == -1) return checked_neg(a);
  const Value r = euclid_mod(a, b);
  // a - r is an exact multiple of b.
  return checked_sub(a, r) / b;
}

namespace {

Value apply_binary(Op op, Value a, Value b) {
  switch (op) {
    case Op::Add: return checked_add(a, b);
    case Op::Sub: return checked_sub(a, b);
    case Op::Mul: return checked_mul(a, b);
    case Op::Div: return euclid_div(a, b);
    case Op::Mod: return euclid_mod(a, b);
    case Op::Min: return std::min(a, b);
    case Op::Max: return std::max(a, b);
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::Ge: return a >= b;
    case Op::Gt: return a > b;
    default: break;
  }
  throw Error("Internal", "not a strict binary operator");
}

Value apply_clamp(Value x, Value lo, Value hi) { return std::min(std::max(x, lo), hi); }

Value lookup_ref(const Expr& e, const EvalFrame& f) {
  switch (e.ref_kind()) {
    case RefKind::Attribute: return f.state[static_cast<std::size_t>(e.slot())];
    case RefKind::PreAttribute: return f.pre[static_cast<std::size_t>(e.slot())];
    case RefKind::Choice: return f.choices[static_cast<std::size_t>(e.slot())];
    case RefKind::Parameter: return e.literal();
    case RefKind::Unresolved: break;
  }
  const std::string key = e.is_pre() ? "pre(" + e.name() + ")" : e.name();
  if (f.names) {
    auto it = f.names->find(key);
    if (it != f.names->end()) return it->second;
  }
  throw UnboundName(key);
}

}  // namespace

Value evaluate(const Expr& e, const EvalFrame& f) {
  switch (e.op()) {
    case Op::Int:
    case Op::Bool:
      return e.literal();
    case Op::Ref:
      return lookup_ref(e, f);
    case Op::Neg: return checked_neg(evaluate(e.args()[0], f));
    case Op::Abs: return checked_abs(evaluate(e.args()[0], f));
    case Op::Not: return evaluate(e.args()[0], f) ? 0 : 1;
    case Op::And: return evaluate(e.args()[0], f) && evaluate(e.args()[1], f);
    case Op::Or: return evaluate(e.args()[0], f) || evaluate(e.args()[1], f);
    case Op::Implies: return !evaluate(e.args()[0], f) || evaluate(e.args()[1], f);
    case Op::Ite: return evaluate(e.args()[0], f) ? evaluate(e.args()[1], f) : evaluate(e.args()[2], f);
    case Op::Clamp:
      return apply_clamp(evaluate(e.args()[0], f), evaluate(e.args()[1], f), evaluate(e.args()[2], f));
    default:
      return apply_binary(e.op(), evaluate(e.args()[0], f), evaluate(e.args()[1], f));
  }
}

Scalar eval_expr(const Expr& e, const Env& env) {
  EvalFrame frame;
  frame.names = &env;
  const Value v = evaluate(e, frame);
  if (e.type() == Type::Bool) return v != 0;
  return v;
}

Expr map_refs(const Expr& e, const std::function<Expr(const Expr&)>& fn) {
  if (e.op() == Op::Ref) return fn(e);
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  bool changed = false;
  for (const auto& a : e.args()) {
    args.push_back(map_refs(a, fn));
    changed = changed || !args.back().identical_to(a);
  }
  if (!changed) return e;
  return Expr::make(e.op(), std::move(args));
}

void visit_refs(const Expr& e, const std::function<void(const Expr&)>& fn) {
  if (e.op() == Op::Ref) {
    fn(e);
    return;
  }
  for (const auto& a : e.args()) visit_refs(a, fn);
}

// ---------------------------------------------------------------------------
// Folding

Expr fold(const Expr& e) {
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  bool all_literal = true;
  for (const auto& a : e.args()) {
    args.push_back(fold(a));
    all_literal = all_literal && args.back().is_literal();
  }
  const Op op = e.op();
  auto lit = [&](Value v) { return e.type() == Type::Bool ? Expr::boolean(v != 0) : Expr::integer(v); };
  if (all_literal) {
    try {
      Expr tmp = Expr::make(op, args);
      return lit(evaluate(tmp, EvalFrame{}));
    } catch (const DivisionByZero&) {
    } catch (const ArithmeticOverflow&) {
    }
    return Expr::make(op, std::move(args));
  }
  auto is_bool = [](const Expr& x, bool v) { return x.op() == Op::Bool && (x.literal() != 0) == v; };
  auto is_int = [](const Expr& x, Value v) { return x.op() == Op::Int && x.literal() == v; };
  switch (op) {
    case Op::And:
      if (is_bool(args[0], false) || is_bool(args[1], false)) return Expr::boolean(false);
      if (is_bool(args[0], true)) return args[1];
      if (is_bool(args[1], true)) return args[0];
      break;
    case Op::Or:
      if (is_bool(args[0], true) || is_bool(args[1], true)) return Expr::boolean(true);
      if (is_bool(args[0], false)) return args[1];
      if (is_bool(args[1], false)) return args[0];
      break;
    case Op::Implies:
      if (is_bool(args[0], false) || is_bool(args[1], true)) return Expr::boolean(true);
      if (is_bool(args[0], true)) return args[1];
      if (is_bool(args[1], false)) return Expr::unary(Op::Not, args[0]);
      break;
    case Op::Not:
      if (args[0].op() == Op::Not) return args[0].args()[0];
      break;
    case Op::Ite:
      if (args[0].op() == Op::Bool) return args[0].literal() ? args[1] : args[2];
      if (args[1] == args[2]) return args[1];
      break;
    case Op::Add:
      if (is_int(args[1], 0)) return args[0];
      if (is_int(args[0], 0)) return args[1];
      if (args[1].op() == Op::Int && args[1].literal() < 0 &&
          args[1].literal() != std::numeric_limits<Value>::min()) {
        return Expr::binary(Op::Sub, args[0], Expr::integer(-args[1].literal()));
      }
      break;
    case Op::Sub:
      if (is_int(args[1], 0)) return args[0];
      if (args[1].op() == Op::Int && args[1].literal() < 0 &&
          args[1].literal() != std::numeric_limits<Value>::min()) {
        return Expr::binary(Op::Add, args[0], Expr::integer(-args[1].literal()));
      }
      break;
    case Op::Mul:
      if (is_int(args[1], 1)) return args[0];
      if (is_int(args[0], 1)) return args[1];
      break;
    default:
      break;
  }
  return Expr::make(op, std::move(args));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Not: return 4;
    case Op::Lt: case Op::Le: case Op::Eq: case Op::Ne: case Op::Ge: case Op::Gt: return 5;
    case Op::Add: case Op::Sub: return 6;
    case Op::Mul: case Op::Div: case Op::Mod: return 7;
    case Op::Neg: return 8;
    default: return 9;
  }
}

void print(const Expr& e, int min_prec, std::string& out) {
  const int p = precedence(e);
  const bool paren = p < min_prec;
  if (paren) out += '(';
  switch (e.op()) {
    case Op::Int:
      out += std::to_string(e.literal());
      break;
    case Op::Bool:
      out += e.literal() ? "true" : "false";
      break;
    case Op::Ref:
      if (e.is_pre()) {
        out += "pre(" + e.name() + ")";
      } else {
        out += e.name();
      }
      break;
    case Op::Neg:
      out += '-';
      print(e.args()[0], 8, out);
      break;
    case Op::Not:
      out += '!';
      print(e.args()[0], 4, out);
      break;
    case Op::Abs: case Op::Min: case Op::Max: case Op::Ite: case Op::Clamp: {
      out += op_symbol(e.op());
      out += '(';
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) out += ", ";
        print(e.args()[i], 0, out);
      }
      out += ')';
      break;
    }
    case Op::Implies:
      print(e.args()[0], p + 1, out);
      out += " -> ";
      print(e.args()[1], p, out);
      break;
    default: {
      const int left = p;
      const int right = p + 1;
      const bool cmp = p == 5;
      print(e.args()[0], cmp ? p + 1 : left, out);
      out += ' ';
      out += op_symbol(e.op());
      out += ' ';
      print(e.args()[1], right, out);
      break;
    }
  }
  if (paren) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Program

void Program::emit(const Expr& e, int depth) {
  max_depth_ = std::max(max_depth_, depth + 1);
  auto code_for = [](Op op) {
    switch (op) {
      case Op::Neg: return Code::Neg;
      case Op::Not: return Code::Not;
      case Op::Abs: return Code::Abs;
      case Op::Add: return Code::Add;
      case Op::Sub: return Code::Sub;
      case Op::Mul: return Code::Mul;
      case Op::Div: return Code::Div;
      case Op::Mod: return Code::Mod;
      case Op::Min: return Code::Min;
      case Op::Max: return Code::Max;
      case Op::Lt: return Code::Lt;
      case Op::Le: return Code::Le;
      case Op::Eq: return Code::Eq;
      case Op::Ne: return Code::Ne;
      case Op::Ge: return Code::Ge;
      case Op::Gt: return Code::Gt;
      default: return Code::Clamp;
    }
  };
  switch (e.op()) {
    case Op::Int:
    case Op::Bool:
      code_.push_back({Code::Const, e.literal()});
      return;
    case Op::Ref:
      switch (e.ref_kind()) {
        case RefKind::Attribute: code_.push_back({Code::Attr, e.slot()}); return;
        case RefKind::PreAttribute: code_.push_back({Code::Pre, e.slot()}); return;
        case RefKind::Choice: code_.push_back({Code::Choice, e.slot()}); return;
        case RefKind::Parameter: code_.push_back({Code::Const, e.literal()}); return;
        case RefKind::Unresolved:
          names_.push_back(e.is_pre() ? "pre(" + e.name() + ")" : e.name());
          code_.push_back({Code::Name, static_cast<Value>(names_.size() - 1)});
          return;
      }
      return;
    case Op::And:
    case Op::Or:
    case Op::Implies: {
      emit(e.args()[0], depth);
      if (e.op() == Op::Implies) code_.push_back({Code::Not, 0});
      const std::size_t jump = code_.size();
      code_.push_back({e.op() == Op::And ? Code::JumpIfFalseKeep : Code::JumpIfTrueKeep, 0});
      code_.push_back({Code::Pop, 0});
      emit(e.args()[1], depth);
      code_[jump].arg = static_cast<Value>(code_.size());
      return;
    }
    case Op::Ite: {
      emit(e.args()[0], depth);
      const std::size_t to_else = code_.size();
      code_.push_back({Code::JumpIfFalse, 0});
      emit(e.args()[1], depth);
      const std::size_t to_end = code_.size();
      code_.push_back({Code::Jump, 0});
      code_[to_else].arg = static_cast<Value>(code_.size());
      emit(e.args()[2], depth);
      code_[to_end].arg = static_cast<Value>(code_.size());
      return;
    }
    default: {
      int d = depth;
      for (const auto& a : e.args()) emit(a, d++);
      code_.push_back({code_for(e.op()), 0});
      return;
    }
  }
}

Program Program::compile(const Expr& e) {
  Program p;
  p.emit(e, 0);
  return p;
}

Value Program::run(const EvalFrame& f) const {
  std::array<Value, 64> small{};
  std::vector<Value> large;
  Value* stack = small.data();
  if (max_depth_ > static_cast<int>(small.size())) {
    large.resize(static_cast<std::size_t>(max_depth_));
    stack = large.data();
  }
  int sp = 0;
  const std::size_t n = code_.size();
  for (std::size_t pc = 0; pc < n; ++pc) {
    const Instr& in = code_[pc];
    switch (in.code) {
      case Code::Const: stack[sp++] = in.arg; break;
      case Code::Attr: stack[sp++] = f.state[static_cast<std::size_t>(in.arg)]; break;
      case Code::Pre: stack[sp++] = f.pre[static_cast<std::size_t>(in.arg)]; break;
      case Code::Choice: stack[sp++] = f.choices[static_cast<std::size_t>(in.arg)]; break;
      case Code::Name: {
        const std::string& key = names_[static_cast<std::size_t>(in.arg)];
        if (!f.names) throw UnboundName(key);
        auto it = f.names->find(key);
        if (it == f.names->end()) throw UnboundName(key);
        stack[sp++] = it->second;
        break;
      }
      case Code::Neg: stack[sp - 1] = checked_neg(stack[sp - 1]); break;
      case Code::Abs: stack[sp - 1] = checked_abs(stack[sp - 1]); break;
      case Code::Not: stack[sp - 1] = stack[sp - 1] ? 0 : 1; break;
      case Code::Add: --sp; stack[sp - 1] = checked_add(stack[sp - 1], stack[sp]); break;
      case Code::Sub: --sp; stack[sp - 1] = checked_sub(stack[sp - 1], stack[sp]); break;
      case Code::Mul: --sp; stack[sp - 1] = checked_mul(stack[sp - 1], stack[sp]); break;
      case Code::Div: --sp; stack[sp - 1] = euclid_div(stack[sp - 1], stack[sp]); break;
      case Code::Mod: --sp; stack[sp - 1] = euclid_mod(stack[sp - 1], stack[sp]); break;
      case Code::Min: --sp; stack[sp - 1] = std::min(stack[sp - 1], stack[sp]); break;
      case Code::Max: --sp; stack[sp - 1] = std::max(stack[sp - 1], stack[sp]); break;
      case Code::Lt: --sp; stack[sp - 1] = stack[sp - 1] < stack[sp]; break;
      case Code::Le: --sp; stack[sp - 1] = stack[sp - 1] <= stack[sp]; break;
      case Code::Eq: --sp; stack[sp - 1] = stack[sp - 1] == stack[sp]; break;
      case Code::Ne: --sp; stack[sp - 1] = stack[sp - 1] != stack[sp]; break;
      case Code::Ge: --sp; stack[sp - 1] = stack[sp - 1] >= stack[sp]; break;
      case Code::Gt: --sp; stack[sp - 1] = stack[sp - 1] > stack[sp]; break;
      case Code::Clamp:
        sp -= 2;
        stack[sp - 1] = apply_clamp(stack[sp - 1], stack[sp], stack[sp + 1]);
        break;
      case Code::Jump: pc = static_cast<std::size_t>(in.arg) - 1; break;
      case Code::JumpIfFalse:
        if (!stack[--sp]) pc = static_cast<std::size_t>(in.arg) - 1;
        break;
      case Code::JumpIfFalseKeep:
        if (!stack[sp - 1]) pc = static_cast<std::size_t>(in.arg) - 1;
        break;
      case Code::JumpIfTrueKeep:
        if (stack[sp - 1]) {
          stack[sp - 1] = 1;
          pc = static_cast<std::size_t>(in.arg) - 1;
        }
        break;
      case Code::Pop: --sp; break;
    }
  }
  return stack[0];
}

}  // namespace gamecheck

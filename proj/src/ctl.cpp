#include "gamecheck/ctl.hpp"

#include <cctype>

namespace gamecheck {

CtlFormula CtlFormula::constant(bool b) {
  return CtlFormula(std::make_shared<CtlNode>(CtlNode{b ? CtlOp::True : CtlOp::False, {}, -1, {}, {}}));
}

CtlFormula CtlFormula::prop(std::string name, int index) {
  return CtlFormula(std::make_shared<CtlNode>(CtlNode{CtlOp::Prop, std::move(name), index, {}, {}}));
}

CtlFormula CtlFormula::unary(CtlOp op, CtlFormula a) {
  return CtlFormula(std::make_shared<CtlNode>(CtlNode{op, {}, -1, std::move(a), {}}));
}

CtlFormula CtlFormula::binary(CtlOp op, CtlFormula a, CtlFormula b) {
  return CtlFormula(std::make_shared<CtlNode>(CtlNode{op, {}, -1, std::move(a), std::move(b)}));
}

CtlOp CtlFormula::op() const { return node_->op; }
const std::string& CtlFormula::name() const { return node_->name; }
int CtlFormula::index() const { return node_->index; }
const CtlFormula& CtlFormula::lhs() const { return node_->a; }
const CtlFormula& CtlFormula::rhs() const { return node_->b; }

bool operator==(const CtlFormula& x, const CtlFormula& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  if (x.op() != y.op()) return false;
  if (x.op() == CtlOp::Prop) return x.name() == y.name();
  return x.lhs() == y.lhs() && x.rhs() == y.rhs();
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> props) : text_(text), props_(props) {}

  CtlFormula parse() {
    next();
    auto f = implies();
    if (!tok_.empty()) fail("unexpected '" + tok_ + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw MalformedFormula(m, start_); }

  void next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    start_ = pos_;
    if (pos_ >= text_.size()) {
      tok_.clear();
      return;
    }
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t e = pos_;
      while (e < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[e])) || text_[e] == '_')) ++e;
      tok_ = std::string(text_.substr(pos_, e - pos_));
      pos_ = e;
      return;
    }
    for (const char* two : {"->", "&&", "||"}) {
      if (text_.substr(pos_, 2) == two) {
        tok_ = two == std::string("->") ? "->" : std::string(1, c);
        pos_ += 2;
        return;
      }
    }
    if (std::string_view("()[]!&|").find(c) == std::string_view::npos) {
      fail(std::string("unexpected character '") + c + "'");
    }
    tok_ = std::string(1, c);
    ++pos_;
  }

  void expect(const char* t) {
    if (tok_ != t) fail(std::string("expected '") + t + "'" + (tok_.empty() ? " at end of input" : ", got '" + tok_ + "'"));
    next();
  }

  CtlFormula implies() {
    auto l = disjunction();
    if (tok_ == "->") {
      next();
      return CtlFormula::binary(CtlOp::Implies, l, implies());
    }
    return l;
  }

  CtlFormula disjunction() {
    auto l = conjunction();
    while (tok_ == "|") {
      next();
      l = CtlFormula::binary(CtlOp::Or, l, conjunction());
    }
    return l;
  }

  CtlFormula conjunction() {
    auto l = prefix();
    while (tok_ == "&") {
      next();
      l = CtlFormula::binary(CtlOp::And, l, prefix());
    }
    return l;
  }

  CtlFormula prefix() {
    static const std::pair<const char*, CtlOp> ops[] = {{"!", CtlOp::Not},  {"EX", CtlOp::EX}, {"AX", CtlOp::AX},
                                                         {"EF", CtlOp::EF}, {"AF", CtlOp::AF}, {"EG", CtlOp::EG},
                                                         {"AG", CtlOp::AG}};
    for (const auto& [t, op] : ops) {
      if (tok_ == t) {
        next();
        return CtlFormula::unary(op, prefix());
      }
    }
    return primary();
  }

  CtlFormula primary() {
    if (tok_.empty()) fail("unexpected end of formula");
    if (tok_ == "(") {
      next();
      auto f = implies();
      expect(")");
      return f;
    }
    if (tok_ == "E" || tok_ == "A") {
      const CtlOp op = tok_ == "E" ? CtlOp::EU : CtlOp::AU;
      next();
      expect("[");
      auto l = implies();
      expect("U");
      auto r = implies();
      expect("]");
      return CtlFormula::binary(op, l, r);
    }
    if (tok_ == "true" || tok_ == "TRUE") {
      next();
      return CtlFormula::constant(true);
    }
    if (tok_ == "false" || tok_ == "FALSE") {
      next();
      return CtlFormula::constant(false);
    }
    if (std::isalpha(static_cast<unsigned char>(tok_[0])) || tok_[0] == '_') {
      for (std::size_t i = 0; i < props_.size(); ++i) {
        if (props_[i] == tok_) {
          auto f = CtlFormula::prop(tok_, static_cast<int>(i));
          next();
          return f;
        }
      }
      throw UnknownProposition(tok_);
    }
    fail("unexpected '" + tok_ + "'");
  }

  std::string_view text_;
  std::span<const std::string> props_;
  std::size_t pos_ = 0;
  std::size_t start_ = 0;
  std::string tok_;
};

int precedence(CtlOp op) {
  switch (op) {
    case CtlOp::Implies: return 1;
    case CtlOp::Or: return 2;
    case CtlOp::And: return 3;
    case CtlOp::Not:
    case CtlOp::EX:
    case CtlOp::AX:
    case CtlOp::EF:
    case CtlOp::AF:
    case CtlOp::EG:
    case CtlOp::AG: return 4;
    default: return 5;
  }
}

const char* prefix_text(CtlOp op) {
  switch (op) {
    case CtlOp::Not: return "!";
    case CtlOp::EX: return "EX ";
    case CtlOp::AX: return "AX ";
    case CtlOp::EF: return "EF ";
    case CtlOp::AF: return "AF ";
    case CtlOp::EG: return "EG ";
    case CtlOp::AG: return "AG ";
    default: return "";
  }
}

std::string print(const CtlFormula& f, int min_prec) {
  const int p = precedence(f.op());
  std::string s;
  switch (f.op()) {
    case CtlOp::True: return "true";
    case CtlOp::False: return "false";
    case CtlOp::Prop: return f.name();
    case CtlOp::EU: return "E [ " + print(f.lhs(), 0) + " U " + print(f.rhs(), 0) + " ]";
    case CtlOp::AU: return "A [ " + print(f.lhs(), 0) + " U " + print(f.rhs(), 0) + " ]";
    case CtlOp::And: s = print(f.lhs(), 3) + " & " + print(f.rhs(), 4); break;
    case CtlOp::Or: s = print(f.lhs(), 2) + " | " + print(f.rhs(), 3); break;
    case CtlOp::Implies: s = print(f.lhs(), 2) + " -> " + print(f.rhs(), 1); break;
    default: s = prefix_text(f.op()) + print(f.lhs(), 4); break;
  }
  return p < min_prec ? "(" + s + ")" : s;
}

}  // namespace

CtlFormula parse_ctl(std::string_view text, std::span<const std::string> props) {
  return Parser(text, props).parse();
}

CtlFormula parse_ctl(std::string_view text, const GameSpec& spec) {
  std::vector<std::string> names;
  for (const auto& p : spec.propositions) names.push_back(p.name);
  return parse_ctl(text, names);
}

std::string to_string(const CtlFormula& f) { return print(f, 0); }

CtlFormula to_basis(const CtlFormula& f) {
  using F = CtlFormula;
  auto neg = [](F x) { return F::unary(CtlOp::Not, std::move(x)); };
  auto conj = [](F x, F y) { return F::binary(CtlOp::And, std::move(x), std::move(y)); };
  auto disj = [&](F x, F y) { return neg(conj(neg(std::move(x)), neg(std::move(y)))); };
  const F t = F::constant(true);
  switch (f.op()) {
    case CtlOp::True:
    case CtlOp::Prop: return f;
    case CtlOp::False: return neg(t);
    case CtlOp::Not: return neg(to_basis(f.lhs()));
    case CtlOp::And: return conj(to_basis(f.lhs()), to_basis(f.rhs()));
    case CtlOp::Or: return disj(to_basis(f.lhs()), to_basis(f.rhs()));
    case CtlOp::Implies: return disj(neg(to_basis(f.lhs())), to_basis(f.rhs()));
    case CtlOp::EX: return F::unary(CtlOp::EX, to_basis(f.lhs()));
    case CtlOp::AX: return neg(F::unary(CtlOp::EX, neg(to_basis(f.lhs()))));
    case CtlOp::EF: return F::binary(CtlOp::EU, t, to_basis(f.lhs()));
    case CtlOp::AG: return neg(F::binary(CtlOp::EU, t, neg(to_basis(f.lhs()))));
    case CtlOp::EG: return F::unary(CtlOp::EG, to_basis(f.lhs()));
    case CtlOp::AF: return neg(F::unary(CtlOp::EG, neg(to_basis(f.lhs()))));
    case CtlOp::EU: return F::binary(CtlOp::EU, to_basis(f.lhs()), to_basis(f.rhs()));
    case CtlOp::AU: {
      const F phi = to_basis(f.lhs());
      const F psi = to_basis(f.rhs());
      const F until = F::binary(CtlOp::EU, neg(psi), conj(neg(phi), neg(psi)));
      return conj(neg(until), neg(F::unary(CtlOp::EG, neg(psi))));
    }
  }
  return f;
}

int temporal_depth(const CtlFormula& f) {
  switch (f.op()) {
    case CtlOp::True:
    case CtlOp::False:
    case CtlOp::Prop: return 0;
    case CtlOp::Not: return temporal_depth(f.lhs());
    case CtlOp::And:
    case CtlOp::Or:
    case CtlOp::Implies: return std::max(temporal_depth(f.lhs()), temporal_depth(f.rhs()));
    case CtlOp::EU:
    case CtlOp::AU: return 1 + std::max(temporal_depth(f.lhs()), temporal_depth(f.rhs()));
    default: return 1 + temporal_depth(f.lhs());
  }
}

}  // namespace gamecheck

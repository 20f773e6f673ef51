#include "gamecheck/expr_parser.hpp"

#include <cctype>
#include <limits>
#include <string>
#include <vector>

namespace gamecheck {

namespace {

enum class Tok { Int, Ident, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

class Lexer {
 public:
  Lexer(std::string_view src, SourceLocation where) : src_(src), where_(where) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (true) {
      while (i < src_.size() && std::isspace(static_cast<unsigned char>(src_[i]))) ++i;
      if (i >= src_.size()) break;
      const char c = src_[i];
      const std::size_t start = i;
      if (std::isdigit(static_cast<unsigned char>(c))) {
        while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
        if (i < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[i])) || src_[i] == '_')) {
          throw MalformedExpression("malformed number", start, where_);
        }
        out.push_back({Tok::Int, std::string(src_.substr(start, i - start)), start});
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i])) || src_[i] == '_')) ++i;
        out.push_back({Tok::Ident, std::string(src_.substr(start, i - start)), start});
      } else {
        static constexpr std::string_view two[] = {"<=", ">=", "==", "!=", "->", "&&", "||"};
        std::string sym(1, c);
        for (auto t : two) {
          if (src_.substr(i, 2) == t) {
            sym = std::string(t);
            break;
          }
        }
        if (sym.size() == 1 && std::string_view("+-*()<>=!&|,").find(c) == std::string_view::npos) {
          throw MalformedExpression(std::string("unexpected character '") + c + "'", start, where_);
        }
        i += sym.size();
        out.push_back({Tok::Sym, sym, start});
      }
    }
    out.push_back({Tok::End, "", src_.size()});
    return out;
  }

 private:
  std::string_view src_;
  SourceLocation where_;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, SourceLocation where) : toks_(std::move(toks)), where_(where) {}

  Expr parse() {
    Expr e = implies();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  bool accept_sym(std::string_view s) {
    if (peek().kind == Tok::Sym && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_word(std::string_view w) {
    if (peek().kind == Tok::Ident && peek().text == w) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_sym(std::string_view s) {
    if (!accept_sym(s)) fail("expected '" + std::string(s) + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string m = msg;
    if (t.kind == Tok::End && msg.rfind("expected", 0) == 0) m += " before end of input";
    throw MalformedExpression(m, t.offset, where_);
  }

  // Wraps node construction so type errors carry the operator position.
  Expr build(Op op, std::vector<Expr> args, std::size_t offset) const {
    try {
      return Expr::make(op, std::move(args));
    } catch (const ExprTypeError& e) {
      throw MalformedExpression(e.what(), offset, where_);
    }
  }

  Expr implies() {
    Expr lhs = disjunction();
    const std::size_t at = peek().offset;
    if (accept_sym("->")) {
      Expr rhs = implies();
      return build(Op::Implies, {lhs, rhs}, at);
    }
    return lhs;
  }

  Expr disjunction() {
    Expr lhs = conjunction();
    while (true) {
      const std::size_t at = peek().offset;
      if (accept_sym("|") || accept_sym("||") || accept_word("or")) {
        lhs = build(Op::Or, {lhs, conjunction()}, at);
      } else {
        return lhs;
      }
    }
  }

  Expr conjunction() {
    Expr lhs = negation();
    while (true) {
      const std::size_t at = peek().offset;
      if (accept_sym("&") || accept_sym("&&") || accept_word("and")) {
        lhs = build(Op::And, {lhs, negation()}, at);
      } else {
        return lhs;
      }
    }
  }

  Expr negation() {
    const std::size_t at = peek().offset;
    if (accept_sym("!") || accept_word("not")) return build(Op::Not, {negation()}, at);
    return comparison();
  }

  Expr comparison() {
    Expr lhs = additive();
    static const std::pair<std::string_view, Op> ops[] = {
        {"<=", Op::Le}, {">=", Op::Ge}, {"==", Op::Eq}, {"!=", Op::Ne},
        {"<", Op::Lt}, {">", Op::Gt}, {"=", Op::Eq}};
    const std::size_t at = peek().offset;
    for (const auto& [sym, op] : ops) {
      if (accept_sym(sym)) {
        Expr rhs = additive();
        Expr result = build(op, {lhs, rhs}, at);
        if (peek().kind == Tok::Sym) {
          for (const auto& [s2, op2] : ops) {
            if (peek().text == s2) fail("comparisons do not chain; add parentheses");
          }
        }
        return result;
      }
    }
    return lhs;
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (true) {
      const std::size_t at = peek().offset;
      if (accept_sym("+")) {
        lhs = build(Op::Add, {lhs, multiplicative()}, at);
      } else if (accept_sym("-")) {
        lhs = build(Op::Sub, {lhs, multiplicative()}, at);
      } else {
        return lhs;
      }
    }
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (true) {
      const std::size_t at = peek().offset;
      if (accept_sym("*")) {
        lhs = build(Op::Mul, {lhs, unary()}, at);
      } else if (accept_word("div")) {
        lhs = build(Op::Div, {lhs, unary()}, at);
      } else if (accept_word("mod")) {
        lhs = build(Op::Mod, {lhs, unary()}, at);
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    const std::size_t at = peek().offset;
    if (accept_sym("-")) {
      if (peek().kind == Tok::Int) return integer(true);
      return build(Op::Neg, {unary()}, at);
    }
    return primary();
  }

  Expr integer(bool negative) {
    const Token& t = peek();
    constexpr auto max = static_cast<unsigned long long>(std::numeric_limits<Value>::max());
    unsigned long long v = 0;
    for (char c : t.text) {
      if (__builtin_mul_overflow(v, 10ULL, &v) ||
          __builtin_add_overflow(v, static_cast<unsigned long long>(c - '0'), &v)) {
        fail("integer literal exceeds 64 bits");
      }
    }
    if (v > max + (negative ? 1 : 0)) fail("integer literal exceeds 64 bits");
    ++pos_;
    if (negative) {
      return Expr::integer(v == max + 1 ? std::numeric_limits<Value>::min() : -static_cast<Value>(v));
    }
    return Expr::integer(static_cast<Value>(v));
  }

  std::vector<Expr> call_args(std::size_t n) {
    expect_sym("(");
    std::vector<Expr> args;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) expect_sym(",");
      args.push_back(implies());
    }
    expect_sym(")");
    return args;
  }

  Expr primary() {
    const Token& t = peek();
    const std::size_t at = t.offset;
    if (t.kind == Tok::Int) return integer(false);
    if (accept_sym("(")) {
      Expr e = implies();
      expect_sym(")");
      return e;
    }
    if (t.kind != Tok::Ident) fail(t.kind == Tok::End ? "expected an operand" : "unexpected '" + t.text + "'");
    const std::string word = t.text;
    if (word == "true" || word == "TRUE") {
      ++pos_;
      return Expr::boolean(true);
    }
    if (word == "false" || word == "FALSE") {
      ++pos_;
      return Expr::boolean(false);
    }
    if (word == "div" || word == "mod" || word == "and" || word == "or" || word == "not") {
      fail("unexpected keyword '" + word + "'");
    }
    ++pos_;
    struct Fn {
      std::string_view name;
      Op op;
      std::size_t arity;
    };
    static constexpr Fn fns[] = {{"abs", Op::Abs, 1}, {"min", Op::Min, 2}, {"max", Op::Max, 2},
                                 {"ite", Op::Ite, 3}, {"clamp", Op::Clamp, 3}};
    if (peek().kind == Tok::Sym && peek().text == "(") {
      if (word == "pre") {
        expect_sym("(");
        if (peek().kind != Tok::Ident) fail("pre() takes an attribute name");
        std::string name = peek().text;
        ++pos_;
        expect_sym(")");
        return Expr::pre(std::move(name));
      }
      for (const auto& f : fns) {
        if (word == f.name) return build(f.op, call_args(f.arity), at);
      }
      throw MalformedExpression("unknown function '" + word + "'", at, where_);
    }
    return Expr::ref(word);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SourceLocation where_;
};

}  // namespace

Expr parse_expression(std::string_view text, SourceLocation where) {
  Parser p(Lexer(text, where).run(), where);
  return p.parse();
}

}  // namespace gamecheck

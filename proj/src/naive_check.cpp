#include "gamecheck/checker.hpp"

namespace gamecheck {

namespace {

using Bits = std::vector<char>;

class Naive {
 public:
  explicit Naive(const KripkeGraph& g) : g_(g), n_(g.size()) {}

  Bits eval(const CtlFormula& f) {
    Bits out(n_, 0);
    switch (f.op()) {
      case CtlOp::True: out.assign(n_, 1); break;
      case CtlOp::False: break;
      case CtlOp::Prop:
        for (std::size_t s = 0; s < n_; ++s) out[s] = g_.labels[f.index()].test(s);
        break;
      case CtlOp::Not: {
        const Bits a = eval(f.lhs());
        for (std::size_t s = 0; s < n_; ++s) out[s] = !a[s];
        break;
      }
      case CtlOp::And:
      case CtlOp::Or:
      case CtlOp::Implies: {
        const Bits a = eval(f.lhs());
        const Bits b = eval(f.rhs());
        for (std::size_t s = 0; s < n_; ++s) {
          out[s] = f.op() == CtlOp::And ? (a[s] && b[s]) : f.op() == CtlOp::Or ? (a[s] || b[s]) : (!a[s] || b[s]);
        }
        break;
      }
      case CtlOp::EX:
      case CtlOp::AX: {
        const Bits a = eval(f.lhs());
        for (std::size_t s = 0; s < n_; ++s) {
          bool any = false, all = true;
          for (const auto& e : g_.successors(static_cast<StateId>(s))) {
            any = any || a[e.state];
            all = all && a[e.state];
          }
          out[s] = f.op() == CtlOp::EX ? any : all;
        }
        break;
      }
      case CtlOp::EF: {
        const Bits a = eval(f.lhs());
        const Bits all(n_, 1);
        for (std::size_t s = 0; s < n_; ++s) out[s] = reaches(s, all, a);
        break;
      }
      case CtlOp::AG: {
        const Bits a = eval(f.lhs());
        Bits bad(n_);
        for (std::size_t s = 0; s < n_; ++s) bad[s] = !a[s];
        const Bits all(n_, 1);
        for (std::size_t s = 0; s < n_; ++s) out[s] = !reaches(s, all, bad);
        break;
      }
      case CtlOp::EU: {
        const Bits a = eval(f.lhs());
        const Bits b = eval(f.rhs());
        for (std::size_t s = 0; s < n_; ++s) out[s] = reaches(s, a, b);
        break;
      }
      case CtlOp::EG: {
        const Bits a = eval(f.lhs());
        for (std::size_t s = 0; s < n_; ++s) out[s] = a[s] && cycle_within(s, a);
        break;
      }
      case CtlOp::AF: {
        // Fails iff some infinite path avoids the operand: a cycle reachable
        // inside the complement.
        const Bits a = eval(f.lhs());
        Bits avoid(n_);
        for (std::size_t s = 0; s < n_; ++s) avoid[s] = !a[s];
        for (std::size_t s = 0; s < n_; ++s) out[s] = a[s] || !cycle_within(s, avoid);
        break;
      }
      case CtlOp::AU: {
        // Fails iff, moving through phi & !psi states, one can step into a
        // !phi & !psi state or loop forever.
        const Bits a = eval(f.lhs());
        const Bits b = eval(f.rhs());
        Bits mid(n_), stop(n_);
        for (std::size_t s = 0; s < n_; ++s) {
          mid[s] = a[s] && !b[s];
          stop[s] = !a[s] && !b[s];
        }
        for (std::size_t s = 0; s < n_; ++s) {
          if (b[s]) {
            out[s] = 1;
          } else if (!a[s]) {
            out[s] = 0;
          } else {
            out[s] = !reaches(s, mid, stop) && !cycle_within(s, mid);
          }
        }
        break;
      }
    }
    return out;
  }

 private:
  // A path from s through `through` states (s included unless s is a goal)
  // ending in a `goal` state.
  bool reaches(std::size_t s, const Bits& through, const Bits& goal) const {
    if (goal[s]) return true;
    if (!through[s]) return false;
    Bits seen(n_, 0);
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const auto& e : g_.successors(static_cast<StateId>(u))) {
        if (goal[e.state]) return true;
        if (through[e.state] && !seen[e.state]) {
          seen[e.state] = 1;
          stack.push_back(e.state);
        }
      }
    }
    return false;
  }

  // Whether a cycle made of `inside` states is reachable from s while staying
  // inside (three-colour depth-first search).
  bool cycle_within(std::size_t s, const Bits& inside) const {
    if (!inside[s]) return false;
    std::vector<char> colour(n_, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    colour[s] = 1;
    while (!stack.empty()) {
      auto& [u, i] = stack.back();
      const auto out = g_.successors(static_cast<StateId>(u));
      if (i == out.size()) {
        colour[u] = 2;
        stack.pop_back();
        continue;
      }
      const std::size_t w = out[i++].state;
      if (!inside[w]) continue;
      if (colour[w] == 1) return true;
      if (colour[w] == 0) {
        colour[w] = 1;
        stack.emplace_back(w, 0);
      }
    }
    return false;
  }

  const KripkeGraph& g_;
  std::size_t n_;
};

}  // namespace

StateSet naive_check(const KripkeGraph& g, const CtlFormula& f) {
  if (g.size() > kOracleStateLimit) throw OracleScaleExceeded(g.size());
  const auto bits = Naive(g).eval(f);
  StateSet out(g.size());
  for (std::size_t s = 0; s < bits.size(); ++s) {
    if (bits[s]) out.set(s);
  }
  return out;
}

}  // namespace gamecheck

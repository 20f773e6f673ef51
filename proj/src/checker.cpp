#include "gamecheck/checker.hpp"

#include <algorithm>
#include <deque>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gamecheck {

namespace {

std::uint64_t image_word(const KripkeGraph& g, const StateSet& target, std::size_t w) {
  std::uint64_t acc = 0;
  const std::size_t lo = w * 64;
  const std::size_t hi = std::min(lo + 64, g.size());
  for (std::size_t s = lo; s < hi; ++s) {
    for (const auto& e : g.successors(static_cast<StateId>(s))) {
      if (target.test(e.state)) {
        acc |= 1ULL << (s - lo);
        break;
      }
    }
  }
  return acc;
}

}  // namespace

StateSet ex_image_serial(const KripkeGraph& g, const StateSet& target) {
  StateSet out(g.size());
  for (std::size_t w = 0; w < out.word_count(); ++w) out.set_word(w, image_word(g, target, w));
  return out;
}

StateSet ex_image(const KripkeGraph& g, const StateSet& target, bool parallel) {
#ifdef _OPENMP
  StateSet out(g.size());
  const auto words = static_cast<std::int64_t>(out.word_count());
  if (parallel && words > 64 && omp_get_max_threads() > 1) {
#pragma omp parallel for schedule(static)
    for (std::int64_t w = 0; w < words; ++w) out.set_word(w, image_word(g, target, w));
    return out;
  }
#else
  (void)parallel;
#endif
  return ex_image_serial(g, target);
}

StateSet eu_fixpoint(const KripkeGraph& g, const StateSet& phi, const StateSet& psi) {
  StateSet result = psi;
  std::vector<StateId> work;
  psi.for_each([&](std::size_t s) { work.push_back(static_cast<StateId>(s)); });
  while (!work.empty()) {
    const StateId t = work.back();
    work.pop_back();
    for (const auto& e : g.predecessors(t)) {
      if (!result.test(e.state) && phi.test(e.state)) {
        result.set(e.state);
        work.push_back(e.state);
      }
    }
  }
  return result;
}

StateSet eg_fixpoint(const KripkeGraph& g, const StateSet& phi) {
  StateSet result = phi;
  std::vector<std::uint32_t> inside(g.size(), 0);
  std::vector<StateId> work;
  phi.for_each([&](std::size_t s) {
    for (const auto& e : g.successors(static_cast<StateId>(s))) {
      if (phi.test(e.state)) ++inside[s];
    }
    if (inside[s] == 0) work.push_back(static_cast<StateId>(s));
  });
  for (auto s : work) result.reset(s);
  while (!work.empty()) {
    const StateId t = work.back();
    work.pop_back();
    for (const auto& e : g.predecessors(t)) {
      if (result.test(e.state) && --inside[e.state] == 0) {
        result.reset(e.state);
        work.push_back(e.state);
      }
    }
  }
  return result;
}

namespace {

StateSet sat_basis(const KripkeGraph& g, const CtlFormula& f) {
  switch (f.op()) {
    case CtlOp::True: return g.all();
    case CtlOp::Prop: return g.labels[static_cast<std::size_t>(f.index())];
    case CtlOp::Not: return ~sat_basis(g, f.lhs());
    case CtlOp::And: return sat_basis(g, f.lhs()) & sat_basis(g, f.rhs());
    case CtlOp::EX: return ex_image(g, sat_basis(g, f.lhs()));
    case CtlOp::EU: return eu_fixpoint(g, sat_basis(g, f.lhs()), sat_basis(g, f.rhs()));
    case CtlOp::EG: return eg_fixpoint(g, sat_basis(g, f.lhs()));
    default: throw Error("Internal", "formula not in basis form: " + to_string(f));
  }
}

// Shortest path from `sources` into `goal`; empty when none.
std::vector<TraceStep> shortest_path(const KripkeGraph& g, const std::vector<StateId>& sources, const StateSet& goal) {
  constexpr StateId none = ~StateId{0};
  std::vector<StateId> parent(g.size(), none);
  std::vector<std::uint32_t> via(g.size(), 0);
  StateSet seen(g.size());
  std::deque<StateId> queue;
  for (auto s : sources) {
    if (!seen.test(s)) {
      seen.set(s);
      queue.push_back(s);
    }
  }
  std::optional<StateId> hit;
  while (!queue.empty() && !hit) {
    const StateId s = queue.front();
    queue.pop_front();
    if (goal.test(s)) {
      hit = s;
      break;
    }
    for (const auto& e : g.successors(s)) {
      if (seen.test(e.state)) continue;
      seen.set(e.state);
      parent[e.state] = s;
      via[e.state] = e.joint;
      queue.push_back(e.state);
    }
  }
  std::vector<TraceStep> steps;
  if (!hit) return steps;
  for (StateId s = *hit;; s = parent[s]) {
    TraceStep step{s, g.state(s), std::nullopt};
    if (!steps.empty()) step.joint = via[steps.back().state];
    steps.push_back(std::move(step));
    if (parent[s] == none) break;
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

}  // namespace

StateSet sat_set(const KripkeGraph& g, const CtlFormula& f) { return sat_basis(g, to_basis(f)); }

Verdict check(const KripkeGraph& g, const CtlFormula& f) {
  Verdict v;
  v.formula = f;
  const StateSet sat = sat_set(g, f);
  v.sat_count = sat.count();
  v.holds = g.initial_set().subset_of(sat);
  if (!v.holds && f.op() == CtlOp::AG) {
    const StateSet bad = ~sat_set(g, f.lhs());
    Trace t{Trace::Kind::Counterexample, f.lhs(), shortest_path(g, g.initial, bad)};
    if (!t.steps.empty()) v.trace = std::move(t);
  } else if (v.holds && f.op() == CtlOp::EF && !g.initial.empty()) {
    Trace t{Trace::Kind::Witness, f.lhs(), shortest_path(g, {g.initial.front()}, sat_set(g, f.lhs()))};
    if (!t.steps.empty()) v.trace = std::move(t);
  }
  return v;
}

std::string replay_trace(const KripkeGraph& g, const Trace& t) {
  if (t.steps.empty()) return "empty trace";
  const auto& first = t.steps.front().values;
  const auto start = g.find(first);
  if (!start || std::find(g.initial.begin(), g.initial.end(), *start) == g.initial.end()) {
    return "first state is not initial";
  }
  const Stepper stepper(g.spec);
  for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
    const auto& step = t.steps[i];
    if (!step.joint) return "step " + std::to_string(i) + " has no joint action";
    const auto& want = g.joint_actions[*step.joint];
    bool found = false;
    for (const auto& s : stepper.successors(step.values)) {
      if (s.joint == want && s.state == t.steps[i + 1].values) {
        found = true;
        break;
      }
    }
    if (!found) return "step " + std::to_string(i) + " is not a transition of the game";
  }
  if (t.steps.back().joint) return "last step carries a joint action";
  const auto last = g.find(t.steps.back().values);
  if (!last) return "last state is not reachable";
  const bool sat = sat_set(g, t.target).test(*last);
  if (t.kind == Trace::Kind::Counterexample && sat) return "last state satisfies the target";
  if (t.kind == Trace::Kind::Witness && !sat) return "last state does not satisfy the target";
  return {};
}

}  // namespace gamecheck

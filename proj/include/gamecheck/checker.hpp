#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gamecheck/ctl.hpp"
#include "gamecheck/kripke.hpp"

namespace gamecheck {

// Satisfaction set over the reachable states, by backward fixpoints on the
// basis {!, &, EX, EU, EG}.
StateSet sat_set(const KripkeGraph& g, const CtlFormula& f);

// Pre-image of `target`: states with at least one successor in it.
StateSet ex_image(const KripkeGraph& g, const StateSet& target, bool parallel = true);
StateSet ex_image_serial(const KripkeGraph& g, const StateSet& target);

StateSet eu_fixpoint(const KripkeGraph& g, const StateSet& phi, const StateSet& psi);
StateSet eg_fixpoint(const KripkeGraph& g, const StateSet& phi);

struct TraceStep {
  StateId state = 0;
  std::vector<Value> values;
  std::optional<std::uint32_t> joint;  // joint action taken to reach the next step
};

struct Trace {
  enum class Kind { Counterexample, Witness };
  Kind kind = Kind::Counterexample;
  CtlFormula target;  // the subformula the last state violates or satisfies
  std::vector<TraceStep> steps;
};

struct Verdict {
  CtlFormula formula;
  bool holds = false;
  std::size_t sat_count = 0;
  std::optional<Trace> trace;
};

// holds iff every initial state satisfies f. A failed `AG p` gets a shortest
// path to a state outside Sat(p); a holding `EF p` gets a shortest path from
// the first initial state into Sat(p).
Verdict check(const KripkeGraph& g, const CtlFormula& f);

// Replays a trace through the game's successor relation. Returns an empty
// string on success, otherwise a description of the first mismatch.
std::string replay_trace(const KripkeGraph& g, const Trace& t);

// Definitional evaluation (per-state path search with cycle detection) used
// as an oracle for sat_set. Throws OracleScaleExceeded above 2000 states.
StateSet naive_check(const KripkeGraph& g, const CtlFormula& f);

inline constexpr std::size_t kOracleStateLimit = 2000;

}  // namespace gamecheck

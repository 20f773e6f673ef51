#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "gamecheck/domain.hpp"
#include "gamecheck/semantics.hpp"
#include "gamecheck/state_set.hpp"

namespace gamecheck {

using StateId = std::uint32_t;

inline constexpr std::uint64_t kDefaultStateCap = 10'000'000;

struct Edge {
  StateId state;       // target in the successor lists, source in the predecessor lists
  std::uint32_t joint; // index into KripkeGraph::joint_actions
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Reachable part of the game's Kripke structure. States are numbered in
// breadth-first discovery order; edges are kept in CSR form both ways.
class KripkeGraph {
 public:
  GameSpec spec;
  StateCodec codec;
  std::vector<std::uint64_t> codes;        // state id -> attribute-vector code
  std::vector<StateId> initial;            // in initial-set order
  std::vector<std::size_t> succ_offsets;   // size() + 1 entries
  std::vector<Edge> succ;
  std::vector<std::size_t> pred_offsets;
  std::vector<Edge> pred;
  std::vector<JointAction> joint_actions;  // interned, in first-use order
  std::vector<StateSet> labels;            // one per proposition

  std::size_t size() const { return codes.size(); }
  std::vector<Value> state(StateId s) const { return codec.decode(codes[s]); }
  std::span<const Edge> successors(StateId s) const {
    return {succ.data() + succ_offsets[s], succ.data() + succ_offsets[s + 1]};
  }
  std::span<const Edge> predecessors(StateId s) const {
    return {pred.data() + pred_offsets[s], pred.data() + pred_offsets[s + 1]};
  }
  std::optional<StateId> find(std::span<const Value> v) const;
  StateSet initial_set() const;
  StateSet all() const { return StateSet(size(), true); }

  std::unordered_map<std::uint64_t, StateId> index;  // code -> state id
};

struct BuildOptions {
  std::uint64_t max_states = kDefaultStateCap;
  bool parallel = true;
};

// Breadth-first closure of the successor relation from the initial set. Throws
// StateCapExceeded when more than max_states states are discovered, the step
// errors of Stepper::successors, and Error("Deadlock") for a state without
// successors.
KripkeGraph build_kripke(const GameSpec& spec, const BuildOptions& opts = {});

// Single-threaded reference for the frontier expansion and labelling.
KripkeGraph build_kripke_serial(const GameSpec& spec, const BuildOptions& opts = {});

// Labels computed from scratch for every state (one set per proposition).
std::vector<StateSet> label_states(const KripkeGraph& g, bool parallel = true);

struct GraphStats {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;  // distinct (source, target) pairs
  std::uint64_t edges = 0;        // (source, joint action, target) triples
  std::uint64_t initial = 0;
  std::uint64_t joint_actions = 0;
  std::uint64_t max_out_degree = 0;
  std::vector<std::pair<std::string, std::uint64_t>> proposition_counts;
};

GraphStats stats(const KripkeGraph& g);

// Text dump: "# states" section with "id<TAB>a=v,..." lines, then "# edges"
// with "src<TAB>dst<TAB>joint action", both in state-id order.
void dump_graph(const KripkeGraph& g, std::ostream& os);

}  // namespace gamecheck

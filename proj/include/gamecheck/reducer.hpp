#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gamecheck/game.hpp"

namespace gamecheck {

struct ReductionSpec {
  std::vector<std::pair<std::string, Value>> freeze;                      // attribute -> constant
  std::vector<std::pair<std::string, std::vector<std::string>>> drop_actions;  // actor -> actions
  std::vector<std::string> drop_collisions;

  bool identity() const { return freeze.empty() && drop_actions.empty() && drop_collisions.empty(); }
};

// Checks names and frozen constants against the spec (UnknownName,
// FrozenOutOfDomain, DuplicateName).
void check_reduction(const GameSpec& spec, const ReductionSpec& r);

// Freezes attributes (substitute and fold), removes actions from actors and
// drops collisions. Actions and collisions left without writes disappear, as
// do actors whose attributes were all frozen and that keep no action.
// Throws EmptyActorActions when an actor keeps live attributes but no action.
GameSpec apply_reduction(const GameSpec& spec, const ReductionSpec& r);

std::string digest_spec(const GameSpec& spec);
std::string digest_reduction(const ReductionSpec& r);

struct ReductionReport {
  std::optional<std::uint64_t> domain_before, domain_after;  // nullopt: over 64 bits
  double log10_before = 0, log10_after = 0;
  std::optional<std::uint64_t> reachable_before, reachable_after;  // nullopt: over the cap
  std::string before_note, after_note;
  std::vector<std::string> removed;  // "attribute x", "action a", ...
};

ReductionReport reduction_report(const GameSpec& before, const GameSpec& after, std::uint64_t state_cap);

std::string format_reduction_report(const ReductionReport& r);

inline constexpr const char* kReductionWarning =
    "warning: reductions are not verdict-preserving in general; check that the property survives the reduction";

}  // namespace gamecheck

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gamecheck/domain.hpp"
#include "gamecheck/game.hpp"

namespace gamecheck {

enum class ViolationKind {
  Coverage,           // OP-COVERAGE: an actor (or the actors jointly) cannot move
  Conflict,           // OP-CONFLICT: two unsynchronised actions writing one attribute
  Range,              // RANGE: a write leaves its attribute's domain
  CollisionConflict,  // COLLISION-CONFLICT: two collisions writing one attribute
  Evaluation,         // EVALUATION: a guard or write raised (e.g. division by zero)
  EmptyInitial,       // INITIAL: no initial state
};

const char* kind_name(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string subject;                 // actor, "a / b" pair, "action.attr", ...
  std::string message;
  std::optional<std::vector<Value>> witness;  // smallest witness in enumeration order
  std::uint64_t occurrences = 0;       // witness vectors found
};

struct ValidationReport {
  std::vector<Violation> violations;   // sorted by kind, then subject
  bool exhaustive = false;             // false: the per-vector checks were skipped
  std::string skipped_reason;
  std::uint64_t vectors_checked = 0;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const;
};

struct ValidateOptions {
  std::uint64_t cap = kDefaultEnumerationCap;
  bool require_exhaustive = false;     // throw DomainTooLarge instead of skipping
  bool parallel = true;
};

// Checks the operator conditions of the game: every actor can act at every
// attribute vector, simultaneously admissible actions of different actors write
// disjoint attributes, writes stay in their domains and applicable collisions
// never write the same attribute. The per-vector checks enumerate V and are
// skipped (or raise DomainTooLarge) above the cap.
ValidationReport validate_game(const GameSpec& spec, const ValidateOptions& opts = {});

// Single-threaded reference for the exhaustive scan.
ValidationReport validate_game_serial(const GameSpec& spec, const ValidateOptions& opts = {});

std::string format_report(const GameSpec& spec, const ValidationReport& r);

}  // namespace gamecheck

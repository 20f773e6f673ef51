#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gamecheck/game.hpp"

namespace gamecheck {

struct AdmissibleAction {
  std::size_t action = 0;
  std::vector<Value> choices;  // one value per ChoiceDecl of the action
  friend bool operator==(const AdmissibleAction&, const AdmissibleAction&) = default;
};

// One action performed in a step. A shared action appears once and lists every
// participating actor.
struct ActionPick {
  std::size_t action = 0;
  std::vector<Value> choices;
  std::vector<std::size_t> actors;
  friend bool operator==(const ActionPick&, const ActionPick&) = default;
  friend auto operator<=>(const ActionPick&, const ActionPick&) = default;
};

struct JointAction {
  std::vector<ActionPick> picks;  // ordered by first participating actor
  friend bool operator==(const JointAction&, const JointAction&) = default;
  friend auto operator<=>(const JointAction&, const JointAction&) = default;
};

// e.g. "pg1:first_move(h=2) pg2:second_stay pg1+sb1:first_throw"
std::string format_joint_action(const GameSpec& spec, const JointAction& j);
std::string format_state(const GameSpec& spec, std::span<const Value> v);

struct Successor {
  JointAction joint;
  std::vector<Value> state;
};

enum class StepStatus { Ok, ActionConflict, CollisionConflict, RangeViolation };

// Everything a visitor learns about one joint action at one source state.
struct StepView {
  StepStatus status = StepStatus::Ok;
  std::span<const int> pick;        // option index chosen by each actor
  std::span<const Value> next;      // successor (valid when status == Ok)
  // Diagnostics for a failed step.
  int attribute = -1;               // offending attribute
  int source = -1;                  // action (ActionConflict/RangeViolation from an action) or collision
  int other = -1;                   // earlier writer (conflicts)
  bool source_is_collision = false;
  Value value = 0;                  // out-of-domain value (RangeViolation)
};

// Compiled step semantics of a resolved game: admissible actions, joint
// actions and the two-phase evolution (simultaneous action writes, then
// collision fixups over the intermediate state). The spec must outlive it.
//
// Joint actions are the consistent selections of one admissible
// (action, choice valuation) per actor: a shared action is either chosen by
// all of its participants with one valuation, or by none of them.
class Stepper {
 public:
  explicit Stepper(const GameSpec& spec);

  const GameSpec& spec() const { return *spec_; }

  // Per-thread working memory; reuse across calls to avoid allocation.
  struct Scratch {
    std::vector<Value> choice_buf;
    std::vector<Value> value_buf;
    struct Option {
      int action;
      std::size_t choice_begin;
      std::size_t value_begin;
    };
    std::vector<Option> options;
    std::vector<std::vector<int>> per_actor;
    std::vector<int> pick;
    std::vector<Value> valuation;
    std::vector<Value> inter;
    std::vector<Value> next;
    std::vector<int> action_writer;
    std::vector<int> collision_writer;
    std::vector<Value> pending;
    std::vector<int> pending_target;
    std::vector<char> seen_option;
  };

  // Fills scratch.options / scratch.per_actor for state v: every
  // (action, valuation) whose guard holds, with its write values evaluated on v.
  void compute_options(std::span<const Value> v, Scratch& s) const;

  // Calls visit for every consistent joint action at v, in odometer order over
  // actors (declaration order, first actor most significant). Returns the
  // number of joint actions visited. Requires compute_options(v, s) first.
  std::size_t expand(std::span<const Value> v, Scratch& s, const std::function<void(const StepView&)>& visit) const;

  std::vector<AdmissibleAction> admissible(std::size_t actor, std::span<const Value> v) const;

  // Throws CollisionConflict / ActionConflict / RangeViolation on a bad step.
  std::vector<Successor> successors(std::span<const Value> v) const;
  void successors(std::span<const Value> v, Scratch& s,
                  const std::function<void(const JointAction&, std::span<const Value>)>& out) const;

  JointAction joint_action(const Scratch& s, std::span<const int> pick) const;

  bool guard(std::size_t action, std::span<const Value> v, std::span<const Value> choices) const;
  bool proposition(std::size_t prop, std::span<const Value> v) const;

  // Raises the error matching a failed StepView.
  [[noreturn]] void raise(const StepView& view, std::span<const Value> v, const Scratch& s) const;

 private:
  const GameSpec* spec_;
  std::vector<Program> guards_;
  std::vector<std::vector<Program>> writes_;
  std::vector<Program> collision_guards_;
  std::vector<std::vector<Program>> collision_writes_;
  std::vector<Program> propositions_;
};

std::vector<AdmissibleAction> admissible_actions(const GameSpec& spec, std::size_t actor, std::span<const Value> v);
std::vector<AdmissibleAction> admissible_actions(const GameSpec& spec, std::string_view actor,
                                                 std::span<const Value> v);
std::vector<Successor> successors(const GameSpec& spec, std::span<const Value> v);

}  // namespace gamecheck

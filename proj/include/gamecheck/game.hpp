#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gamecheck/expr.hpp"

namespace gamecheck {

struct AttributeDecl {
  std::string name;
  Value lo = 0;
  Value hi = 0;
  std::string owner;
  Value size() const { return hi - lo + 1; }
  bool contains(Value v) const { return lo <= v && v <= hi; }
};

struct ParameterDecl {
  std::string name;
  Value value = 0;
};

// Finite nondeterministic choice carried by an action (e.g. a heading).
struct ChoiceDecl {
  std::string name;
  Value lo = 0;
  Value hi = 0;
};

struct Assignment {
  std::string target;
  Expr value;
  int index = -1;  // attribute slot, filled by resolve_game
};

struct ActionDecl {
  std::string name;
  std::vector<std::string> actors;  // more than one: a shared action
  std::vector<ChoiceDecl> choices;
  Expr guard;
  std::vector<Assignment> writes;
  std::vector<std::size_t> actor_index;  // filled by resolve_game

  bool shared() const { return actors.size() > 1; }
};

// Fixup applied after the simultaneous action step. Guard and writes read the
// intermediate state; pre(x) reads the state before the step.
struct CollisionDecl {
  std::string name;
  Expr guard;
  std::vector<Assignment> writes;
};

struct PropositionDecl {
  std::string name;
  Expr predicate;
};

// Initial set: explicit vectors (declaration order), plus every vector that
// satisfies all constraints when at least one constraint is given.
struct InitialSpec {
  std::vector<std::vector<Value>> vectors;
  std::vector<Expr> constraints;
};

struct Provenance {
  std::string source_digest;
  std::string reduction_digest;
};

struct GameSpec {
  std::vector<std::string> actors;
  std::vector<ParameterDecl> parameters;
  std::vector<AttributeDecl> attributes;
  std::vector<ActionDecl> actions;
  std::vector<CollisionDecl> collisions;
  InitialSpec initial;
  std::vector<PropositionDecl> propositions;
  std::vector<std::pair<std::string, std::string>> defaults;  // template tag -> text
  std::optional<Provenance> provenance;

  std::optional<std::size_t> attribute_index(std::string_view name) const;
  std::optional<std::size_t> actor_index(std::string_view name) const;
  std::optional<std::size_t> action_index(std::string_view name) const;
  std::optional<std::size_t> parameter_index(std::string_view name) const;
  std::optional<std::size_t> proposition_index(std::string_view name) const;
  std::optional<std::size_t> collision_index(std::string_view name) const;
};

// Structural equality of two specs (names, domains, expressions, initial set).
// Provenance and resolution slots are ignored.
bool same_structure(const GameSpec& a, const GameSpec& b);

// Checks names and binds every expression in place: duplicate or unknown names,
// invalid identifiers, owner/actor references, expression types, reference
// rules (pre() only in collisions, choices only inside their action) and
// explicit initial vectors lying inside the domains. Semantic conditions on
// the operators are left to validate_game.
void resolve_game(GameSpec& spec);

bool is_identifier(std::string_view s);

// Expression reference scopes, exposed for the reducer and the SMV emitter.
enum class ExprContext { Guard, Write, CollisionGuard, CollisionWrite, Proposition, Initial };

Expr resolve_expr(const GameSpec& spec, const Expr& e, ExprContext ctx, const ActionDecl* action = nullptr);

}  // namespace gamecheck

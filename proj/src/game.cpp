#include "gamecheck/game.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace gamecheck {

namespace {

template <typename T>
std::optional<std::size_t> find_named(const std::vector<T>& items, std::string_view name) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].name == name) return i;
  }
  return std::nullopt;
}

bool is_reserved(std::string_view s) {
  static const std::set<std::string_view> words = {"true", "false", "TRUE", "FALSE", "div", "mod", "and",
                                                  "or",   "not",   "pre",  "abs",   "min", "max", "ite",
                                                  "clamp", "next", "init"};
  return words.contains(s);
}

void check_identifier(std::string_view s, const char* what) {
  if (!is_identifier(s) || is_reserved(s)) {
    throw ParseError(std::string("invalid ") + what + " name '" + std::string(s) + "'");
  }
}

bool valid_tag(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  });
}

const char* context_name(ExprContext ctx) {
  switch (ctx) {
    case ExprContext::Guard: return "guard";
    case ExprContext::Write: return "write";
    case ExprContext::CollisionGuard: return "collision guard";
    case ExprContext::CollisionWrite: return "collision write";
    case ExprContext::Proposition: return "proposition";
    case ExprContext::Initial: return "initial constraint";
  }
  return "expression";
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

std::optional<std::size_t> GameSpec::attribute_index(std::string_view name) const {
  return find_named(attributes, name);
}
std::optional<std::size_t> GameSpec::parameter_index(std::string_view name) const {
  return find_named(parameters, name);
}
std::optional<std::size_t> GameSpec::action_index(std::string_view name) const { return find_named(actions, name); }
std::optional<std::size_t> GameSpec::proposition_index(std::string_view name) const {
  return find_named(propositions, name);
}
std::optional<std::size_t> GameSpec::collision_index(std::string_view name) const {
  return find_named(collisions, name);
}
std::optional<std::size_t> GameSpec::actor_index(std::string_view name) const {
  auto it = std::find(actors.begin(), actors.end(), name);
  if (it == actors.end()) return std::nullopt;
  return static_cast<std::size_t>(it - actors.begin());
}

Expr resolve_expr(const GameSpec& spec, const Expr& e, ExprContext ctx, const ActionDecl* action) {
  const bool collision = ctx == ExprContext::CollisionGuard || ctx == ExprContext::CollisionWrite;
  return map_refs(e, [&](const Expr& ref) -> Expr {
    const std::string& name = ref.name();
    if (auto a = spec.attribute_index(name)) {
      if (ref.is_pre() && !collision) {
        throw UnknownName(std::string("pre(") + name + ") is only allowed in collision operators, not in a " +
                          context_name(ctx));
      }
      return ref.bound(ref.is_pre() ? RefKind::PreAttribute : RefKind::Attribute, static_cast<int>(*a));
    }
    if (ref.is_pre()) throw UnknownName("pre() of '" + name + "', which is not an attribute");
    if (auto p = spec.parameter_index(name)) {
      return ref.bound(RefKind::Parameter, static_cast<int>(*p), spec.parameters[*p].value);
    }
    if (action && (ctx == ExprContext::Guard || ctx == ExprContext::Write)) {
      if (auto c = find_named(action->choices, name)) return ref.bound(RefKind::Choice, static_cast<int>(*c));
    }
    throw UnknownName("unknown name '" + name + "' in " + context_name(ctx) +
                      (action ? " of action '" + action->name + "'" : std::string()));
  });
}

void resolve_game(GameSpec& spec) {
  std::set<std::string> seen;
  for (const auto& a : spec.actors) {
    check_identifier(a, "actor");
    if (!seen.insert(a).second) throw DuplicateName("duplicate actor '" + a + "'");
  }
  std::set<std::string> values;  // attributes and parameters share one namespace
  for (const auto& p : spec.parameters) {
    check_identifier(p.name, "parameter");
    if (!values.insert(p.name).second) throw DuplicateName("duplicate parameter '" + p.name + "'");
  }
  for (const auto& a : spec.attributes) {
    check_identifier(a.name, "attribute");
    if (!values.insert(a.name).second) {
      throw DuplicateName("attribute '" + a.name + "' clashes with an earlier attribute or parameter");
    }
    if (a.lo > a.hi) throw ParseError("attribute '" + a.name + "' has an empty range");
    Value size;
    if (__builtin_sub_overflow(a.hi, a.lo, &size) || size == std::numeric_limits<Value>::max()) {
      throw ParseError("attribute '" + a.name + "' range does not fit 64 bits");
    }
    if (!spec.actor_index(a.owner)) {
      throw UnknownName("attribute '" + a.name + "' is owned by unknown actor '" + a.owner + "'");
    }
  }

  seen.clear();
  for (auto& act : spec.actions) {
    check_identifier(act.name, "action");
    if (!seen.insert(act.name).second) throw DuplicateName("duplicate action '" + act.name + "'");
    if (act.actors.empty()) throw ParseError("action '" + act.name + "' has no actors");
    act.actor_index.clear();
    for (const auto& who : act.actors) {
      auto idx = spec.actor_index(who);
      if (!idx) throw UnknownName("action '" + act.name + "' names unknown actor '" + who + "'");
      if (std::find(act.actor_index.begin(), act.actor_index.end(), *idx) != act.actor_index.end()) {
        throw DuplicateName("action '" + act.name + "' lists actor '" + who + "' twice");
      }
      act.actor_index.push_back(*idx);
    }
    std::set<std::string> choice_names;
    for (const auto& c : act.choices) {
      check_identifier(c.name, "choice");
      if (values.contains(c.name)) {
        throw DuplicateName("choice '" + c.name + "' of action '" + act.name + "' shadows an attribute or parameter");
      }
      if (!choice_names.insert(c.name).second) {
        throw DuplicateName("duplicate choice '" + c.name + "' in action '" + act.name + "'");
      }
      if (c.lo > c.hi) throw ParseError("choice '" + c.name + "' of action '" + act.name + "' has an empty range");
    }
    if (!act.guard) act.guard = Expr::boolean(true);
    if (act.guard.type() != Type::Bool) {
      throw MalformedExpression("guard of action '" + act.name + "' must be boolean", 0);
    }
    act.guard = resolve_expr(spec, act.guard, ExprContext::Guard, &act);
    if (act.writes.empty()) throw ParseError("action '" + act.name + "' writes no attribute");
    std::set<std::string> targets;
    for (auto& w : act.writes) {
      auto idx = spec.attribute_index(w.target);
      if (!idx) throw UnknownName("action '" + act.name + "' writes unknown attribute '" + w.target + "'");
      if (!targets.insert(w.target).second) {
        throw DuplicateName("action '" + act.name + "' writes '" + w.target + "' twice");
      }
      if (w.value.type() != Type::Int) {
        throw MalformedExpression("write to '" + w.target + "' in action '" + act.name + "' must be an integer", 0);
      }
      w.index = static_cast<int>(*idx);
      w.value = resolve_expr(spec, w.value, ExprContext::Write, &act);
    }
  }

  seen.clear();
  for (auto& col : spec.collisions) {
    check_identifier(col.name, "collision");
    if (!seen.insert(col.name).second) throw DuplicateName("duplicate collision '" + col.name + "'");
    if (!col.guard) col.guard = Expr::boolean(true);
    if (col.guard.type() != Type::Bool) {
      throw MalformedExpression("guard of collision '" + col.name + "' must be boolean", 0);
    }
    col.guard = resolve_expr(spec, col.guard, ExprContext::CollisionGuard);
    if (col.writes.empty()) throw ParseError("collision '" + col.name + "' writes no attribute");
    std::set<std::string> targets;
    for (auto& w : col.writes) {
      auto idx = spec.attribute_index(w.target);
      if (!idx) throw UnknownName("collision '" + col.name + "' writes unknown attribute '" + w.target + "'");
      if (!targets.insert(w.target).second) {
        throw DuplicateName("collision '" + col.name + "' writes '" + w.target + "' twice");
      }
      if (w.value.type() != Type::Int) {
        throw MalformedExpression("write to '" + w.target + "' in collision '" + col.name + "' must be an integer", 0);
      }
      w.index = static_cast<int>(*idx);
      w.value = resolve_expr(spec, w.value, ExprContext::CollisionWrite);
    }
  }

  seen.clear();
  for (auto& prop : spec.propositions) {
    check_identifier(prop.name, "proposition");
    if (!seen.insert(prop.name).second) throw DuplicateName("duplicate proposition '" + prop.name + "'");
    if (prop.predicate.type() != Type::Bool) {
      throw MalformedExpression("proposition '" + prop.name + "' must be boolean", 0);
    }
    prop.predicate = resolve_expr(spec, prop.predicate, ExprContext::Proposition);
  }

  for (const auto& v : spec.initial.vectors) {
    if (v.size() != spec.attributes.size()) {
      throw ParseError("initial vector must assign all " + std::to_string(spec.attributes.size()) + " attributes");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!spec.attributes[i].contains(v[i])) {
        throw RangeViolation("initial value " + std::to_string(v[i]) + " of '" + spec.attributes[i].name +
                             "' lies outside its domain");
      }
    }
  }
  for (auto& c : spec.initial.constraints) {
    if (c.type() != Type::Bool) throw MalformedExpression("initial constraint must be boolean", 0);
    c = resolve_expr(spec, c, ExprContext::Initial);
  }
  if (spec.initial.vectors.empty() && spec.initial.constraints.empty()) {
    throw ParseError("the initial set is empty: give explicit vectors or constraints");
  }

  seen.clear();
  for (const auto& [tag, text] : spec.defaults) {
    if (!valid_tag(tag)) throw ParseError("default key '" + tag + "' is not a valid tag identifier");
    if (!seen.insert(tag).second) throw DuplicateName("duplicate default '" + tag + "'");
  }
}

bool same_structure(const GameSpec& a, const GameSpec& b) {
  auto same_writes = [](const std::vector<Assignment>& x, const std::vector<Assignment>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].target != y[i].target || !(x[i].value == y[i].value)) return false;
    }
    return true;
  };
  if (a.actors != b.actors) return false;
  if (a.parameters.size() != b.parameters.size() || a.attributes.size() != b.attributes.size() ||
      a.actions.size() != b.actions.size() || a.collisions.size() != b.collisions.size() ||
      a.propositions.size() != b.propositions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.parameters.size(); ++i) {
    if (a.parameters[i].name != b.parameters[i].name || a.parameters[i].value != b.parameters[i].value) return false;
  }
  for (std::size_t i = 0; i < a.attributes.size(); ++i) {
    const auto& x = a.attributes[i];
    const auto& y = b.attributes[i];
    if (x.name != y.name || x.lo != y.lo || x.hi != y.hi || x.owner != y.owner) return false;
  }
  for (std::size_t i = 0; i < a.actions.size(); ++i) {
    const auto& x = a.actions[i];
    const auto& y = b.actions[i];
    if (x.name != y.name || x.actors != y.actors || !(x.guard == y.guard) || !same_writes(x.writes, y.writes)) {
      return false;
    }
    if (x.choices.size() != y.choices.size()) return false;
    for (std::size_t k = 0; k < x.choices.size(); ++k) {
      if (x.choices[k].name != y.choices[k].name || x.choices[k].lo != y.choices[k].lo ||
          x.choices[k].hi != y.choices[k].hi) {
        return false;
      }
    }
  }
  for (std::size_t i = 0; i < a.collisions.size(); ++i) {
    const auto& x = a.collisions[i];
    const auto& y = b.collisions[i];
    if (x.name != y.name || !(x.guard == y.guard) || !same_writes(x.writes, y.writes)) return false;
  }
  for (std::size_t i = 0; i < a.propositions.size(); ++i) {
    if (a.propositions[i].name != b.propositions[i].name ||
        !(a.propositions[i].predicate == b.propositions[i].predicate)) {
      return false;
    }
  }
  return a.initial.vectors == b.initial.vectors && a.initial.constraints == b.initial.constraints &&
         a.defaults == b.defaults;
}

}  // namespace gamecheck

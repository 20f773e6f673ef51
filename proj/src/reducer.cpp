#include "gamecheck/reducer.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "gamecheck/domain.hpp"
#include "gamecheck/kripke.hpp"
#include "gamecheck/spec_io.hpp"

namespace gamecheck {

void check_reduction(const GameSpec& spec, const ReductionSpec& r) {
  std::set<std::string> seen;
  for (const auto& [name, value] : r.freeze) {
    const auto i = spec.attribute_index(name);
    if (!i) throw UnknownName("cannot freeze unknown attribute '" + name + "'");
    if (!seen.insert(name).second) throw DuplicateName("attribute '" + name + "' frozen twice");
    const auto& a = spec.attributes[*i];
    if (!a.contains(value)) {
      throw FrozenOutOfDomain("frozen value " + std::to_string(value) + " of '" + name + "' lies outside [" +
                              std::to_string(a.lo) + ", " + std::to_string(a.hi) + "]");
    }
  }
  for (const auto& [actor, actions] : r.drop_actions) {
    const auto who = spec.actor_index(actor);
    if (!who) throw UnknownName("drop_actions names unknown actor '" + actor + "'");
    for (const auto& name : actions) {
      const auto a = spec.action_index(name);
      if (!a) throw UnknownName("drop_actions names unknown action '" + name + "'");
      const auto& ids = spec.actions[*a].actor_index;
      if (std::find(ids.begin(), ids.end(), *who) == ids.end()) {
        throw UnknownName("actor '" + actor + "' does not perform action '" + name + "'");
      }
    }
  }
  for (const auto& name : r.drop_collisions) {
    if (!spec.collision_index(name)) throw UnknownName("drop_collisions names unknown collision '" + name + "'");
  }
}

namespace {

std::string fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string digest_spec(const GameSpec& spec) {
  GameSpec copy = spec;
  copy.provenance.reset();
  return fnv1a(serialize_game_spec(copy));
}

std::string digest_reduction(const ReductionSpec& r) { return fnv1a(serialize_reduction(r)); }

GameSpec apply_reduction(const GameSpec& spec, const ReductionSpec& r) {
  check_reduction(spec, r);
  const std::map<std::string, Value> frozen(r.freeze.begin(), r.freeze.end());
  const std::set<std::string> dropped_collisions(r.drop_collisions.begin(), r.drop_collisions.end());
  std::map<std::string, std::set<std::string>> dropped;  // action -> actors removed from it
  for (const auto& [actor, actions] : r.drop_actions) {
    for (const auto& a : actions) dropped[a].insert(actor);
  }

  // Expressions without frozen references are kept verbatim.
  auto subst = [&](const Expr& e) {
    bool touched = false;
    Expr m = map_refs(e, [&](const Expr& ref) -> Expr {
      if (auto it = frozen.find(ref.name()); it != frozen.end()) {
        touched = true;
        return Expr::integer(it->second);
      }
      return ref;
    });
    return touched ? fold(m) : e;
  };
  auto keep_writes = [&](const std::vector<Assignment>& ws) {
    std::vector<Assignment> out;
    for (const auto& w : ws) {
      if (!frozen.contains(w.target)) out.push_back({w.target, subst(w.value), -1});
    }
    return out;
  };

  GameSpec out;
  out.parameters = spec.parameters;
  for (const auto& a : spec.attributes) {
    if (!frozen.contains(a.name)) out.attributes.push_back(a);
  }

  for (const auto& a : spec.actions) {
    ActionDecl b;
    b.name = a.name;
    b.choices = a.choices;
    for (const auto& who : a.actors) {
      if (!dropped[a.name].contains(who)) b.actors.push_back(who);
    }
    b.writes = keep_writes(a.writes);
    if (b.actors.empty() || b.writes.empty()) continue;
    b.guard = subst(a.guard);
    out.actions.push_back(std::move(b));
  }

  for (const auto& c : spec.collisions) {
    if (dropped_collisions.contains(c.name)) continue;
    CollisionDecl d{c.name, subst(c.guard), keep_writes(c.writes)};
    if (d.writes.empty()) continue;
    out.collisions.push_back(std::move(d));
  }

  for (const auto& p : spec.propositions) out.propositions.push_back({p.name, subst(p.predicate)});

  for (const auto& v : spec.initial.vectors) {
    std::vector<Value> w;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!frozen.contains(spec.attributes[i].name)) w.push_back(v[i]);
    }
    if (std::find(out.initial.vectors.begin(), out.initial.vectors.end(), w) == out.initial.vectors.end()) {
      out.initial.vectors.push_back(std::move(w));
    }
  }
  for (const auto& c : spec.initial.constraints) {
    Expr f = subst(c);
    if (!f.identical_to(c) && f.op() == Op::Bool && f.literal()) continue;
    out.initial.constraints.push_back(std::move(f));
  }
  if (out.initial.vectors.empty() && out.initial.constraints.empty() && !spec.initial.constraints.empty()) {
    out.initial.constraints.push_back(Expr::boolean(true));
  }

  for (std::size_t i = 0; i < spec.actors.size(); ++i) {
    const auto& actor = spec.actors[i];
    auto performs = [&](const ActionDecl& a) { return std::find(a.actors.begin(), a.actors.end(), actor) != a.actors.end(); };
    const bool had = std::any_of(spec.actions.begin(), spec.actions.end(), performs);
    const bool has = std::any_of(out.actions.begin(), out.actions.end(), performs);
    if (had && !has) {
      const bool live = std::any_of(out.attributes.begin(), out.attributes.end(),
                                    [&](const AttributeDecl& a) { return a.owner == actor; });
      if (live) throw EmptyActorActions(actor);
      continue;
    }
    out.actors.push_back(actor);
  }

  out.defaults = spec.defaults;
  out.provenance = Provenance{digest_spec(spec), digest_reduction(r)};
  resolve_game(out);
  return out;
}

ReductionReport reduction_report(const GameSpec& before, const GameSpec& after, std::uint64_t state_cap) {
  ReductionReport rep;
  rep.domain_before = domain_product(before);
  rep.domain_after = domain_product(after);
  rep.log10_before = domain_product_log10(before);
  rep.log10_after = domain_product_log10(after);

  auto reach = [&](const GameSpec& s, std::optional<std::uint64_t>& count, std::string& note) {
    try {
      count = build_kripke(s, {state_cap, true}).size();
    } catch (const StateCapExceeded& e) {
      note = "over the state cap of " + std::to_string(e.cap()) + " (uncountable at desk scale)";
    } catch (const DomainTooLarge& e) {
      note = std::string(e.what()) + " (uncountable at desk scale)";
    }
  };
  reach(before, rep.reachable_before, rep.before_note);
  reach(after, rep.reachable_after, rep.after_note);

  for (const auto& a : before.attributes) {
    if (!after.attribute_index(a.name)) rep.removed.push_back("attribute " + a.name);
  }
  for (const auto& a : before.actions) {
    const auto j = after.action_index(a.name);
    if (!j) {
      rep.removed.push_back("action " + a.name);
      continue;
    }
    for (const auto& who : a.actors) {
      const auto& now = after.actions[*j].actors;
      if (std::find(now.begin(), now.end(), who) == now.end()) rep.removed.push_back("action " + a.name + " of " + who);
    }
  }
  for (const auto& c : before.collisions) {
    if (!after.collision_index(c.name)) rep.removed.push_back("collision " + c.name);
  }
  for (const auto& who : before.actors) {
    if (!after.actor_index(who)) rep.removed.push_back("actor " + who);
  }
  return rep;
}

std::string format_reduction_report(const ReductionReport& r) {
  auto size = [](const std::optional<std::uint64_t>& n, double log10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "about 10^%.1f", log10);
    return n ? std::to_string(*n) : std::string(buf) + " (over 64 bits)";
  };
  auto reach = [](const std::optional<std::uint64_t>& n, const std::string& note) {
    return n ? std::to_string(*n) : note;
  };
  std::string out;
  out += "domain product: " + size(r.domain_before, r.log10_before) + " -> " + size(r.domain_after, r.log10_after) + "\n";
  out += "reachable states: " + reach(r.reachable_before, r.before_note) + " -> " +
         reach(r.reachable_after, r.after_note) + "\n";
  out += "removed:";
  if (r.removed.empty()) out += " nothing";
  out += "\n";
  for (const auto& s : r.removed) out += "  " + s + "\n";
  return out;
}

}  // namespace gamecheck

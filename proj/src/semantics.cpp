#include "gamecheck/semantics.hpp"

#include <algorithm>

namespace gamecheck {

std::string format_state(const GameSpec& spec, std::span<const Value> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += spec.attributes[i].name + "=" + std::to_string(v[i]);
  }
  return out + ")";
}

std::string format_joint_action(const GameSpec& spec, const JointAction& j) {
  std::string out;
  for (const auto& p : j.picks) {
    if (!out.empty()) out += ' ';
    for (std::size_t k = 0; k < p.actors.size(); ++k) {
      if (k) out += '+';
      out += spec.actors[p.actors[k]];
    }
    const auto& a = spec.actions[p.action];
    out += ':' + a.name;
    if (!a.choices.empty()) {
      out += '(';
      for (std::size_t k = 0; k < a.choices.size(); ++k) {
        if (k) out += ',';
        out += a.choices[k].name + '=' + std::to_string(p.choices[k]);
      }
      out += ')';
    }
  }
  return out;
}

Stepper::Stepper(const GameSpec& spec) : spec_(&spec) {
  for (const auto& a : spec.actions) {
    guards_.push_back(Program::compile(a.guard));
    auto& w = writes_.emplace_back();
    for (const auto& asg : a.writes) w.push_back(Program::compile(asg.value));
  }
  for (const auto& c : spec.collisions) {
    collision_guards_.push_back(Program::compile(c.guard));
    auto& w = collision_writes_.emplace_back();
    for (const auto& asg : c.writes) w.push_back(Program::compile(asg.value));
  }
  for (const auto& p : spec.propositions) propositions_.push_back(Program::compile(p.predicate));
}

bool Stepper::guard(std::size_t action, std::span<const Value> v, std::span<const Value> choices) const {
  return guards_[action].run(EvalFrame{v, v, choices, nullptr}) != 0;
}

bool Stepper::proposition(std::size_t prop, std::span<const Value> v) const {
  return propositions_[prop].run(EvalFrame{v, v, {}, nullptr}) != 0;
}

void Stepper::compute_options(std::span<const Value> v, Scratch& s) const {
  const auto& spec = *spec_;
  s.choice_buf.clear();
  s.value_buf.clear();
  s.options.clear();
  s.per_actor.resize(spec.actors.size());
  for (auto& l : s.per_actor) l.clear();

  for (std::size_t ai = 0; ai < spec.actions.size(); ++ai) {
    const auto& a = spec.actions[ai];
    const std::size_t nc = a.choices.size();
    s.valuation.resize(nc);
    for (std::size_t k = 0; k < nc; ++k) s.valuation[k] = a.choices[k].lo;
    bool done = false;
    while (!done) {
      const EvalFrame frame{v, v, s.valuation, nullptr};
      if (guards_[ai].run(frame) != 0) {
        const int id = static_cast<int>(s.options.size());
        s.options.push_back({static_cast<int>(ai), s.choice_buf.size(), s.value_buf.size()});
        s.choice_buf.insert(s.choice_buf.end(), s.valuation.begin(), s.valuation.end());
        for (const auto& p : writes_[ai]) s.value_buf.push_back(p.run(frame));
        for (std::size_t actor : a.actor_index) s.per_actor[actor].push_back(id);
      }
      done = true;
      for (std::size_t k = nc; k-- > 0;) {
        if (s.valuation[k] < a.choices[k].hi) {
          ++s.valuation[k];
          done = false;
          break;
        }
        s.valuation[k] = a.choices[k].lo;
      }
    }
  }
}

std::size_t Stepper::expand(std::span<const Value> v, Scratch& s,
                            const std::function<void(const StepView&)>& visit) const {
  const auto& spec = *spec_;
  const std::size_t n = spec.actors.size();
  const std::size_t width = spec.attributes.size();
  for (const auto& l : s.per_actor) {
    if (l.empty()) return 0;
  }
  std::vector<std::size_t> idx(n, 0);
  s.pick.assign(n, 0);
  s.seen_option.assign(s.options.size(), 0);
  s.action_writer.resize(width);
  s.collision_writer.resize(width);
  std::size_t visited = 0;

  while (true) {
    for (std::size_t i = 0; i < n; ++i) s.pick[i] = s.per_actor[i][idx[i]];

    bool consistent = true;
    for (std::size_t i = 0; i < n && consistent; ++i) {
      const int o = s.pick[i];
      for (std::size_t j : spec.actions[s.options[o].action].actor_index) {
        if (s.pick[j] != o) {
          consistent = false;
          break;
        }
      }
    }

    if (consistent) {
      ++visited;
      StepView view;
      view.pick = s.pick;
      s.inter.assign(v.begin(), v.end());
      std::fill(s.action_writer.begin(), s.action_writer.end(), -1);
      for (std::size_t i = 0; i < n && view.status == StepStatus::Ok; ++i) {
        const int o = s.pick[i];
        if (s.seen_option[o]) continue;
        s.seen_option[o] = 1;
        const auto& opt = s.options[o];
        const auto& a = spec.actions[opt.action];
        for (std::size_t k = 0; k < a.writes.size(); ++k) {
          const int t = a.writes[k].index;
          const Value val = s.value_buf[opt.value_begin + k];
          if (s.action_writer[t] != -1) {
            view.status = StepStatus::ActionConflict;
            view.attribute = t;
            view.source = opt.action;
            view.other = s.action_writer[t];
            break;
          }
          if (!spec.attributes[t].contains(val)) {
            view.status = StepStatus::RangeViolation;
            view.attribute = t;
            view.source = opt.action;
            view.value = val;
            break;
          }
          s.inter[t] = val;
          s.action_writer[t] = opt.action;
        }
      }
      for (std::size_t i = 0; i < n; ++i) s.seen_option[s.pick[i]] = 0;

      if (view.status == StepStatus::Ok) {
        std::fill(s.collision_writer.begin(), s.collision_writer.end(), -1);
        s.pending.clear();
        s.pending_target.clear();
        int range_source = -1;
        int range_attribute = -1;
        Value range_value = 0;
        for (std::size_t c = 0; c < spec.collisions.size() && view.status == StepStatus::Ok; ++c) {
          const EvalFrame frame{s.inter, v, {}, nullptr};
          if (collision_guards_[c].run(frame) == 0) continue;
          const auto& col = spec.collisions[c];
          for (std::size_t k = 0; k < col.writes.size(); ++k) {
            const int t = col.writes[k].index;
            if (s.action_writer[t] != -1) continue;
            if (s.collision_writer[t] != -1) {
              view.status = StepStatus::CollisionConflict;
              view.attribute = t;
              view.source = static_cast<int>(c);
              view.other = s.collision_writer[t];
              view.source_is_collision = true;
              break;
            }
            const Value val = collision_writes_[c][k].run(frame);
            if (!spec.attributes[t].contains(val) && range_source < 0) {
              range_source = static_cast<int>(c);
              range_attribute = t;
              range_value = val;
            }
            s.pending.push_back(val);
            s.pending_target.push_back(t);
            s.collision_writer[t] = static_cast<int>(c);
          }
        }
        // A double write outranks an out-of-domain value found earlier in the scan.
        if (view.status == StepStatus::Ok && range_source >= 0) {
          view.status = StepStatus::RangeViolation;
          view.attribute = range_attribute;
          view.source = range_source;
          view.source_is_collision = true;
          view.value = range_value;
        }
        if (view.status == StepStatus::Ok) {
          s.next = s.inter;
          for (std::size_t k = 0; k < s.pending.size(); ++k) s.next[s.pending_target[k]] = s.pending[k];
          view.next = s.next;
        }
      }
      visit(view);
    }

    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < s.per_actor[i].size()) break;
      idx[i] = 0;
      if (i == 0) return visited;
    }
    if (n == 0) return visited;
  }
}

JointAction Stepper::joint_action(const Scratch& s, std::span<const int> pick) const {
  JointAction j;
  for (std::size_t i = 0; i < pick.size(); ++i) {
    const int o = pick[i];
    if (std::find(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(i), o) !=
        pick.begin() + static_cast<std::ptrdiff_t>(i)) {
      continue;
    }
    const auto& opt = s.options[o];
    const auto& a = spec_->actions[opt.action];
    ActionPick p;
    p.action = static_cast<std::size_t>(opt.action);
    p.choices.assign(s.choice_buf.begin() + static_cast<std::ptrdiff_t>(opt.choice_begin),
                     s.choice_buf.begin() + static_cast<std::ptrdiff_t>(opt.choice_begin + a.choices.size()));
    p.actors = a.actor_index;
    std::sort(p.actors.begin(), p.actors.end());
    j.picks.push_back(std::move(p));
  }
  return j;
}

void Stepper::raise(const StepView& view, std::span<const Value> v, const Scratch& s) const {
  const auto& spec = *spec_;
  const std::string where =
      " at state " + format_state(spec, v) + " under joint action " + format_joint_action(spec, joint_action(s, view.pick));
  const std::string attr = view.attribute >= 0 ? spec.attributes[view.attribute].name : "?";
  auto source_name = [&](int id, bool collision) {
    return collision ? "collision '" + spec.collisions[id].name + "'" : "action '" + spec.actions[id].name + "'";
  };
  switch (view.status) {
    case StepStatus::ActionConflict:
      throw ActionConflict(source_name(view.source, false) + " and " + source_name(view.other, false) +
                           " both write '" + attr + "'" + where);
    case StepStatus::CollisionConflict:
      throw CollisionConflict(source_name(view.source, true) + " and " + source_name(view.other, true) +
                              " both write '" + attr + "'" + where);
    case StepStatus::RangeViolation:
      throw RangeViolation(source_name(view.source, view.source_is_collision) + " writes " +
                           std::to_string(view.value) + " to '" + attr + "' outside [" +
                           std::to_string(spec.attributes[view.attribute].lo) + ", " +
                           std::to_string(spec.attributes[view.attribute].hi) + "]" + where);
    case StepStatus::Ok:
      break;
  }
  throw Error("Internal", "raise called on a successful step");
}

void Stepper::successors(std::span<const Value> v, Scratch& s,
                         const std::function<void(const JointAction&, std::span<const Value>)>& out) const {
  compute_options(v, s);
  expand(v, s, [&](const StepView& view) {
    if (view.status != StepStatus::Ok) raise(view, v, s);
    out(joint_action(s, view.pick), view.next);
  });
}

std::vector<Successor> Stepper::successors(std::span<const Value> v) const {
  Scratch s;
  std::vector<Successor> out;
  successors(v, s, [&](const JointAction& j, std::span<const Value> next) {
    out.push_back({j, std::vector<Value>(next.begin(), next.end())});
  });
  return out;
}

std::vector<AdmissibleAction> Stepper::admissible(std::size_t actor, std::span<const Value> v) const {
  Scratch s;
  compute_options(v, s);
  std::vector<AdmissibleAction> out;
  for (int o : s.per_actor[actor]) {
    const auto& opt = s.options[o];
    const auto nc = spec_->actions[opt.action].choices.size();
    out.push_back({static_cast<std::size_t>(opt.action),
                   std::vector<Value>(s.choice_buf.begin() + static_cast<std::ptrdiff_t>(opt.choice_begin),
                                      s.choice_buf.begin() + static_cast<std::ptrdiff_t>(opt.choice_begin + nc))});
  }
  return out;
}

std::vector<AdmissibleAction> admissible_actions(const GameSpec& spec, std::size_t actor, std::span<const Value> v) {
  return Stepper(spec).admissible(actor, v);
}

std::vector<AdmissibleAction> admissible_actions(const GameSpec& spec, std::string_view actor,
                                                 std::span<const Value> v) {
  const auto i = spec.actor_index(actor);
  if (!i) throw UnknownName("unknown actor '" + std::string(actor) + "'");
  return Stepper(spec).admissible(*i, v);
}

std::vector<Successor> successors(const GameSpec& spec, std::span<const Value> v) {
  return Stepper(spec).successors(v);
}

}  // namespace gamecheck

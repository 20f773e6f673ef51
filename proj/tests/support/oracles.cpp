#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "gamecheck/spec_io.hpp"
#include "gamecheck/validate.hpp"

#ifndef GAMECHECK_SOURCE_DIR
#define GAMECHECK_SOURCE_DIR "."
#endif

namespace gamecheck::testing {

std::filesystem::path source_dir() { return GAMECHECK_SOURCE_DIR; }
std::filesystem::path model_path(const std::string& name) { return source_dir() / "models" / name; }

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

struct ExprScope {
  std::vector<std::string> attrs;
  std::vector<std::string> choices;
  bool pre = false;
};

std::string gen_bool(std::mt19937_64& rng, const ExprScope& s, int depth);

std::string gen_int(std::mt19937_64& rng, const ExprScope& s, int depth) {
  if (depth <= 0 || coin(rng, 0.4)) {
    const int r = pick(rng, 0, 9);
    if (r < 5) return s.attrs[pick(rng, 0, static_cast<int>(s.attrs.size()) - 1)];
    if (r < 7) return std::to_string(pick(rng, 0, 3));
    if (r == 7) return "k";
    if (r == 8 && !s.choices.empty()) return s.choices[pick(rng, 0, static_cast<int>(s.choices.size()) - 1)];
    if (s.pre) return "pre(" + s.attrs[pick(rng, 0, static_cast<int>(s.attrs.size()) - 1)] + ")";
    return std::to_string(pick(rng, 0, 2));
  }
  const auto a = [&] { return gen_int(rng, s, depth - 1); };
  switch (pick(rng, 0, 9)) {
    case 0: return "(" + a() + " + " + a() + ")";
    case 1: return "(" + a() + " - " + a() + ")";
    case 2: return "(" + a() + " * " + a() + ")";
    case 3: return "min(" + a() + ", " + a() + ")";
    case 4: return "max(" + a() + ", " + a() + ")";
    case 5: return "abs(" + a() + ")";
    case 6: return "ite(" + gen_bool(rng, s, depth - 1) + ", " + a() + ", " + a() + ")";
    case 7: return "(" + a() + " div " + std::to_string(pick(rng, 2, 3)) + ")";
    case 8: return "(" + a() + " mod " + std::to_string(pick(rng, 2, 3)) + ")";
    default: return "-" + a();
  }
}

std::string gen_bool(std::mt19937_64& rng, const ExprScope& s, int depth) {
  static const char* cmp[] = {"<", "<=", "=", "!=", ">=", ">"};
  if (depth <= 0 || coin(rng, 0.5)) {
    if (coin(rng, 0.05)) return coin(rng) ? "true" : "false";
    return gen_int(rng, s, depth > 0 ? 1 : 0) + " " + cmp[pick(rng, 0, 5)] + " " + gen_int(rng, s, 0);
  }
  const auto b = [&] { return gen_bool(rng, s, depth - 1); };
  switch (pick(rng, 0, 3)) {
    case 0: return "!(" + b() + ")";
    case 1: return "(" + b() + " & " + b() + ")";
    case 2: return "(" + b() + " | " + b() + ")";
    default: return "(" + b() + " -> " + b() + ")";
  }
}

std::string in_range(std::mt19937_64& rng, const ExprScope& s, Value hi) {
  const int r = pick(rng, 0, 9);
  if (r < 5) return "clamp(" + gen_int(rng, s, 2) + ", 0, " + std::to_string(hi) + ")";
  if (r < 9) return "(" + gen_int(rng, s, 2) + ") mod " + std::to_string(hi + 1);
  return std::to_string(pick(rng, 0, static_cast<int>(hi)));
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

std::string random_game_yaml(std::mt19937_64& rng, const RandomGameOptions& opts) {
  const int na = pick(rng, 1, opts.max_actors);
  const int nattr = pick(rng, na, std::max(na, opts.max_attributes));
  std::vector<std::string> actors, attrs;
  std::vector<Value> hi;
  std::vector<int> owner;
  for (int i = 0; i < na; ++i) actors.push_back("u" + std::to_string(i));
  for (int i = 0; i < nattr; ++i) {
    attrs.push_back("x" + std::to_string(i));
    hi.push_back(pick(rng, 1, static_cast<int>(opts.max_hi)));
    owner.push_back(i < na ? i : pick(rng, 0, na - 1));
  }
  auto owned = [&](int actor) {
    std::vector<int> out;
    for (int i = 0; i < nattr; ++i) {
      if (owner[i] == actor) out.push_back(i);
    }
    return out;
  };

  std::ostringstream y;
  y << "actors: [";
  for (int i = 0; i < na; ++i) y << (i ? ", " : "") << actors[i];
  y << "]\nparameters:\n  - {name: k, value: " << pick(rng, 1, 2) << "}\nattributes:\n";
  for (int i = 0; i < nattr; ++i) {
    y << "  - {name: " << attrs[i] << ", owner: " << actors[owner[i]] << ", range: [0, " << hi[i] << "]}\n";
  }
  y << "actions:\n";
  ExprScope plain{attrs, {}, false};
  for (int a = 0; a < na; ++a) {
    const auto mine = owned(a);
    const int n = pick(rng, 1, 3);
    std::vector<std::string> guards;
    bool any_choice = false;
    for (int j = 0; j < n; ++j) {
      const bool choice = opts.choices && coin(rng, 0.3);
      any_choice = any_choice || choice;
      ExprScope s{attrs, choice ? std::vector<std::string>{"h"} : std::vector<std::string>{}, false};
      const std::string g = gen_bool(rng, s, 2);
      guards.push_back(g);
      y << "  - name: " << actors[a] << "_act" << j << "\n    actors: [" << actors[a] << "]\n";
      if (choice) y << "    choices: [{name: h, range: [-1, 1]}]\n";
      y << "    guard: " << quote(g) << "\n    writes:\n";
      std::vector<int> targets = mine;
      std::shuffle(targets.begin(), targets.end(), rng);
      targets.resize(static_cast<std::size_t>(pick(rng, 1, static_cast<int>(targets.size()))));
      std::sort(targets.begin(), targets.end());
      for (int t : targets) y << "      " << attrs[t] << ": " << quote(in_range(rng, s, hi[t])) << "\n";
    }
    std::string fallback = "true";
    if (!any_choice && coin(rng, 0.6)) {
      fallback = "!(";
      for (std::size_t j = 0; j < guards.size(); ++j) fallback += (j ? " | " : "") + std::string("(") + guards[j] + ")";
      fallback += ")";
    }
    y << "  - name: " << actors[a] << "_idle\n    actors: [" << actors[a] << "]\n    guard: " << quote(fallback)
      << "\n    writes:\n      " << attrs[mine[0]] << ": " << quote(attrs[mine[0]]) << "\n";
  }
  if (opts.shared && na >= 2 && coin(rng, 0.5)) {
    const int a = pick(rng, 0, na - 1);
    int b = pick(rng, 0, na - 2);
    if (b >= a) ++b;
    const bool choice = opts.choices && coin(rng, 0.5);
    ExprScope s{attrs, choice ? std::vector<std::string>{"h"} : std::vector<std::string>{}, false};
    y << "  - name: together\n    actors: [" << actors[std::min(a, b)] << ", " << actors[std::max(a, b)] << "]\n";
    if (choice) y << "    choices: [{name: h, range: [0, 1]}]\n";
    y << "    guard: " << quote(gen_bool(rng, s, 2)) << "\n    writes:\n";
    const int ta = owned(a)[0];
    const int tb = owned(b)[0];
    y << "      " << attrs[ta] << ": " << quote(in_range(rng, s, hi[ta])) << "\n";
    y << "      " << attrs[tb] << ": " << quote(in_range(rng, s, hi[tb])) << "\n";
  }
  if (opts.collisions) {
    const int nc = pick(rng, 0, 2);
    std::vector<int> targets(static_cast<std::size_t>(nattr));
    for (int i = 0; i < nattr; ++i) targets[i] = i;
    std::shuffle(targets.begin(), targets.end(), rng);
    if (nc) y << "collisions:\n";
    ExprScope s{attrs, {}, true};
    for (int c = 0; c < nc && c < nattr; ++c) {
      y << "  - name: fix" << c << "\n    guard: " << quote(gen_bool(rng, s, 1)) << "\n    writes:\n";
      y << "      " << attrs[targets[c]] << ": " << quote(in_range(rng, s, hi[targets[c]])) << "\n";
    }
  }
  y << "initial:\n";
  if (coin(rng)) {
    y << "  - {";
    for (int i = 0; i < nattr; ++i) y << (i ? ", " : "") << attrs[i] << ": " << pick(rng, 0, static_cast<int>(hi[i]));
    y << "}\n";
  } else {
    y << "  - " << quote(attrs[0] + " = " + std::to_string(pick(rng, 0, static_cast<int>(hi[0]))) + " & " +
                         gen_bool(rng, plain, 1))
      << "\n  - " << quote(attrs[0] + " = 0") << "\n";
  }
  y << "propositions:\n";
  for (int p = 0; p < 3; ++p) y << "  p" << p << ": " << quote(gen_bool(rng, plain, 2)) << "\n";
  return y.str();
}

GameSpec random_valid_game(std::mt19937_64& rng, std::size_t max_states, const RandomGameOptions& opts) {
  while (true) {
    GameSpec spec;
    try {
      spec = parse_game_spec(random_game_yaml(rng, opts));
      if (initial_vectors(spec).empty()) continue;
    } catch (const Error&) {
      continue;
    }
    const auto report = validate_game(spec);
    if (!report.ok() || !report.exhaustive) continue;
    try {
      build_kripke(spec, {max_states, false});
    } catch (const StateCapExceeded&) {
      continue;
    }
    return spec;
  }
}

std::string random_ctl(std::mt19937_64& rng, const std::vector<std::string>& props, int depth) {
  if (depth <= 0 || coin(rng, 0.15)) {
    if (coin(rng, 0.08)) return coin(rng) ? "true" : "false";
    return props[pick(rng, 0, static_cast<int>(props.size()) - 1)];
  }
  static const char* unary[] = {"EX", "AX", "EF", "AF", "EG", "AG", "!"};
  const int r = pick(rng, 0, 11);
  if (r < 7) return std::string(unary[r]) + " (" + random_ctl(rng, props, depth - 1) + ")";
  const std::string a = random_ctl(rng, props, depth - 1);
  const std::string b = random_ctl(rng, props, depth - 1);
  switch (r) {
    case 7: return "(" + a + " & " + b + ")";
    case 8: return "(" + a + " | " + b + ")";
    case 9: return "(" + a + " -> " + b + ")";
    case 10: return "E [ " + a + " U " + b + " ]";
    default: return "A [ " + a + " U " + b + " ]";
  }
}

std::vector<std::string> proposition_names(const GameSpec& spec) {
  std::vector<std::string> out;
  for (const auto& p : spec.propositions) out.push_back(p.name);
  return out;
}

Value eval_by_name(const Expr& e, const GameSpec& spec, const std::vector<Value>& state, const std::vector<Value>* pre,
                   const std::map<std::string, Value>* choices) {
  std::map<std::string, Value> env;
  for (std::size_t i = 0; i < spec.attributes.size(); ++i) {
    env[spec.attributes[i].name] = state[i];
    if (pre) env["pre(" + spec.attributes[i].name + ")"] = (*pre)[i];
  }
  for (const auto& p : spec.parameters) env[p.name] = p.value;
  if (choices) {
    for (const auto& [k, v] : *choices) env[k] = v;
  }
  const Expr unbound = map_refs(e, [](const Expr& r) { return r.is_pre() ? Expr::pre(r.name()) : Expr::ref(r.name()); });
  const Scalar s = eval_expr(unbound, env);
  if (const bool* b = std::get_if<bool>(&s)) return *b ? 1 : 0;
  return std::get<Value>(s);
}

namespace {

struct Option {
  std::size_t action;
  std::vector<Value> choices;
};

std::map<std::string, Value> choice_env(const ActionDecl& a, const std::vector<Value>& c) {
  std::map<std::string, Value> m;
  for (std::size_t i = 0; i < c.size(); ++i) m[a.choices[i].name] = c[i];
  return m;
}

// All choice valuations of an action, last choice varying fastest.
std::vector<std::vector<Value>> valuations(const ActionDecl& a) {
  std::vector<std::vector<Value>> out{{}};
  for (const auto& c : a.choices) {
    std::vector<std::vector<Value>> next;
    for (const auto& prefix : out) {
      for (Value x = c.lo; x <= c.hi; ++x) {
        auto v = prefix;
        v.push_back(x);
        next.push_back(v);
      }
    }
    out = next;
  }
  return out;
}

bool participates(const GameSpec& spec, const ActionDecl& a, std::size_t actor) {
  return std::find(a.actors.begin(), a.actors.end(), spec.actors[actor]) != a.actors.end();
}

std::vector<Option> options_of(const GameSpec& spec, std::size_t actor, const std::vector<Value>& v) {
  std::vector<Option> out;
  for (std::size_t ai = 0; ai < spec.actions.size(); ++ai) {
    const auto& a = spec.actions[ai];
    if (!participates(spec, a, actor)) continue;
    for (const auto& c : valuations(a)) {
      const auto env = choice_env(a, c);
      if (!a.guard || eval_by_name(a.guard, spec, v, nullptr, &env)) out.push_back({ai, c});
    }
  }
  return out;
}

std::size_t attr_index(const GameSpec& spec, const std::string& name) {
  for (std::size_t i = 0; i < spec.attributes.size(); ++i) {
    if (spec.attributes[i].name == name) return i;
  }
  throw Error("Oracle", "no attribute " + name);
}

// Enumerates consistent joint selections: one option per actor, every
// participant of a chosen action choosing the same option.
template <typename F>
void for_each_joint(const GameSpec& spec, const std::vector<std::vector<Option>>& opts, F&& f) {
  const std::size_t n = spec.actors.size();
  for (const auto& o : opts) {
    if (o.empty()) return;
  }
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const Option& oi = opts[i][idx[i]];
      for (std::size_t j = 0; j < n && ok; ++j) {
        if (!participates(spec, spec.actions[oi.action], j)) continue;
        const Option& oj = opts[j][idx[j]];
        ok = oj.action == oi.action && oj.choices == oi.choices;
      }
    }
    if (ok) {
      std::vector<const Option*> sel;
      for (std::size_t i = 0; i < n; ++i) sel.push_back(&opts[i][idx[i]]);
      f(sel);
    }
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < opts[i].size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

struct StepResult {
  bool action_clean = true;
  std::vector<Value> inter;
  std::vector<char> written;
};

StepResult action_phase(const GameSpec& spec, const std::vector<Value>& v, const std::vector<const Option*>& sel,
                        bool* range_fault) {
  StepResult r{true, v, std::vector<char>(v.size(), 0)};
  std::set<std::size_t> done;
  for (std::size_t i = 0; i < sel.size(); ++i) {
    const Option& o = *sel[i];
    if (!done.insert(o.action).second) continue;
    const auto& a = spec.actions[o.action];
    const auto env = choice_env(a, o.choices);
    for (const auto& w : a.writes) {
      const std::size_t t = attr_index(spec, w.target);
      const Value val = eval_by_name(w.value, spec, v, nullptr, &env);
      if (r.written[t]) r.action_clean = false;
      if (!spec.attributes[t].contains(val)) {
        r.action_clean = false;
        if (range_fault) *range_fault = true;
      }
      r.inter[t] = val;
      r.written[t] = 1;
    }
  }
  return r;
}

}  // namespace

std::vector<NaiveSuccessor> naive_successors(const GameSpec& spec, const std::vector<Value>& v) {
  std::vector<std::vector<Option>> opts;
  for (std::size_t i = 0; i < spec.actors.size(); ++i) opts.push_back(options_of(spec, i, v));
  std::vector<NaiveSuccessor> out;
  for_each_joint(spec, opts, [&](const std::vector<const Option*>& sel) {
    bool range_fault = false;
    StepResult r = action_phase(spec, v, sel, &range_fault);
    if (range_fault) throw Error("RangeViolation", "action write out of range");
    if (!r.action_clean) throw Error("ActionConflict", "two actions write one attribute");
    std::vector<Value> next = r.inter;
    std::vector<char> by_collision(v.size(), 0);
    for (const auto& c : spec.collisions) {
      if (c.guard && !eval_by_name(c.guard, spec, r.inter, &v)) continue;
      for (const auto& w : c.writes) {
        const std::size_t t = attr_index(spec, w.target);
        if (r.written[t]) continue;
        if (by_collision[t]) throw Error("CollisionConflict", "two collisions write " + w.target);
        by_collision[t] = 1;
        next[t] = eval_by_name(w.value, spec, r.inter, &v);
      }
    }
    for (std::size_t t = 0; t < next.size(); ++t) {
      if (!spec.attributes[t].contains(next[t])) throw Error("RangeViolation", "collision write out of range");
    }
    JointAction j;
    std::set<std::size_t> done;
    for (std::size_t i = 0; i < sel.size(); ++i) {
      if (!done.insert(sel[i]->action).second) continue;
      ActionPick p;
      p.action = sel[i]->action;
      p.choices = sel[i]->choices;
      for (std::size_t k = 0; k < spec.actors.size(); ++k) {
        if (participates(spec, spec.actions[p.action], k)) p.actors.push_back(k);
      }
      j.picks.push_back(p);
    }
    out.emplace_back(std::move(j), std::move(next));
  });
  return out;
}

std::set<std::vector<Value>> naive_reachable(const GameSpec& spec, std::size_t limit) {
  std::set<std::vector<Value>> seen;
  std::deque<std::vector<Value>> queue;
  for (const auto& v : initial_vectors(spec)) {
    if (seen.insert(v).second) queue.push_back(v);
  }
  while (!queue.empty() && seen.size() <= limit) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto& [j, w] : naive_successors(spec, v)) {
      if (seen.insert(w).second) queue.push_back(w);
    }
  }
  return seen;
}

std::vector<std::vector<Value>> all_vectors(const GameSpec& spec) {
  std::vector<std::vector<Value>> out{{}};
  for (const auto& a : spec.attributes) {
    std::vector<std::vector<Value>> next;
    for (const auto& prefix : out) {
      for (Value x = a.lo; x <= a.hi; ++x) {
        auto v = prefix;
        v.push_back(x);
        next.push_back(v);
      }
    }
    out = next;
  }
  return out;
}

std::set<std::string> naive_violation_kinds(const GameSpec& spec) {
  std::set<std::string> kinds;
  for (std::size_t i = 0; i < spec.actors.size(); ++i) {
    bool any = false;
    for (const auto& a : spec.actions) any = any || participates(spec, a, i);
    if (!any) kinds.insert("OP-COVERAGE");
  }
  for (const auto& v : all_vectors(spec)) {
    std::vector<std::vector<Option>> opts;
    bool covered = true;
    for (std::size_t i = 0; i < spec.actors.size(); ++i) {
      opts.push_back(options_of(spec, i, v));
      if (opts.back().empty()) {
        kinds.insert("OP-COVERAGE");
        covered = false;
      }
    }
    std::set<std::size_t> admissible;
    for (const auto& list : opts) {
      for (const auto& o : list) {
        admissible.insert(o.action);
        const auto& a = spec.actions[o.action];
        const auto env = choice_env(a, o.choices);
        for (const auto& w : a.writes) {
          if (!spec.attributes[attr_index(spec, w.target)].contains(eval_by_name(w.value, spec, v, nullptr, &env))) {
            kinds.insert("RANGE");
          }
        }
      }
    }
    for (auto x : admissible) {
      for (auto y : admissible) {
        if (x >= y) continue;
        const auto& a = spec.actions[x];
        const auto& b = spec.actions[y];
        bool disjoint = true;
        for (const auto& p : a.actors) {
          if (std::find(b.actors.begin(), b.actors.end(), p) != b.actors.end()) disjoint = false;
        }
        if (!disjoint) continue;
        for (const auto& wa : a.writes) {
          for (const auto& wb : b.writes) {
            if (wa.target == wb.target) kinds.insert("OP-CONFLICT");
          }
        }
      }
    }
    if (!covered) continue;
    bool any_joint = false;
    for_each_joint(spec, opts, [&](const std::vector<const Option*>& sel) {
      any_joint = true;
      StepResult r = action_phase(spec, v, sel, nullptr);
      if (!r.action_clean) return;
      std::vector<char> by_collision(v.size(), 0);
      for (const auto& c : spec.collisions) {
        if (c.guard && !eval_by_name(c.guard, spec, r.inter, &v)) continue;
        for (const auto& w : c.writes) {
          const std::size_t t = attr_index(spec, w.target);
          if (r.written[t]) continue;
          if (by_collision[t]) {
            kinds.insert("COLLISION-CONFLICT");
            continue;
          }
          by_collision[t] = 1;
          if (!spec.attributes[t].contains(eval_by_name(w.value, spec, r.inter, &v))) kinds.insert("RANGE");
        }
      }
    });
    if (!any_joint) kinds.insert("OP-COVERAGE");
  }
  return kinds;
}

std::string trace_problem(const KripkeGraph& g, const Trace& t) {
  if (t.steps.empty()) return "empty trace";
  if (std::find(g.initial.begin(), g.initial.end(), t.steps.front().state) == g.initial.end()) {
    return "trace does not start in an initial state";
  }
  for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (!s.joint) return "step " + std::to_string(i) + " has no joint action";
    const auto succ = naive_successors(g.spec, s.values);
    const JointAction& j = g.joint_actions[*s.joint];
    const bool found = std::any_of(succ.begin(), succ.end(), [&](const NaiveSuccessor& x) {
      return x.first == j && x.second == t.steps[i + 1].values;
    });
    if (!found) return "step " + std::to_string(i) + " is not a transition";
  }
  if (t.steps.back().joint) return "last step carries a joint action";
  const auto last = g.find(t.steps.back().values);
  if (!last || *last != t.steps.back().state) return "last state is not in the graph";
  const StateSet sat = g.size() <= kOracleStateLimit ? naive_check(g, t.target) : sat_set(g, t.target);
  const bool in = sat.test(*last);
  if (t.kind == Trace::Kind::Counterexample && in) return "counterexample ends inside the target set";
  if (t.kind == Trace::Kind::Witness && !in) return "witness ends outside the target set";
  return "";
}

}  // namespace gamecheck::testing

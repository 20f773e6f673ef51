#include "gamecheck/smv.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace gamecheck {

namespace {

bool valid_tag(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  });
}

std::string strip(std::string s) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') return s;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')' && --depth == 0 && i + 1 != s.size()) return s;
  }
  return s.substr(1, s.size() - 2);
}

const char* smv_op(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Implies: return "->";
    default: return "?";
  }
}

class Renderer {
 public:
  explicit Renderer(const std::function<std::string(const Expr&)>& ref) : ref_(ref) {}

  std::string operator()(const Expr& e) const {
    auto arg = [&](std::size_t i) { return (*this)(e.args()[i]); };
    switch (e.op()) {
      case Op::Int: return e.literal() < 0 ? "(" + std::to_string(e.literal()) + ")" : std::to_string(e.literal());
      case Op::Bool: return e.literal() ? "TRUE" : "FALSE";
      case Op::Ref:
        if (e.ref_kind() == RefKind::Parameter) return (*this)(Expr::integer(e.literal()));
        if (e.ref_kind() == RefKind::Choice) throw UnsupportedConstruct("unbound choice '" + e.name() + "'");
        return ref_(e);
      case Op::Neg: return "-" + wrap(arg(0));
      case Op::Not: return "!" + wrap(arg(0));
      case Op::Abs: {
        const auto a = arg(0);
        return "case " + a + " < 0 : -" + wrap(a) + "; TRUE : " + a + "; esac";
      }
      case Op::Min:
      case Op::Max: {
        const auto a = arg(0), b = arg(1);
        return "case " + a + (e.op() == Op::Min ? " <= " : " >= ") + b + " : " + a + "; TRUE : " + b + "; esac";
      }
      case Op::Ite: return "case " + strip(arg(0)) + " : " + strip(arg(1)) + "; TRUE : " + strip(arg(2)) + "; esac";
      case Op::Clamp: {
        const auto x = arg(0), lo = arg(1), hi = arg(2);
        return "case " + x + " < " + lo + " : " + lo + "; " + x + " > " + hi + " : " + hi + "; TRUE : " + x + "; esac";
      }
      case Op::Div:
      case Op::Mod: {
        const Expr& d = e.args()[1];
        Value b = 0;
        if (d.op() == Op::Int) b = d.literal();
        else if (d.op() == Op::Ref && d.ref_kind() == RefKind::Parameter) b = d.literal();
        else throw UnsupportedConstruct("div/mod with a non-constant divisor");
        const Value m = b < 0 ? -b : b;
        const auto a = arg(0);
        const std::string ms = std::to_string(m);
        const std::string emod = "((" + a + " mod " + ms + " + " + ms + ") mod " + ms + ")";
        if (e.op() == Op::Mod) return emod;
        const std::string q = "((" + a + " - " + emod + ") / " + ms + ")";
        return b < 0 ? "(-" + q + ")" : q;
      }
      default: return "(" + arg(0) + " " + smv_op(e.op()) + " " + arg(1) + ")";
    }
  }

 private:
  static std::string wrap(const std::string& s) {
    const bool atomic = std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
    if (atomic || (s.front() == '(' && strip(s) != s)) return s;
    return "(" + s + ")";
  }

  const std::function<std::string(const Expr&)>& ref_;
};

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " | ") + p;
  return out;
}

bool mentions_choice(const Expr& e) {
  bool found = false;
  visit_refs(e, [&](const Expr& r) { found = found || r.ref_kind() == RefKind::Choice; });
  return found;
}

// All valuations of an action's choices, lexicographic.
std::vector<std::vector<Value>> valuations(const ActionDecl& a) {
  std::vector<std::vector<Value>> out;
  std::vector<Value> v;
  for (const auto& c : a.choices) v.push_back(c.lo);
  while (true) {
    out.push_back(v);
    std::size_t k = v.size();
    while (k > 0) {
      --k;
      if (v[k] < a.choices[k].hi) {
        ++v[k];
        break;
      }
      v[k] = a.choices[k].lo;
      if (k == 0) return out;
    }
    if (v.empty()) return out;
  }
}

std::string plain_ref(const Expr& r) { return r.name(); }

std::string effect_text(const ActionDecl& a, std::span<const Value> c) {
  std::string out;
  for (const auto& w : a.writes) {
    if (!out.empty()) out += " & ";
    out += "next(" + w.target + ") = " + strip(smv_expr(specialise(w.value, c)));
  }
  return out;
}

struct ActionText {
  std::string guard;
  std::string effect;
  bool guard_in_effect = false;  // effect disjuncts already carry the guard
};

ActionText action_text(const ActionDecl& a) {
  ActionText t;
  const bool per_valuation = mentions_choice(a.guard);
  t.guard_in_effect = per_valuation;
  if (a.choices.empty()) {
    t.guard = strip(smv_expr(specialise(a.guard)));
    t.effect = effect_text(a, {});
    return t;
  }
  std::vector<std::string> guards, effects;
  bool always = false;
  for (const auto& c : valuations(a)) {
    const Expr g = specialise(a.guard, c);
    if (g.op() == Op::Bool && !g.literal()) continue;
    const std::string eff = effect_text(a, c);
    if (per_valuation) {
      const bool trivially = g.op() == Op::Bool;
      always = always || trivially;
      const std::string gs = strip(smv_expr(g));
      guards.push_back("(" + gs + ")");
      effects.push_back("(" + (trivially ? eff : gs + " & " + eff) + ")");
    } else {
      effects.push_back("(" + eff + ")");
    }
  }
  if (!per_valuation) {
    t.guard = strip(smv_expr(specialise(a.guard)));
  } else if (always) {
    t.guard = "TRUE";
  } else {
    t.guard = guards.empty() ? "FALSE" : guards.size() == 1 ? strip(guards[0]) : join(guards);
  }
  t.effect = effects.empty() ? "FALSE" : effects.size() == 1 ? strip(effects[0]) : join(effects);
  return t;
}

}  // namespace

std::string smv_expr(const Expr& e, const std::function<std::string(const Expr& ref)>& ref) {
  return Renderer(ref)(e);
}

std::string smv_expr(const Expr& e) {
  const std::function<std::string(const Expr&)> f = plain_ref;
  return smv_expr(e, f);
}

Expr specialise(const Expr& e, std::span<const Value> choices) {
  return fold(map_refs(e, [&](const Expr& r) -> Expr {
    if (r.ref_kind() == RefKind::Parameter) return Expr::integer(r.literal());
    if (r.ref_kind() == RefKind::Choice && static_cast<std::size_t>(r.slot()) < choices.size()) {
      return Expr::integer(choices[r.slot()]);
    }
    return r;
  }));
}

std::string smv_ctl(const CtlFormula& f) {
  switch (f.op()) {
    case CtlOp::True: return "TRUE";
    case CtlOp::False: return "FALSE";
    case CtlOp::Prop: return f.name();
    case CtlOp::Not: return "!" + smv_ctl(f.lhs());
    case CtlOp::And: return "(" + smv_ctl(f.lhs()) + " & " + smv_ctl(f.rhs()) + ")";
    case CtlOp::Or: return "(" + smv_ctl(f.lhs()) + " | " + smv_ctl(f.rhs()) + ")";
    case CtlOp::Implies: return "(" + smv_ctl(f.lhs()) + " -> " + smv_ctl(f.rhs()) + ")";
    case CtlOp::EX: return "EX " + smv_ctl(f.lhs());
    case CtlOp::AX: return "AX " + smv_ctl(f.lhs());
    case CtlOp::EF: return "EF " + smv_ctl(f.lhs());
    case CtlOp::AF: return "AF " + smv_ctl(f.lhs());
    case CtlOp::EG: return "EG " + smv_ctl(f.lhs());
    case CtlOp::AG: return "AG " + smv_ctl(f.lhs());
    case CtlOp::EU: return "E [ " + smv_ctl(f.lhs()) + " U " + smv_ctl(f.rhs()) + " ]";
    case CtlOp::AU: return "A [ " + smv_ctl(f.lhs()) + " U " + smv_ctl(f.rhs()) + " ]";
  }
  return "";
}

Bindings generate_bindings(const GameSpec& spec, std::vector<std::string>* diagnostics) {
  Bindings out;
  std::set<std::string> used;
  auto add = [&](const std::string& tag, const std::string& what, std::string text) {
    if (!valid_tag(tag)) {
      if (diagnostics) diagnostics->push_back("no tag for " + what + ": '" + tag + "' is not a valid tag identifier");
      return;
    }
    if (!used.insert(tag).second) throw NameCollision(tag);
    out[tag] = std::move(text);
  };
  for (const auto& a : spec.actions) {
    const auto t = action_text(a);
    // Tag text lands next to other operators in a template, so keep it one operand.
    const auto operand = [](const std::string& s) {
      const bool compound = s.find(" | ") != std::string::npos || s.find(" -> ") != std::string::npos;
      return compound ? "(" + s + ")" : s;
    };
    add(a.name + "_guard", "action '" + a.name + "'", operand(t.guard));
    add(a.name + "_effect", "action '" + a.name + "'", operand(t.effect));
  }
  for (const auto& p : spec.parameters) add(p.name, "parameter '" + p.name + "'", std::to_string(p.value));
  for (const auto& p : spec.propositions) {
    add(p.name, "proposition '" + p.name + "'", strip(smv_expr(specialise(p.predicate))));
  }
  return out;
}

SmvUnit emit_module(const GameSpec& spec, const std::vector<NamedProperty>& properties) {
  SmvUnit unit;
  std::string& s = unit.text;
  s += "MODULE main\n";
  s += "VAR\n";
  for (const auto& a : spec.attributes) {
    s += "  " + a.name + " : " + std::to_string(a.lo) + ".." + std::to_string(a.hi) + ";\n";
  }
  if (!spec.propositions.empty()) {
    s += "DEFINE\n";
    for (const auto& p : spec.propositions) s += "  " + p.name + " := " + strip(smv_expr(specialise(p.predicate))) + ";\n";
  }

  std::vector<std::string> init;
  for (const auto& v : spec.initial.vectors) {
    std::string c;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) c += " & ";
      c += spec.attributes[i].name + " = " + strip(smv_expr(Expr::integer(v[i])));
    }
    init.push_back(c.empty() ? "TRUE" : c);
  }
  if (!spec.initial.constraints.empty()) {
    std::string c;
    for (const auto& e : spec.initial.constraints) c += (c.empty() ? "" : " & ") + smv_expr(specialise(e));
    init.push_back(c);
  }
  s += "INIT\n";
  for (std::size_t i = 0; i < init.size(); ++i) {
    s += std::string(i ? "  | " : "  ") + (init.size() > 1 ? "(" + init[i] + ")" : init[i]) + "\n";
  }

  std::vector<ActionText> texts;
  for (const auto& a : spec.actions) texts.push_back(action_text(a));

  const std::size_t n = spec.actors.size();
  std::vector<std::vector<std::size_t>> options(n);
  for (std::size_t ai = 0; ai < spec.actions.size(); ++ai) {
    for (auto who : spec.actions[ai].actor_index) options[who].push_back(ai);
  }

  std::vector<std::string> patterns;
  std::vector<std::size_t> idx(n, 0);
  const bool any_empty = std::any_of(options.begin(), options.end(), [](const auto& o) { return o.empty(); });
  while (!any_empty) {
    std::vector<std::size_t> chosen;
    bool consistent = true;
    for (std::size_t i = 0; i < n && consistent; ++i) {
      const std::size_t ai = options[i][idx[i]];
      for (auto j : spec.actions[ai].actor_index) consistent = consistent && options[j][idx[j]] == ai;
      if (std::find(chosen.begin(), chosen.end(), ai) == chosen.end()) chosen.push_back(ai);
    }
    if (consistent) {
      std::vector<char> written(spec.attributes.size(), 0);
      std::vector<std::string> parts;
      for (auto ai : chosen) {
        const auto& t = texts[ai];
        if (!t.guard_in_effect && t.guard != "TRUE") parts.push_back(t.guard);
        parts.push_back(t.effect);
        for (const auto& w : spec.actions[ai].writes) written[w.index] = 1;
      }
      const std::function<std::string(const Expr&)> inter = [&](const Expr& r) {
        if (r.is_pre() || !written[r.slot()]) return r.name();
        return "next(" + r.name() + ")";
      };
      for (std::size_t t = 0; t < spec.attributes.size(); ++t) {
        if (written[t]) continue;
        const auto& name = spec.attributes[t].name;
        std::string cases;
        for (const auto& c : spec.collisions) {
          for (const auto& w : c.writes) {
            if (w.index != static_cast<int>(t)) continue;
            const Expr g = specialise(c.guard);
            if (g.op() == Op::Bool && !g.literal()) continue;
            cases += strip(smv_expr(g, inter)) + " : " + strip(smv_expr(specialise(w.value), inter)) + "; ";
          }
        }
        parts.push_back(cases.empty() ? "next(" + name + ") = " + name
                                      : "next(" + name + ") = case " + cases + "TRUE : " + name + "; esac");
      }
      std::string p;
      for (const auto& part : parts) {
        const bool compound = part.find(" | ") != std::string::npos || part.find(" -> ") != std::string::npos;
        p += (p.empty() ? "" : " & ") + (compound && parts.size() > 1 ? "(" + part + ")" : part);
      }
      patterns.push_back(p);
    }
    std::size_t i = n;
    bool done = true;
    while (i > 0) {
      --i;
      if (++idx[i] < options[i].size()) {
        done = false;
        break;
      }
      idx[i] = 0;
    }
    if (done) break;
  }
  s += "TRANS\n";
  if (patterns.empty()) s += "  FALSE\n";
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    s += std::string(i ? "  | " : "  ") + (patterns.size() > 1 ? "(" + patterns[i] + ")" : patterns[i]) + "\n";
  }
  for (const auto& p : properties) {
    s += "-- " + p.name + ": " + p.text + "\n";
    s += "CTLSPEC " + strip(smv_ctl(p.formula)) + "\n";
  }
  return unit;
}

SmvUnit compile_with_template(std::string_view tmpl, const GameSpec& spec, std::string_view testcase) {
  SmvUnit unit;
  unit.bindings = generate_bindings(spec, &unit.diagnostics);
  const Bindings defaults(spec.defaults.begin(), spec.defaults.end());
  unit.text = render_template(tmpl, unit.bindings, defaults);
  unit.text += testcase;
  return unit;
}

}  // namespace gamecheck

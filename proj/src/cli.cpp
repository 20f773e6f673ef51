#include "gamecheck/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "gamecheck/checker.hpp"
#include "gamecheck/kripke.hpp"
#include "gamecheck/reducer.hpp"
#include "gamecheck/smv.hpp"
#include "gamecheck/spec_io.hpp"
#include "gamecheck/validate.hpp"

namespace gamecheck {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string game;
  std::string props;
  std::string reduction;
  std::string templ;
  std::string testcase;
  std::string output;
  std::string trace_out;
  std::string dump;
  std::string format = "text";
  std::uint64_t max_states = kDefaultStateCap;
  std::uint64_t enum_cap = kDefaultEnumerationCap;
  std::uint64_t seed = 0;
  std::uint64_t steps = 10;
};

json state_json(const GameSpec& spec, std::span<const Value> v) {
  json o = json::object();
  for (std::size_t i = 0; i < v.size(); ++i) o[spec.attributes[i].name] = v[i];
  return o;
}

json trace_json(const KripkeGraph& g, const std::string& name, const Trace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json step = {{"state", s.state}, {"values", state_json(g.spec, s.values)}};
    if (s.joint) step["joint_action"] = format_joint_action(g.spec, g.joint_actions[*s.joint]);
    steps.push_back(step);
  }
  return {{"property", name},
          {"kind", t.kind == Trace::Kind::Counterexample ? "counterexample" : "witness"},
          {"target", to_string(t.target)},
          {"steps", steps}};
}

std::string trace_text(const KripkeGraph& g, const std::string& name, const Trace& t) {
  std::string out = "# " + name + " " + (t.kind == Trace::Kind::Counterexample ? "counterexample" : "witness") +
                    " for " + to_string(t.target) + "\n";
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    out += std::to_string(i) + "\t" + format_state(g.spec, s.values) + "\n";
    if (s.joint) out += "\t-> " + format_joint_action(g.spec, g.joint_actions[*s.joint]) + "\n";
  }
  return out;
}

void emit(std::ostream& out, const Options& o, const std::string& text) {
  if (o.output.empty()) {
    out << text;
  } else {
    write_file(o.output, text);
  }
}

int cmd_validate(const Options& o, std::ostream& out) {
  const GameSpec spec = load_game_spec(o.game);
  ValidateOptions vo;
  vo.cap = o.enum_cap;
  const auto report = validate_game(spec, vo);
  if (o.format == "json") {
    json vs = json::array();
    for (const auto& v : report.violations) {
      json j = {{"kind", kind_name(v.kind)}, {"subject", v.subject}, {"message", v.message}, {"occurrences", v.occurrences}};
      if (v.witness) j["witness"] = state_json(spec, *v.witness);
      vs.push_back(j);
    }
    json doc = {{"ok", report.ok()}, {"exhaustive", report.exhaustive}, {"vectors_checked", report.vectors_checked},
                {"violations", vs}};
    if (!report.exhaustive) doc["skipped"] = report.skipped_reason;
    out << doc.dump(2) << "\n";
  } else {
    out << format_report(spec, report);
  }
  return report.ok() ? kExitOk : kExitFailed;
}

int cmd_check(const Options& o, std::ostream& out) {
  const GameSpec spec = load_game_spec(o.game);
  const auto props = load_properties(o.props, spec);
  const KripkeGraph g = build_kripke(spec, {o.max_states, true});
  bool all = true;
  json verdicts = json::array();
  json traces = json::array();
  std::string trace_file;
  for (const auto& p : props) {
    const Verdict v = check(g, p.formula);
    all = all && v.holds;
    if (o.format == "json") {
      json j = {{"name", p.name}, {"formula", p.text}, {"holds", v.holds}, {"sat_count", v.sat_count}};
      if (v.trace) j["trace"] = trace_json(g, p.name, *v.trace);
      verdicts.push_back(j);
    } else {
      out << p.name << ": " << (v.holds ? "holds" : "FAILS") << "  (" << p.text << "; " << v.sat_count << " of "
          << g.size() << " states)\n";
      if (v.trace) {
        out << "  " << (v.trace->kind == Trace::Kind::Counterexample ? "counterexample" : "witness") << " of "
            << v.trace->steps.size() << " states, last " << format_state(spec, v.trace->steps.back().values) << "\n";
      }
    }
    if (v.trace) {
      traces.push_back(trace_json(g, p.name, *v.trace));
      trace_file += trace_text(g, p.name, *v.trace);
    }
  }
  if (o.format == "json") {
    out << json{{"states", g.size()}, {"all_hold", all}, {"verdicts", verdicts}}.dump(2) << "\n";
  }
  if (!o.trace_out.empty()) write_file(o.trace_out, o.format == "json" ? traces.dump(2) + "\n" : trace_file);
  return all ? kExitOk : kExitFailed;
}

int cmd_reduce(const Options& o, std::ostream& out, std::ostream& err) {
  const GameSpec spec = load_game_spec(o.game);
  const ReductionSpec r = load_reduction(o.reduction, spec);
  const GameSpec reduced = apply_reduction(spec, r);
  const std::string text = serialize_game_spec(reduced);
  if (o.output.empty()) {
    out << text;
  } else {
    write_file(o.output, text);
    const auto rep = reduction_report(spec, reduced, o.max_states);
    if (o.format == "json") {
      json j = {{"domain_before", rep.domain_before ? json(*rep.domain_before) : json(nullptr)},
                {"domain_after", rep.domain_after ? json(*rep.domain_after) : json(nullptr)},
                {"log10_domain_before", rep.log10_before},
                {"log10_domain_after", rep.log10_after},
                {"reachable_before", rep.reachable_before ? json(*rep.reachable_before) : json(rep.before_note)},
                {"reachable_after", rep.reachable_after ? json(*rep.reachable_after) : json(rep.after_note)},
                {"removed", rep.removed},
                {"warning", kReductionWarning}};
      out << j.dump(2) << "\n";
    } else {
      out << format_reduction_report(rep);
    }
  }
  err << kReductionWarning << "\n";
  return kExitOk;
}

int cmd_emit(const Options& o, std::ostream& out, std::ostream& err) {
  const GameSpec spec = load_game_spec(o.game);
  SmvUnit unit;
  if (!o.templ.empty()) {
    unit = compile_with_template(read_file(o.templ), spec, o.testcase.empty() ? "" : read_file(o.testcase));
  } else {
    std::vector<NamedProperty> props;
    if (!o.props.empty()) props = load_properties(o.props, spec);
    unit = emit_module(spec, props);
  }
  for (const auto& d : unit.diagnostics) err << "note: " << d << "\n";
  emit(out, o, unit.text);
  return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const GameSpec spec = load_game_spec(o.game);
  const KripkeGraph g = build_kripke(spec, {o.max_states, true});
  const GraphStats st = stats(g);
  if (o.format == "json") {
    json props = json::object();
    for (const auto& [name, n] : st.proposition_counts) props[name] = n;
    out << json{{"states", st.states},
                {"transitions", st.transitions},
                {"edges", st.edges},
                {"initial", st.initial},
                {"joint_actions", st.joint_actions},
                {"max_out_degree", st.max_out_degree},
                {"propositions", props}}
               .dump(2)
        << "\n";
  } else {
    out << "states: " << st.states << "\n"
        << "transitions: " << st.transitions << "\n"
        << "edges: " << st.edges << "\n"
        << "initial: " << st.initial << "\n"
        << "joint actions: " << st.joint_actions << "\n"
        << "max out-degree: " << st.max_out_degree << "\n";
    for (const auto& [name, n] : st.proposition_counts) out << "prop " << name << ": " << n << "\n";
  }
  if (!o.dump.empty()) {
    std::ofstream f(o.dump);
    if (!f) throw Error("IOError", "cannot write '" + o.dump + "'");
    dump_graph(g, f);
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const GameSpec spec = load_game_spec(o.game);
  const Stepper stepper(spec);
  std::mt19937_64 rng(o.seed);
  auto v = initial_vectors(spec).front();
  json steps = json::array();
  std::string text = "# simulate seed=" + std::to_string(o.seed) + " steps=" + std::to_string(o.steps) +
                     " prng=mt19937_64\n";
  for (std::uint64_t i = 0;; ++i) {
    json step = {{"step", i}, {"values", state_json(spec, v)}};
    text += std::to_string(i) + "\t" + format_state(spec, v) + "\n";
    if (i == o.steps) {
      steps.push_back(step);
      break;
    }
    const auto succ = stepper.successors(v);
    if (succ.empty()) {
      steps.push_back(step);
      text += "# deadlock\n";
      break;
    }
    const auto& pick = succ[rng() % succ.size()];
    const std::string joint = format_joint_action(spec, pick.joint);
    step["joint_action"] = joint;
    text += "\t-> " + joint + "\n";
    steps.push_back(step);
    v = pick.state;
  }
  if (o.format == "json") {
    out << json{{"seed", o.seed}, {"prng", "mt19937_64"}, {"steps", steps}}.dump(2) << "\n";
  } else {
    out << text;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gamecheck: model checking for multiplayer game specifications", "gamecheck"};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* c) { c->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"})); };
  auto add_cap = [&](CLI::App* c) { c->add_option("--max-states", o.max_states, "reachable state cap")->check(CLI::PositiveNumber); };

  auto* validate = app.add_subcommand("validate", "check the operator conditions of a game");
  validate->add_option("game", o.game)->required()->check(CLI::ExistingFile);
  validate->add_option("--enum-cap", o.enum_cap, "largest |V| enumerated exhaustively")->check(CLI::PositiveNumber);
  add_format(validate);

  auto* checkc = app.add_subcommand("check", "check CTL properties");
  checkc->add_option("game", o.game)->required()->check(CLI::ExistingFile);
  checkc->add_option("--props", o.props, "property file")->required()->check(CLI::ExistingFile);
  checkc->add_option("--trace-out", o.trace_out, "write witnesses and counterexamples here");
  add_cap(checkc);
  add_format(checkc);

  auto* reduce = app.add_subcommand("reduce", "apply a reduction file");
  reduce->add_option("game", o.game)->required()->check(CLI::ExistingFile);
  reduce->add_option("--reduction", o.reduction, "reduction file")->required()->check(CLI::ExistingFile);
  reduce->add_option("-o", o.output, "output game file");
  add_cap(reduce);
  add_format(reduce);

  auto* emitc = app.add_subcommand("emit-smv", "generate SMV source");
  emitc->add_option("game", o.game)->required()->check(CLI::ExistingFile);
  emitc->add_option("--props", o.props, "property file")->check(CLI::ExistingFile);
  emitc->add_option("--template", o.templ, "template with @tags@")->check(CLI::ExistingFile);
  emitc->add_option("--testcase", o.testcase, "test case appended to the rendered template")->check(CLI::ExistingFile);
  emitc->add_option("-o", o.output, "output file");

  auto* statsc = app.add_subcommand("stats", "build the reachable graph and print its size");
  statsc->add_option("game", o.game)->required()->check(CLI::ExistingFile);
  statsc->add_option("--dump", o.dump, "write the graph as text");
  add_cap(statsc);
  add_format(statsc);

  auto* sim = app.add_subcommand("simulate", "seeded random walk");
  sim->add_option("game", o.game)->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", o.seed, "PRNG seed");
  sim->add_option("--steps", o.steps, "number of steps");
  add_format(sim);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!o.testcase.empty() && o.templ.empty()) {
    err << "error: --testcase needs --template\n";
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (checkc->parsed()) return cmd_check(o, out);
    if (reduce->parsed()) return cmd_reduce(o, out, err);
    if (emitc->parsed()) return cmd_emit(o, out, err);
    if (statsc->parsed()) return cmd_stats(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
  } catch (const StateCapExceeded& e) {
    err << "error: " << e.what() << "\n"
        << "the state space is too large: apply a reduction (gamecheck reduce) or raise --max-states\n";
    return kExitStateCap;
  } catch (const DomainTooLarge& e) {
    err << "error: " << e.what() << "\n"
        << "the state space is too large: apply a reduction (gamecheck reduce)\n";
    return kExitStateCap;
  } catch (const InputError& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    const bool input = e.code() == "IOError" || e.code() == "UnresolvedTag" || e.code() == "UnbalancedTagDelimiter" ||
                       e.code() == "InvalidTagIdentifier" || e.code() == "FrozenOutOfDomain" ||
                       e.code() == "EmptyActorActions" || e.code() == "MalformedExpression" ||
                       e.code() == "NameCollision" || e.code() == "UnsupportedConstruct";
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return input ? kExitUsage : kExitFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace gamecheck

#include <doctest.h>

#include <random>

#include "gamecheck/checker.hpp"
#include "gamecheck/spec_io.hpp"
#include "oracles.hpp"

using namespace gamecheck;
using namespace gamecheck::testing;

namespace {

// s0 -> s1, s1 -> s1; p holds at s1 only.
const char* kTwoState = R"yaml(
actors: [a]
attributes:
  - {name: x, owner: a, range: [0, 1]}
actions:
  - {name: go, actors: [a], guard: "true", writes: {x: "1"}}
initial:
  - {x: 0}
propositions:
  p: "x = 1"
  q: "x = 0"
)yaml";

StateSet ids(std::size_t n, std::initializer_list<std::size_t> members) {
  StateSet s(n, false);
  for (auto m : members) s.set(m);
  return s;
}

// Up to 50 states: x' = (a*x + b*c + d) mod 50 for a choice c.
GameSpec modular_graph(std::mt19937_64& rng) {
  const auto r = [&](int n) { return std::to_string(rng() % static_cast<unsigned>(n)); };
  std::string doc = "actors: [a]\nattributes:\n  - {name: x, owner: a, range: [0, 49]}\nactions:\n"
                    "  - name: jump\n    actors: [a]\n    choices: [{name: c, range: [0, " + r(3) + "]}]\n"
                    "    guard: \"true\"\n    writes: {x: \"(" + r(9) + " * x + " + r(17) + " * c + " + r(50) +
                    ") mod 50\"}\ninitial:\n  - {x: " + r(50) + "}\npropositions:\n";
  for (int p = 0; p < 3; ++p) {
    doc += "  p" + std::to_string(p) + ": \"(x * " + r(11) + " + " + r(7) + ") mod " + std::to_string(2 + p) + " = 0\"\n";
  }
  return parse_game_spec(doc);
}

}  // namespace

TEST_CASE("formula parsing") {
  const std::vector<std::string> props{"a", "b", "dead1", "dead2"};
  const CtlFormula f = parse_ctl("AG EF (dead1 | dead2)", props);
  CHECK(f.op() == CtlOp::AG);
  CHECK(f.lhs().op() == CtlOp::EF);
  CHECK(f.lhs().lhs().op() == CtlOp::Or);
  CHECK(f.lhs().lhs().lhs().name() == "dead1");
  CHECK(f.lhs().lhs().rhs().index() == 3);
  const CtlFormula u = parse_ctl("E [ a U b ]", props);
  CHECK(u.op() == CtlOp::EU);
  CHECK(u.lhs().name() == "a");
  CHECK(u.rhs().name() == "b");
  const CtlFormula g = parse_ctl("AG !dead2", props);
  CHECK(g == CtlFormula::unary(CtlOp::AG, CtlFormula::unary(CtlOp::Not, CtlFormula::prop("dead2", 3))));
  CHECK(parse_ctl("a -> b -> a", props) == parse_ctl("a -> (b -> a)", props));
  CHECK(parse_ctl("!a & b | a", props) == parse_ctl("((!a) & b) | a", props));
  CHECK(parse_ctl("EX a & b", props) == parse_ctl("(EX a) & b", props));
  CHECK(parse_ctl(to_string(parse_ctl("A [ !a U EG (a | b) ] -> AX true", props)), props) ==
        parse_ctl("A [ !a U EG (a | b) ] -> AX true", props));
  CHECK(thrown_code([&] { parse_ctl("AG (a", props); }) == "MalformedFormula");
  CHECK(thrown_code([&] { parse_ctl("E [ a b ]", props); }) == "MalformedFormula");
  CHECK(thrown_code([&] { parse_ctl("EF c", props); }) == "UnknownProposition");
  CHECK(temporal_depth(parse_ctl("AG EF (a & EX b)", props)) == 3);
}

TEST_CASE("two-state fixpoints") {
  const GameSpec spec = parse_game_spec(kTwoState);
  const KripkeGraph g = build_kripke(spec);
  REQUIRE(g.size() == 2);
  const auto sat = [&](const char* t) { return sat_set(g, parse_ctl(t, spec)); };
  CHECK(sat("true") == g.all());
  CHECK(sat("false") == ids(2, {}));
  CHECK(sat("EF p") == ids(2, {0, 1}));
  CHECK(sat("EG p") == ids(2, {1}));
  CHECK(sat("AG p") == ids(2, {1}));
  CHECK(sat("EX q") == ids(2, {}));
  CHECK(sat("A [ q U p ]") == ids(2, {0, 1}));
  CHECK(sat("AF q") == ids(2, {0}));
  for (const char* t : {"EF p", "EG p", "AG p", "EX q", "AX p", "E [ q U p ]", "A [ q U p ]", "AF q", "EG q"}) {
    CHECK(sat(t) == naive_check(g, parse_ctl(t, spec)));
  }
}

TEST_CASE("basis rewriting") {
  const std::vector<std::string> props{"a", "b"};
  const CtlFormula f = to_basis(parse_ctl("AG a | AF b | A [ a U b ] | AX a | EF b | a -> b", props));
  std::function<void(const CtlFormula&)> walk = [&](const CtlFormula& x) {
    const CtlOp op = x.op();
    REQUIRE((op == CtlOp::True || op == CtlOp::Prop || op == CtlOp::Not || op == CtlOp::And || op == CtlOp::EX ||
             op == CtlOp::EU || op == CtlOp::EG));
    if (op == CtlOp::Not || op == CtlOp::EX || op == CtlOp::EG) walk(x.lhs());
    if (op == CtlOp::And || op == CtlOp::EU) {
      walk(x.lhs());
      walk(x.rhs());
    }
  };
  walk(f);
}

TEST_CASE("verdicts and traces") {
  SUBCASE("penguin properties") {
    const GameSpec spec = load_game_spec(model_path("penguin_reduced.yaml"));
    const KripkeGraph g = build_kripke(spec);
    const Verdict ef = check(g, parse_ctl("EF dead1", spec));
    CHECK(ef.holds);
    REQUIRE(ef.trace);
    CHECK(ef.trace->kind == Trace::Kind::Witness);
    CHECK(trace_problem(g, *ef.trace).empty());
    const Verdict safe = check(g, parse_ctl("AG !dead2", spec));
    CHECK(safe.holds);
    CHECK(!safe.trace);
    CHECK(safe.sat_count == g.size());
    const Verdict p3 = check(g, parse_ctl("AG EF (collide12 & collide21)", spec));
    CHECK(!p3.holds);
    REQUIRE(p3.trace);
    CHECK(p3.trace->kind == Trace::Kind::Counterexample);
    CHECK(p3.trace->target == parse_ctl("EF (collide12 & collide21)", spec));
    CHECK(p3.trace->steps.back().values[*spec.attribute_index("pg1_dead")] == 1);
    CHECK(trace_problem(g, *p3.trace).empty());
    CHECK(replay_trace(g, *p3.trace).empty());
  }
  SUBCASE("unreachable proposition") {
    const GameSpec spec = load_game_spec(model_path("stay_only.yaml"));
    const KripkeGraph g = build_kripke(spec);
    const Verdict v = check(g, parse_ctl("EF !p", spec));
    CHECK(!v.holds);
    CHECK(!v.trace);
    CHECK(check(g, parse_ctl("AG p", spec)).holds);
  }
  SUBCASE("shortest counterexample") {
    const GameSpec spec = parse_game_spec(R"yaml(
actors: [c]
attributes:
  - {name: n, owner: c, range: [0, 5]}
actions:
  - {name: tick, actors: [c], guard: "true", writes: {n: "min(n + 1, 5)"}}
initial:
  - {n: 0}
propositions:
  low: "n < 3"
)yaml");
    const KripkeGraph g = build_kripke(spec);
    const Verdict v = check(g, parse_ctl("AG low", spec));
    REQUIRE(v.trace);
    CHECK(v.trace->steps.size() == 4);
    CHECK(!v.trace->steps.back().joint);
    CHECK(v.trace->steps.back().values == std::vector<Value>{3});
    Trace broken = *v.trace;
    broken.steps[1].values = {2};
    broken.steps[1].state = *g.find(std::vector<Value>{2});
    CHECK(!replay_trace(g, broken).empty());
  }
}

TEST_CASE("naive checker limits") {
  const GameSpec spec = parse_game_spec(R"yaml(
actors: [c]
attributes:
  - {name: n, owner: c, range: [0, 2999]}
actions:
  - {name: tick, actors: [c], guard: "true", writes: {n: "(n + 1) mod 3000"}}
initial:
  - {n: 0}
propositions:
  z: "n = 0"
)yaml");
  const KripkeGraph g = build_kripke(spec);
  CHECK(thrown_code([&] { naive_check(g, parse_ctl("EF z", spec)); }) == "OracleScaleExceeded");
  CHECK(sat_set(g, parse_ctl("AG EF z", spec)) == g.all());
}

TEST_CASE("random small graphs against the naive checker") {
  std::mt19937_64 rng(50);
  std::size_t formulas = 0;
  for (int i = 0; i < 40; ++i) {
    const GameSpec spec = modular_graph(rng);
    const KripkeGraph g = build_kripke(spec);
    for (int k = 0; k < 5; ++k) {
      const CtlFormula f = parse_ctl(random_ctl(rng, proposition_names(spec), 4), spec);
      REQUIRE(sat_set(g, f) == naive_check(g, f));
      const Verdict v = check(g, f);
      if (v.trace) REQUIRE(trace_problem(g, *v.trace).empty());
      ++formulas;
    }
  }
  CHECK(formulas == 200);
}

TEST_CASE("checker properties on random specs") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 30; ++i) {
    const GameSpec spec = random_valid_game(rng, 300);
    const KripkeGraph g = build_kripke(spec);
    const auto props = proposition_names(spec);
    for (int k = 0; k < 4; ++k) {
      const std::string phi = random_ctl(rng, props, 3);
      const std::string chi = random_ctl(rng, props, 2);
      const CtlFormula f = parse_ctl(phi, spec);
      const StateSet s = sat_set(g, f);
      CHECK(sat_set(g, f) == s);
      const StateSet ag = sat_set(g, parse_ctl("AG (" + phi + ")", spec));
      const StateSet ef_not = sat_set(g, parse_ctl("EF !(" + phi + ")", spec));
      for (std::size_t x = 0; x < g.size(); ++x) REQUIRE(ag.test(x) != ef_not.test(x));
      const StateSet narrow = sat_set(g, parse_ctl("EF ((" + phi + ") & (" + chi + "))", spec));
      const StateSet wide = sat_set(g, parse_ctl("EF (" + phi + ")", spec));
      for (std::size_t x = 0; x < g.size(); ++x) REQUIRE((!narrow.test(x) || wide.test(x)));
      const Verdict v = check(g, f);
      bool all_initial = true;
      for (StateId s0 : g.initial) all_initial = all_initial && s.test(s0);
      CHECK(v.holds == all_initial);
      CHECK(v.sat_count == s.count());
      CHECK(ex_image(g, s) == ex_image_serial(g, s));
    }
  }
}

#include <doctest.h>

#include <random>

#include "gamecheck/domain.hpp"
#include "gamecheck/expr_parser.hpp"
#include "gamecheck/semantics.hpp"
#include "gamecheck/spec_io.hpp"
#include "gamecheck/validate.hpp"
#include "oracles.hpp"

using namespace gamecheck;
using namespace gamecheck::testing;

namespace {

Value int_of(const std::string& text, const Env& env = {}) {
  return std::get<Value>(eval_expr(parse_expression(text), env));
}

const char* kMover = R"yaml(
actors: [p]
attributes:
  - {name: x, owner: p, range: [0, 8]}
actions:
  - name: Move
    actors: [p]
    choices: [{name: dx, range: [-1, 1]}]
    guard: "0 <= x + dx & x + dx <= 8"
    writes: {x: "x + dx"}
  - name: Stay
    actors: [p]
    guard: "x = 8"
    writes: {x: "x"}
initial:
  - {x: 0}
)yaml";

}  // namespace

TEST_CASE("literal arithmetic") {
  CHECK(int_of("2+3*4") == 14);
  CHECK(int_of("ite(x > 0, x, -x)", {{"x", -5}}) == 5);
  CHECK(int_of("(d + 90) mod 360", {{"d", 315}}) == 45);
}

TEST_CASE("heading rotation matches a straight-line table") {
  const Expr e = parse_expression("(d + 90) mod 360");
  for (Value d = 0; d < 360; ++d) {
    const Value expect = d + 90 < 360 ? d + 90 : d + 90 - 360;
    REQUIRE(std::get<Value>(eval_expr(e, {{"d", d}})) == expect);
  }
}

TEST_CASE("euclidean division identity") {
  for (Value a = -100; a <= 100; ++a) {
    for (Value b = -10; b <= 10; ++b) {
      if (b == 0) continue;
      const Value q = int_of("a div b", {{"a", a}, {"b", b}});
      const Value r = int_of("a mod b", {{"a", a}, {"b", b}});
      REQUIRE(q * b + r == a);
      REQUIRE(r >= 0);
      REQUIRE(r < (b < 0 ? -b : b));
    }
  }
  CHECK(int_of("-7 div 2") == -4);
  CHECK(int_of("-7 mod 2") == 1);
}

TEST_CASE("evaluation errors") {
  CHECK(thrown_code([] { int_of("y + 1"); }) == "UnboundName");
  CHECK(thrown_code([] { int_of("4 div z", {{"z", 0}}); }) == "DivisionByZero");
  CHECK(thrown_code([] { int_of("9223372036854775807 + x", {{"x", 1}}); }) == "ArithmeticOverflow");
  CHECK(thrown_code([] { parse_expression("x mod 0"); }) == "MalformedExpression");
  CHECK(thrown_code([] { parse_expression("1 + (x > 2)"); }) == "MalformedExpression");
}

TEST_CASE("lazy connectives guard a division") {
  CHECK(std::get<bool>(eval_expr(parse_expression("z != 0 & 4 div z = 1"), {{"z", 0}})) == false);
  CHECK(int_of("ite(z = 0, 0, 4 div z)", {{"z", 0}}) == 0);
}

TEST_CASE("tree and stack evaluators agree") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> texts{
      "clamp(x * 3 - y, 0, 5)", "min(x, y) + max(x, -y) * abs(x - y)", "ite(x > y | x = 0, x div 3, y mod 4)",
      "!(x < y) -> x >= 2", "-(x + y) div 2 + pre(x)"};
  for (const auto& t : texts) {
    const Expr e = parse_expression(t);
    const Program p = Program::compile(e);
    for (int i = 0; i < 200; ++i) {
      const std::map<std::string, Value> names{{"x", static_cast<Value>(rng() % 21) - 10},
                                               {"y", static_cast<Value>(rng() % 21) - 10},
                                               {"pre(x)", static_cast<Value>(rng() % 5)}};
      EvalFrame f;
      f.names = &names;
      REQUIRE(evaluate(e, f) == p.run(f));
    }
  }
}

TEST_CASE("enumeration order and count") {
  const GameSpec spec = parse_game_spec(R"yaml(
actors: [a]
attributes:
  - {name: u, owner: a, range: [0, 1]}
  - {name: w, owner: a, range: [0, 2]}
actions:
  - {name: idle, actors: [a], guard: "true", writes: {u: "u"}}
initial:
  - {u: 0, w: 0}
)yaml");
  std::vector<std::vector<Value>> seen;
  for (const auto& v : enumerate_attribute_vectors(spec)) seen.push_back(v);
  REQUIRE(seen.size() == 6);
  CHECK(seen.front() == std::vector<Value>{0, 0});
  CHECK(seen.back() == std::vector<Value>{1, 2});
  CHECK(seen == all_vectors(spec));
  CHECK(thrown_code([&] { enumerate_attribute_vectors(spec, 5); }) == "DomainTooLarge");
}

TEST_CASE("singleton domain") {
  const GameSpec spec = parse_game_spec(R"yaml(
actors: [a]
attributes:
  - {name: u, owner: a, range: [5, 5]}
actions:
  - {name: idle, actors: [a], guard: "true", writes: {u: "u"}}
initial:
  - {u: 5}
)yaml");
  const auto range = enumerate_attribute_vectors(spec);
  CHECK(range.size() == 1);
  CHECK(*range.begin() == std::vector<Value>{5});
}

TEST_CASE("reduced penguin domain size") {
  const GameSpec spec = load_game_spec(model_path("penguin_reduced.yaml"));
  std::uint64_t product = 1;
  for (const auto& a : spec.attributes) product *= static_cast<std::uint64_t>(a.hi - a.lo + 1);
  CHECK(product == 1016064);
  CHECK(domain_product(spec) == product);
  CHECK(enumerate_attribute_vectors(spec).size() == product);
}

TEST_CASE("codec round trip") {
  const GameSpec spec = load_game_spec(model_path("penguin_full.yaml"));
  const StateCodec codec(spec);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Value> v;
    for (const auto& a : spec.attributes) v.push_back(a.lo + static_cast<Value>(rng() % static_cast<std::uint64_t>(a.hi - a.lo + 1)));
    REQUIRE(codec.decode(codec.encode(v)) == v);
  }
}

TEST_CASE("admissible actions") {
  SUBCASE("unconditional stay") {
    const GameSpec spec = load_game_spec(model_path("stay_only.yaml"));
    for (Value x : {0, 1}) {
      const auto got = admissible_actions(spec, "a", std::vector<Value>{x});
      REQUIRE(got.size() == 1);
      CHECK(spec.actions[got[0].action].name == "stay");
      CHECK(got[0].choices.empty());
    }
  }
  SUBCASE("move at the left edge") {
    const GameSpec spec = parse_game_spec(kMover);
    const auto got = admissible_actions(spec, "p", std::vector<Value>{0});
    REQUIRE(got.size() == 2);
    CHECK(got[0] == AdmissibleAction{0, {0}});
    CHECK(got[1] == AdmissibleAction{0, {1}});
    const auto right = admissible_actions(spec, "p", std::vector<Value>{8});
    REQUIRE(right.size() == 3);
    CHECK(spec.actions[right[2].action].name == "Stay");
  }
  SUBCASE("a dead penguin can only be dead") {
    const GameSpec spec = load_game_spec(model_path("penguin_reduced.yaml"));
    auto v = initial_vectors(spec).front();
    v[*spec.attribute_index("pg1_dead")] = 1;
    const auto got = admissible_actions(spec, "pg1", v);
    REQUIRE(got.size() == 1);
    CHECK(spec.actions[got[0].action].name == "first_dead");
  }
}

TEST_CASE("validation") {
  SUBCASE("coverage hole at x = 0") {
    const GameSpec spec = parse_game_spec(R"yaml(
actors: [a]
attributes:
  - {name: x, owner: a, range: [0, 2]}
actions:
  - {name: down, actors: [a], guard: "x > 0", writes: {x: "x - 1"}}
initial:
  - {x: 2}
)yaml");
    const auto r = validate_game(spec);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == ViolationKind::Coverage);
    CHECK(r.violations[0].witness == std::vector<Value>{0});
  }
  SUBCASE("two actors writing one attribute") {
    const GameSpec spec = parse_game_spec(R"yaml(
actors: [a, b]
attributes:
  - {name: y, owner: a, range: [0, 1]}
actions:
  - {name: set, actors: [a], guard: "true", writes: {y: "1"}}
  - {name: reset, actors: [b], guard: "true", writes: {y: "0"}}
initial:
  - {y: 0}
)yaml");
    const auto r = validate_game(spec);
    CHECK(r.has(ViolationKind::Conflict));
    CHECK(!r.has(ViolationKind::Coverage));
  }
  SUBCASE("out of range write") {
    const GameSpec spec = parse_game_spec(R"yaml(
actors: [a]
attributes:
  - {name: x, owner: a, range: [0, 2]}
actions:
  - {name: up, actors: [a], guard: "true", writes: {x: "x + 1"}}
initial:
  - {x: 0}
)yaml");
    const auto r = validate_game(spec);
    REQUIRE(r.has(ViolationKind::Range));
    CHECK(r.violations[0].witness == std::vector<Value>{2});
  }
  SUBCASE("reduced penguin is clean") {
    const auto r = validate_game(load_game_spec(model_path("penguin_reduced.yaml")));
    CHECK(r.exhaustive);
    CHECK(r.ok());
    CHECK(r.vectors_checked == 1016064);
  }
  SUBCASE("over the cap the scan is skipped") {
    const auto r = validate_game(load_game_spec(model_path("penguin_full.yaml")));
    CHECK(!r.exhaustive);
    CHECK(!r.skipped_reason.empty());
    CHECK(thrown_code([] {
            validate_game(load_game_spec(model_path("penguin_full.yaml")), {kDefaultEnumerationCap, true, true});
          }) == "DomainTooLarge");
  }
}

TEST_CASE("coverage agrees with admissible actions on random specs") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    GameSpec spec;
    try {
      spec = parse_game_spec(random_game_yaml(rng));
    } catch (const Error&) {
      continue;
    }
    bool hole = false;
    for (const auto& v : all_vectors(spec)) {
      for (std::size_t a = 0; a < spec.actors.size(); ++a) hole = hole || admissible_actions(spec, a, v).empty();
    }
    const auto r = validate_game(spec);
    bool reported = false;
    for (const auto& x : r.violations) reported = reported || (x.kind == ViolationKind::Coverage && x.subject.find('/') == std::string::npos && x.message.find("joint") == std::string::npos);
    CHECK(hole == reported);
  }
}

TEST_CASE("parallel and serial validation agree") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    GameSpec spec;
    try {
      spec = parse_game_spec(random_game_yaml(rng));
    } catch (const Error&) {
      continue;
    }
    const auto a = validate_game(spec);
    const auto b = validate_game_serial(spec);
    REQUIRE(a.violations.size() == b.violations.size());
    for (std::size_t k = 0; k < a.violations.size(); ++k) {
      CHECK(a.violations[k].kind == b.violations[k].kind);
      CHECK(a.violations[k].witness == b.violations[k].witness);
      CHECK(a.violations[k].occurrences == b.violations[k].occurrences);
    }
  }
}

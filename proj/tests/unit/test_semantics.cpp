#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lm/error.hpp"
#include "lm/machining.hpp"
#include "lm/parser.hpp"
#include "lm/semantics.hpp"

using namespace lm;

namespace {

const char* kSmall = R"(
scale num = integer;
scale col = scalar { red, blue };
unknown x : num;
unknown y : col;
relation f(num) -> num;
relation p(col);
table f { (1) -> 2; (2) -> 3; }
table p { (red); }
variable v : num;
variable w : num;
variable c : col;
formula total: f(x) = x + 1;
)";

CandidateSystem with_universe(std::map<std::string, Value> objects, std::set<Value> universe) {
  CandidateSystem c;
  c.objects = std::move(objects);
  c.universe = std::move(universe);
  for (const auto& [_, v] : c.objects) c.universe.insert(v);
  return c;
}

MaybeValue term(const std::string& text, const LogicalModel& m, const CandidateSystem& c = {}) {
  return eval_term(*parse_term(text, m), m, c);
}

bool holds(const std::string& text, const LogicalModel& m, const CandidateSystem& c = {}) {
  return eval_formula(*parse_formula(text, m), m, c);
}

double num(const MaybeValue& v) {
  REQUIRE(v.has_value());
  REQUIRE(v->is_number());
  return v->as_number().as_double();
}

Situation worked(const KnowledgePack& pack, const std::string& name) {
  for (const auto& s : pack.situations)
    if (s.name == name) return s;
  FAIL("missing situation " << name);
  return {};
}

}  // namespace

TEST_SUITE("semantics") {
  TEST_CASE("constants and arithmetic") {
    const LogicalModel m = parse_model(kSmall);
    CHECK(num(term("pi", m)) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
    CHECK(*term("1 / 3 + 1 / 3", m) == Value(Number::fraction(2, 3)));
    CHECK_FALSE(term("1 / 0", m).has_value());
    CHECK_FALSE(term("f(7)", m).has_value());
    CHECK(*term("f(2)", m) == Value::integer(3));
  }

  TEST_CASE("undefined is strict") {
    const LogicalModel m = parse_model(kSmall);
    CHECK_FALSE(term("f(7) + 1", m).has_value());
    CHECK_FALSE(term("f(f(2))", m).has_value());
    CHECK_FALSE(holds("f(7) = f(7)", m));
    CHECK(holds("not f(7) = 1", m));
    CHECK(holds("f(7) = 1 => 1 = 2", m));
  }

  TEST_CASE("membership in intervals") {
    const LogicalModel m = parse_model(kSmall);
    CHECK(holds("25 in [20, 35]", m));
    CHECK(holds("20 in [20, 35]", m));
    CHECK_FALSE(holds("40 in [20, 35]", m));
  }

  TEST_CASE("machining: lookups, misses and field access") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    const LogicalModel& m = pack.model;
    CHECK(*term("b1(steel, S50C, 220)", m) == Value::interval(Number::integer(20), Number::integer(35), "m_per_min"));
    CHECK(num(term("b3(steel, S50C, 220)", m)) == doctest::Approx(0.9));
    CHECK_FALSE(term("b3(cast_iron, FC25, 300)", m).has_value());
    CHECK(num(term("b2(10, 5, 10)", m)) == doctest::Approx(0.6));

    const CandidateSystem c = worked(pack, "worked_consistent").system;
    CHECK(num(term("diameter.tool.op", m, c)) == 20);
    CHECK(*term("classification.x", m, c) == Value::scalar("steel"));
  }

  TEST_CASE("machining: feed formula on a hand-computed operation") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    const LogicalModel& m = pack.model;
    // Every factor 1, speed pi, diameter 100: feed = 10000 * pi / pi / 100.
    const double feed = num(term("b2(100, 5, 10) * b3(calibration, CAL, 220) * b4(square, 30, 4) * b5(dry) * 10000 * pi / pi / 100", m));
    CHECK(std::fabs(feed - 100.0) <= 1e-9 * 100);
  }

  TEST_CASE("relevant substitutions: product over the universe") {
    const LogicalModel m = parse_model(kSmall);
    const CandidateSystem c = with_universe({{"x", Value::integer(1)}, {"y", Value::scalar("red")}},
                                            {Value::integer(2), Value::integer(3)});
    CHECK(relevant_substitutions(*parse_formula("v = 1", m), m, c).size() == 3);
    const auto two = relevant_substitutions(*parse_formula("v = w", m), m, c);
    CHECK(two.size() == 9);
    // First variable (by name) varies slowest.
    CHECK(two[0].at("v") == two[1].at("v"));
    CHECK(relevant_substitutions(*parse_formula("x = 1", m), m, c).size() == 1);

    const CandidateSystem no_col = with_universe({{"x", Value::integer(1)}}, {});
    CHECK(relevant_substitutions(*parse_formula("c = c", m), m, no_col).empty());
  }

  TEST_CASE("agreement: vacuous and witnessed") {
    const LogicalModel m = parse_model(kSmall);
    const CandidateSystem no_col = with_universe({{"x", Value::integer(1)}}, {});
    CHECK(in_agreement(*parse_formula("c = c and 1 = 2", m), m, no_col).agrees);

    const Agreement closed = in_agreement(*parse_formula("1 = 2", m), m, no_col);
    CHECK_FALSE(closed.agrees);
    REQUIRE(closed.witness.has_value());
    CHECK(closed.witness->empty());

    const CandidateSystem c = with_universe({{"x", Value::integer(1)}}, {Value::integer(2), Value::integer(3)});
    const Agreement a = in_agreement(*parse_formula("f(v) = 2", m), m, c);
    CHECK_FALSE(a.agrees);
    REQUIRE(a.witness.has_value());
    CHECK(a.witness->at("v") == Value::integer(2));
  }

  TEST_CASE("is_solution: empty Φ and contradictory Φ") {
    LogicalModel m = parse_model(kSmall);
    const CandidateSystem c = make_candidate({{"x", Value::integer(1)}, {"y", Value::scalar("blue")}});
    CHECK(is_solution(c, m).solution);

    m.formulas.clear();
    CHECK(is_solution(c, m).solution);
    const CandidateSystem bad = make_candidate({{"x", Value::integer(5)}, {"y", Value::scalar("blue")}});
    CHECK(is_solution(bad, m).solution);

    m.formulas.push_back({"never", parse_formula("1 = 2", m), {}});
    const SolutionCheck r = is_solution(c, m);
    CHECK_FALSE(r.solution);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0].formula == "never");
  }

  TEST_CASE("is_solution: reports failures in formula order") {
    LogicalModel m = parse_model(kSmall);
    m.formulas.push_back({"colour", parse_formula("p(y)", m), {}});
    const CandidateSystem c = make_candidate({{"x", Value::integer(5)}, {"y", Value::scalar("blue")}});
    const SolutionCheck r = is_solution(c, m);
    REQUIRE(r.failures.size() == 2);
    CHECK(r.failures[0].formula == "total");
    CHECK(r.failures[1].formula == "colour");
  }

  TEST_CASE("relevance: universe must be inside the base universe") {
    const LogicalModel m = parse_model(kSmall);
    CandidateSystem c = make_candidate({{"x", Value::integer(1)}, {"y", Value::scalar("red")}});
    CHECK_NOTHROW(check_relevant(c, m));
    c.universe.erase(Value::integer(1));
    CHECK_THROWS_AS(check_relevant(c, m), Error);
  }

  TEST_CASE("machining: worked situation and its perturbation") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    const Situation ok = worked(pack, "worked_consistent");
    // Independent value: b2 1.2, b3 0.9, b4 1, b5 1.1, speed 27.5, diameter 20.
    const double expected = 1.2 * 0.9 * 1.0 * 1.1 * 10000 * 27.5 / std::numbers::pi / 20;
    CHECK(num(term("feed.op", pack.model, ok.system)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(is_solution(ok.system, pack.model).solution);

    const SolutionCheck bad = is_solution(worked(pack, "worked_feed_perturbed").system, pack.model);
    CHECK_FALSE(bad.solution);
    REQUIRE(bad.failures.size() == 1);
    CHECK(bad.failures[0].formula == "feed_rate");
    CHECK(bad.failures[0].witness.count("v1") == 1);
  }

  TEST_CASE("unbound variables are an error") {
    const LogicalModel m = parse_model(kSmall);
    try {
      eval_term(*parse_term("v + 1", m), m, {});
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnboundVariable);
    }
  }
}

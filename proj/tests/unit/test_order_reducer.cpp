#include <doctest.h>

#include <nlohmann/json.hpp>

#include "lm/error.hpp"
#include "lm/format.hpp"
#include "lm/machining.hpp"
#include "lm/parser.hpp"
#include "lm/reducer.hpp"
#include "lm/solver.hpp"
#include "support/random.hpp"

using namespace lm;

namespace {

const char* kThreeRows = R"(
scale num = integer;
unknown x : num;
unknown y : num;
relation f(num) -> num;
relation e(num) -> num;
table f { (1) -> 2; (2) -> 3; (3) -> 4; }
table e { }
formula a: y = f(x);
formula b: e(x) = 1;
)";

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Io;
}

std::vector<Value> ints(int lo, int hi) {
  std::vector<Value> v;
  for (int i = lo; i <= hi; ++i) v.push_back(Value::integer(i));
  return v;
}

}  // namespace

TEST_SUITE("order-reducer") {
  TEST_CASE("a three-row table becomes a three-way disjunction") {
    const LogicalModel m = parse_model(kThreeRows);
    const auto [r, report] = reduce_once(m);
    CHECK(r.order() == 1);
    CHECK(r.signature.level(2).empty());
    CHECK(r.facts.empty());
    CHECK(format(r.formula("a")->formula) == "x = 1 and y = 2 or x = 2 and y = 3 or x = 3 and y = 4");
    CHECK(report.eliminated == std::vector<std::string>{"f", "e"});
    REQUIRE(report.mapping.size() == 2);
    CHECK(report.mapping[0].rows.size() == 3);
    CHECK(report.formulas_before == 2);
    CHECK(report.formulas_after == 2);
  }

  TEST_CASE("an empty table reduces to false") {
    const LogicalModel m = parse_model(kThreeRows);
    CHECK(format(reduce_once(m).first.formula("b")->formula) == "false");
  }

  TEST_CASE("order 1 cannot be reduced once, but the chain leaves it alone") {
    const LogicalModel m = parse_model("scale num = integer;\nunknown x : num;\nformula a: x = 1;\n");
    CHECK(code_of([&] { reduce_once(m); }) == ErrorCode::OrderTooLow);
    const auto [same, chain] = reduce_to_first_order(m);
    CHECK(same == m);
    CHECK(chain.empty());
  }

  TEST_CASE("order 3 reduces in two steps") {
    const LogicalModel m = parse_model(R"(
scale num = integer;
unknown x : num;
unknown y : num;
relation f(num) -> num;
relation g(num) -> num level 3;
table f { (1) -> 2; (2) -> 3; }
table g { (2) -> 5; (3) -> 7; }
formula a: y = g(f(x));
)");
    CHECK(m.order() == 3);
    const auto [r, chain] = reduce_to_first_order(m);
    REQUIRE(chain.size() == 2);
    CHECK(chain[0].input_order == 3);
    CHECK(chain[0].eliminated == std::vector<std::string>{"g"});
    CHECK(chain[1].eliminated == std::vector<std::string>{"f"});
    CHECK(r.order() == 1);
    CHECK(check_equivalence(m, r, ints(0, 8), 100000).equivalent);
  }

  TEST_CASE("machining pack: reduced model gives the same answers") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    const auto [r, chain] = reduce_to_first_order(pack.model);
    REQUIRE(chain.size() == 1);
    CHECK(chain[0].eliminated == std::vector<std::string>{"b1", "b2", "b3", "b4", "b5"});
    CHECK(r.order() == 1);
    for (const auto& t : pack.tasks) {
      INFO(t.name);
      const TaskSpec rt = load_task_file(t.file, r);
      CHECK(solve(pack.model, t.spec).same_answer(solve(r, rt)));
    }
    for (const auto& s : pack.situations) CHECK(is_solution(s.system, r).solution == is_solution(s.system, pack.model).solution);
  }

  TEST_CASE("report json lists each step") {
    const LogicalModel m = parse_model(kThreeRows);
    const auto chain = reduce_to_first_order(m).second;
    const auto doc = nlohmann::json::parse(report_json(chain));
    CHECK(doc.at("format") == "lm-reduction-report");
    CHECK(doc.at("version") == 1);
    REQUIRE(doc.at("steps").size() == 1);
    CHECK(doc["steps"][0]["mapping"][0]["rows"].size() == 3);
    CHECK(report_text(chain[0]).find("order 2 -> 1") != std::string::npos);
  }

  TEST_CASE("equivalence: identical models agree, a changed row is caught") {
    const LogicalModel m = parse_model(kThreeRows);
    const auto pool = ints(0, 5);
    CHECK(check_equivalence(m, m, pool, 100000).equivalent);

    // Without formula b the model is satisfiable, so a changed row must show.
    std::string base = kThreeRows;
    base.erase(base.find("formula b"));
    const LogicalModel sat = parse_model(base);
    std::string mutated = base;
    mutated.replace(mutated.find("(2) -> 3"), 8, "(2) -> 5");
    const LogicalModel other = parse_model(mutated);
    const EquivalenceVerdict v = check_equivalence(sat, reduce_once(other).first, pool, 100000);
    CHECK_FALSE(v.equivalent);
    REQUIRE(v.counterexample.has_value());
    CHECK(is_solution(*v.counterexample, sat).solution != is_solution(*v.counterexample, other).solution);
  }

  TEST_CASE("equivalence: random row mutations are detected") {
    // Only satisfiable models can show a difference; each numeric row is mutated in turn and the
    // verdict against the mutant must not change when the mutant is reduced first.
    lmtest::Rng rng(77);
    int detected = 0, tried = 0;
    for (int i = 0; i < 80; ++i) {
      auto m = lmtest::random_model(rng);
      LogicalModel never = m.model;
      never.formulas = {{"never", parse_formula("1 = 2", never), {}}};
      if (check_equivalence(m.model, never, m.pool, 1000000).equivalent) continue;
      for (const auto& [name, table] : m.model.facts[0].tables) {
        const Symbol* s = m.model.symbol(name);
        if (s->kind != SymbolKind::Functional) continue;
        for (std::size_t row = 0; row < table.rows().size(); ++row) {
          if (!table.rows()[row].result->is_number()) continue;
          LogicalModel mut = m.model;
          std::vector<TableRow> rows = table.rows();
          rows[row].result = Value::integer(999);
          mut.facts[0].tables[name] = make_table(*s, rows, &mut.scales);
          ++tried;
          const EquivalenceVerdict direct = check_equivalence(m.model, mut, m.pool, 1000000);
          const EquivalenceVerdict v = check_equivalence(m.model, reduce_once(mut).first, m.pool, 1000000);
          CHECK(direct.equivalent == v.equivalent);
          if (!v.equivalent) {
            ++detected;
            REQUIRE(v.counterexample.has_value());
            CHECK(is_solution(*v.counterexample, m.model).solution != is_solution(*v.counterexample, mut).solution);
          }
        }
      }
    }
    MESSAGE(tried << " mutants, " << detected << " detected");
    CHECK(tried > 20);
    CHECK(detected > 0);
  }

  TEST_CASE("equivalence: bound and signature checks") {
    const LogicalModel m = parse_model(kThreeRows);
    CHECK(code_of([&] { check_equivalence(m, m, ints(0, 30), 10); }) == ErrorCode::BoundExceeded);
    const LogicalModel other = parse_model("scale num = integer;\nunknown x : num;\nformula a: x = 1;\n");
    CHECK(code_of([&] { check_equivalence(m, other, ints(0, 3), 1000); }) == ErrorCode::SignatureMismatch);
  }
}

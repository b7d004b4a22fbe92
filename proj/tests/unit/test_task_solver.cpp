#include <doctest.h>

#include <algorithm>

#include "lm/error.hpp"
#include "lm/format.hpp"
#include "lm/machining.hpp"
#include "lm/parser.hpp"
#include "lm/solver.hpp"

using namespace lm;

namespace {

const char* kSmall = R"(
scale num = integer;
scale col = scalar { red, green, blue };
unknown x : num;
unknown y : col;
relation f(num) -> num;
relation p(col);
table f { (1) -> 2; (2) -> 3; (3) -> 4; }
table p { (red); (blue); }
formula shift: f(x) > 2;
formula colour: p(y);
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

std::vector<Value> outputs_of(const TaskResult& r, std::size_t column) {
  std::vector<Value> out;
  for (const auto& s : r.solutions) out.push_back(*s.outputs.at(column).second);
  return out;
}

}  // namespace

TEST_SUITE("task-solver") {
  TEST_CASE("compose: Φt is Φ followed by renamed Δ") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    const TaskModel tm = compose_task_model(pack.model, pack.task("identity")->spec);
    REQUIRE(tm.phiT.size() == 7);
    CHECK(tm.phiT[0].name == "speed_range");
    CHECK(tm.phiT[2].name == "delta:material");
    CHECK(tm.base.formulas.size() == 2);
  }

  TEST_CASE("derive_domains: hardness candidates come from the b1 and b3 columns") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    const SearchDomain d = derive_domains(compose_task_model(pack.model, pack.task("hardness_free")->spec));
    const auto leaf = std::find_if(d.leaves.begin(), d.leaves.end(),
                                   [](const Leaf& l) { return l.unknown == "x" && l.path == FieldPath{"hardness"}; });
    REQUIRE(leaf != d.leaves.end());
    CHECK(leaf->source == Leaf::Source::ActiveDomain);
    CHECK(leaf->values == std::vector<Value>{Value::integer(180), Value::integer(220), Value::integer(300)});
  }

  TEST_CASE("derive_domains: pinned and derived leaves") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    const SearchDomain d = derive_domains(compose_task_model(pack.model, pack.task("max_feed")->spec));
    for (const auto& l : d.leaves) {
      if (l.unknown != "op") continue;
      if (l.path == FieldPath{"feed"}) CHECK(l.source == Leaf::Source::Derived);
      if (l.path == FieldPath{"cutting_speed"}) {
        CHECK(l.source == Leaf::Source::Annotated);
        CHECK(l.values.size() == 3);
      }
      if (l.path == FieldPath{"cutting_depth"}) {
        CHECK(l.source == Leaf::Source::Pinned);
        CHECK(l.values == std::vector<Value>{Value::integer(4)});
      }
    }
  }

  TEST_CASE("derive_domains: an unknown with no source is unbounded") {
    const LogicalModel m = parse_model("scale num = integer;\nunknown x : num;\nunknown z : num;\nformula a: x = 1;\n");
    const TaskSpec t = parse_task("given: x = 1;\noutput: z;\n", m);
    try {
      derive_domains(compose_task_model(m, t));
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnboundedUnknown);
      CHECK(std::string(e.what()).find("z") != std::string::npos);
    }
  }

  TEST_CASE("machining tasks agree with the brute-force oracle") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    for (const auto& t : pack.tasks) {
      INFO(t.name);
      const TaskResult a = solve(pack.model, t.spec);
      const TaskResult b = brute_force_solve(pack.model, t.spec, 100000);
      CHECK(a.same_answer(b));
    }
  }

  TEST_CASE("machining: identity, contradictory, hardness_free, max_feed") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    const TaskResult id = solve(pack.model, pack.task("identity")->spec);
    REQUIRE(id.solutions.size() == 1);
    CHECK(id.solutions[0].outputs[0].second->as_number().as_double() == doctest::Approx(100.0).epsilon(1e-12));

    const TaskResult none = solve(pack.model, pack.task("contradictory")->spec);
    CHECK(none.status == SolveStatus::NoSolutions);
    CHECK(none.solutions.empty());

    // S50C rows exist at 180 ([25, 40]) and 220 ([20, 35]); speeds 25, 30, 35 fit both.
    const TaskResult hf = solve(pack.model, pack.task("hardness_free")->spec);
    CHECK(hf.solutions.size() == 6);
    for (const Value& h : outputs_of(hf, 0)) CHECK((h == Value::integer(180) || h == Value::integer(220)));

    const TaskResult mf = solve(pack.model, pack.task("max_feed")->spec);
    REQUIRE(mf.solutions.size() == 1);
    CHECK(*mf.solutions[0].outputs[0].second == Value::integer(35));
    CHECK(mf.stats.solutions_before_psi == 3);
  }

  TEST_CASE("empty Φ: Δ alone decides") {
    LogicalModel m = parse_model(kSmall);
    m.formulas.clear();
    const TaskResult r = solve(m, parse_task("given: x = 3;\ngiven: y = green;\noutput: x, y;\n", m));
    REQUIRE(r.solutions.size() == 1);
    CHECK(*r.solutions[0].outputs[1].second == Value::scalar("green"));
  }

  TEST_CASE("empty domain gives no solutions") {
    const LogicalModel m = parse_model(kSmall);
    const TaskResult r = solve(m, parse_task("domain: x in {};\ndomain: y in {red};\noutput: x;\n", m));
    CHECK(r.status == SolveStatus::NoSolutions);
  }

  TEST_CASE("active domain and pins") {
    const LogicalModel m = parse_model(kSmall);
    const TaskSpec t = parse_task("domain: y in {red, green, blue};\noutput: x, y;\n", m);
    const TaskResult r = solve(m, t);
    // x from the active domain {1, 2, 3, 4}: f(x) > 2 keeps 2 and 3; p keeps red and blue.
    CHECK(r.solutions.size() == 4);
    CHECK(r.same_answer(brute_force_solve(m, t, 1000)));
  }

  TEST_CASE("truncation by candidate limit") {
    const LogicalModel m = parse_model(kSmall);
    const TaskSpec t = parse_task("domain: x in {1, 2, 3, 4, 5, 6};\ndomain: y in {red, green, blue};\noutput: x;\n", m);
    SolveConfig cfg;
    cfg.max_candidates = 2;
    const TaskResult r = solve(m, t, cfg);
    CHECK(r.status == SolveStatus::Truncated);
    CHECK_FALSE(r.truncation.empty());
    CHECK(r.stats.candidates <= 2);
  }

  TEST_CASE("worker count does not change the answer") {
    const KnowledgePack pack = load_pack(LM_PACK_DIR);
    for (const auto& t : pack.tasks) {
      const TaskResult one = solve(pack.model, t.spec);
      for (unsigned w : {2u, 4u}) {
        SolveConfig cfg;
        cfg.workers = w;
        CHECK(solve(pack.model, t.spec, cfg).same_answer(one));
      }
    }
  }

  TEST_CASE("Ψ: require, maximize, minimize and non-numeric objectives") {
    const LogicalModel m = parse_model(kSmall);
    const std::string base = "domain: x in {1, 2, 3};\ndomain: y in {red};\noutput: x;\n";
    CHECK(outputs_of(solve(m, parse_task(base + "psi: maximize x;\n", m)), 0) == std::vector<Value>{Value::integer(3)});
    CHECK(outputs_of(solve(m, parse_task(base + "psi: minimize x * 1;\n", m)), 0) == std::vector<Value>{Value::integer(2)});
    // Objectives are first-order; a level-2 symbol is refused.
    CHECK(code_of([&] { parse_task(base + "psi: minimize f(x);\n", m); }) == ErrorCode::LevelViolation);
    CHECK(outputs_of(solve(m, parse_task(base + "psi: require not x = 2;\n", m)), 0) == std::vector<Value>{Value::integer(3)});
    CHECK(code_of([&] { solve(m, parse_task(base + "psi: maximize y;\n", m)); }) == ErrorCode::PsiNotNumeric);
  }

  TEST_CASE("relation unknowns are searched over their annotated tables") {
    const LogicalModel m = parse_model(R"(
scale num = integer;
unknown x : num;
unknown r(num) -> num;
formula a: r(x) = 2;
)");
    const TaskSpec t = parse_task("given: x = 1;\ndomain: r in { {(1) -> 2}, {(1) -> 3}, {} };\noutput: r(x);\n", m);
    const TaskResult r = solve(m, t);
    REQUIRE(r.solutions.size() == 1);
    CHECK(*r.solutions[0].outputs[0].second == Value::integer(2));
    CHECK(r.same_answer(brute_force_solve(m, t, 100)));
  }

  TEST_CASE("brute force refuses spaces over its bound") {
    const LogicalModel m = parse_model(kSmall);
    const TaskSpec t = parse_task("domain: x in {1, 2, 3, 4, 5, 6};\ndomain: y in {red, green, blue};\noutput: x;\n", m);
    CHECK(code_of([&] { brute_force_solve(m, t, 5); }) == ErrorCode::BoundExceeded);
  }
}

#include <doctest.h>

#include "support/properties.hpp"

using namespace lmtest;

namespace {

// Seeds differ from the acceptance run so the two cover different instances.
void expect_ok(const PropertyResult& r) {
  INFO(r.name << ": " << r.first_failure);
  CHECK(r.checked > 0);
  CHECK(r.failed == 0);
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("reduction preserves solution sets") { expect_ok(prop_reduction_equivalence(11, 60)); }
  TEST_CASE("solver agrees with brute force") { expect_ok(prop_solver_oracle(12, 100)); }
  TEST_CASE("formulas over an empty variable range hold") { expect_ok(prop_vacuous_agreement(13, 150)); }
  TEST_CASE("dropping formulas never loses solutions") { expect_ok(prop_phi_monotonicity(14, 150)); }
  TEST_CASE("row and formula order do not matter") { expect_ok(prop_permutation_invariance(15, 100)); }
  TEST_CASE("undefined reaches the enclosing atom") { expect_ok(prop_undefined_propagation(16, 150)); }
  TEST_CASE("format then parse is the identity") { expect_ok(prop_parse_format_identity(17, 300)); }
}

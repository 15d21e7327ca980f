#include "doctest.h"
#include "properties.hpp"

using namespace spinbound;

TEST_CASE("hermitian symmetry of the transform") {
  const auto c = props::hermitian_symmetry();
  INFO(c.detail);
  CHECK(c.pass);
}

TEST_CASE("bochner semi-definiteness for nonpositive measures") {
  const auto c = props::bochner();
  INFO(c.detail);
  CHECK(c.pass);
}

TEST_CASE("free oracle spectrum is exact") {
  const auto c = props::free_oracle_exact();
  INFO(c.detail);
  CHECK(c.pass);
}

TEST_CASE("reports are deterministic") {
  const auto c = props::report_determinism();
  INFO(c.detail);
  CHECK(c.pass);
}

#include <doctest.h>

#include <cmath>

#include "grushin/checks.hpp"
#include "grushin/common.hpp"

using namespace grushin;
using namespace grushin::harmonics;

TEST_CASE("addition theorem check") {
  const auto r = addition_theorem_check(96, 129);
  CHECK(r.max_rel_err < 1e-12);
  CHECK(r.worst_l >= 0);
  CHECK(r.worst_l <= 96);
  CHECK(std::abs(r.worst_x) <= 1.0);

  const auto r0 = addition_theorem_check(0, 2);
  CHECK(r0.max_rel_err < 1e-15);

  CHECK_THROWS_AS(addition_theorem_check(-1), DomainError);
  CHECK_THROWS_AS(addition_theorem_check(4, 1), ConfigError);
}

TEST_CASE("addition theorem check is thread independent") {
  set_thread_budget(1);
  const auto a = addition_theorem_check(80, 65);
  set_thread_budget(3);
  const auto b = addition_theorem_check(80, 65);
  set_thread_budget(0);
  CHECK(a.max_rel_err == b.max_rel_err);
  CHECK(a.worst_l == b.worst_l);
  CHECK(a.worst_x == b.worst_x);
}

TEST_CASE("orthonormality check") {
  const auto r = orthonormality_check(40);
  CHECK(r.max_residual < 1e-12);
  CHECK(r.worst_a.m == r.worst_b.m);
  CHECK(orthonormality_check(0).max_residual < 1e-15);
  CHECK_THROWS_AS(orthonormality_check(-2), DomainError);
}

TEST_CASE("parity check") {
  const auto r = parity_check(40, 21);
  CHECK(r.max_order_residual == 0.0);
  CHECK(r.max_reflection_residual <= 1e-13);
  CHECK_THROWS_AS(parity_check(-1), DomainError);
}

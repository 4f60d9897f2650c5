#include <doctest.h>

#include <cmath>
#include <random>

#include "grushin/geometry.hpp"

using namespace grushin;
using namespace grushin::geometry;

namespace {
SpherePoint pt(double t, double p) { return SpherePoint::make(t, p); }
}  // namespace

TEST_CASE("sphere points") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_uniform(rng);
    CHECK(std::abs(p.embed().norm() - 1.0) < 1e-14);
    CHECK(p.phi >= 0.0);
    CHECK(p.phi < 2 * pi);
  }
  CHECK(pt(0.1, -0.5).phi == doctest::Approx(2 * pi - 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(pt(1.6, 0.0), DomainError);
}

TEST_CASE("closed-form distance") {
  const auto p = pt(0.3, 1.0);
  CHECK(phi_distance(p, p) == 0.0);
  CHECK(phi_distance(pt(0, 0), pt(0, 0.25)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(phi_distance(pt(pi / 4, 0), pt(0, 0.1)) == doctest::Approx(pi / 4 + 0.1).epsilon(1e-14));
  // arclength on the circle wraps through 0
  CHECK(phi_distance(pt(0, 0.1), pt(0, 2 * pi - 0.15)) == doctest::Approx(0.5).epsilon(1e-14));
  std::mt19937_64 rng(12);
  for (int i = 0; i < 2000; ++i) {
    const auto a = sample_uniform(rng), b = sample_uniform(rng);
    CHECK(phi_distance(a, b) == phi_distance(b, a));
    CHECK(phi_distance(a, b) > 0.0);
  }
}

TEST_CASE("riemannian distance") {
  CHECK(riemannian_distance(pt(0.2, 0.4), pt(0.2, 0.4)) == doctest::Approx(0.0));
  CHECK(riemannian_distance(pt(0.3, 0.0), pt(-0.3, pi)) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(riemannian_distance(pt(0, 0), pt(0, 0.25)) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("model volume and weight") {
  CHECK(ball_volume_closed(pt(0, 0), 0.0) == 0.0);
  CHECK(ball_volume_closed(pt(0, 0), 0.1) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(ball_volume_closed(pt(0.5, 0), 0.1) == doctest::Approx(0.005).epsilon(1e-14));
  CHECK(ball_volume_closed(pt(0.5, 0), 3.0) == 1.0);
  CHECK_THROWS_AS(ball_volume_closed(pt(0, 0), -1.0), DomainError);
  CHECK(weight(0.1, pt(0, 1), pt(0.4, 0)) == 0.0);
  CHECK(weight(0.1, pt(0.2, 0), pt(0.05, 0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(weight(0.1, pt(0.2, 0), pt(0.3, 0)) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(weight(0.1, pt(0.2, 0), pt(0.3, 0)) != weight(0.1, pt(0.3, 0), pt(0.2, 0)));
  CHECK_THROWS_AS(weight(0.0, pt(0, 0), pt(0, 0)), DomainError);
}

TEST_CASE("eikonal distance examples") {
  const double res = 1.0 / 512;
  const auto p = pt(0.7, 2.0);
  const auto same = eikonal_distance(p, p, res);
  CHECK(same.value <= same.error_estimate);
  CHECK(same.method == DistanceMethod::eikonal);

  const auto far = eikonal_distance(pt(0.6, 0.3), pt(-0.9, 2.5), res);
  const double rd = riemannian_distance(pt(0.6, 0.3), pt(-0.9, 2.5));
  CHECK(far.value / rd >= 1.0);
  CHECK(far.value / rd <= 3.0);
  const auto far2 = eikonal_distance(pt(0.8, 0.0), pt(1.1, 0.9), res);
  CHECK(far2.value / riemannian_distance(pt(0.8, 0.0), pt(1.1, 0.9)) >= 1.0);
  CHECK(far2.value / riemannian_distance(pt(0.8, 0.0), pt(1.1, 0.9)) <= 3.0);

  const auto eq = eikonal_distance(pt(0, 1.0), pt(0, 1.25), res);
  CHECK(eq.value / 0.5 >= 0.25);
  CHECK(eq.value / 0.5 <= 4.0);

  CHECK_THROWS_AS(eikonal_distance(p, p, 1.0 / 16), ConfigError);
  CHECK_THROWS_AS(eikonal_distance(p, p, -1.0), ConfigError);
}

TEST_CASE("eikonal distance converges under refinement") {
  const auto a = pt(0.4, 0.2), b = pt(-0.2, 1.3);
  const double d128 = eikonal_distance(a, b, 1.0 / 128).value;
  const double d256 = eikonal_distance(a, b, 1.0 / 256).value;
  const double d512 = eikonal_distance(a, b, 1.0 / 512).value;
  CHECK(std::abs(d512 - d256) <= std::abs(d256 - d128) + 1e-3);
  CHECK(std::abs(d512 - d256) < 0.05 * d512);
}

TEST_CASE("eikonal distance: riemannian lower bound, triangle inequality, poles") {
  const double res = 1.0 / 256;
  const double cell = pi * res;
  std::mt19937_64 rng(21);
  for (int i = 0; i < 12; ++i) {
    const auto a = sample_uniform(rng), b = sample_uniform(rng), c = sample_uniform(rng);
    const double ab = eikonal_distance(a, b, res).value;
    const double bc = eikonal_distance(b, c, res).value;
    const double ac = eikonal_distance(a, c, res).value;
    CHECK(ab >= riemannian_distance(a, b) - 2 * cell);
    CHECK(ac <= ab + bc + 3 * cell);
    const double ba = eikonal_distance(b, a, res).value;
    CHECK(std::abs(ab - ba) <= 3 * cell);
  }
  // pole to pole along a meridian
  const auto np = pt(pi / 2, 0.0), sp = pt(-pi / 2, 1.0);
  CHECK(eikonal_distance(np, sp, res).value == doctest::Approx(pi).epsilon(0.02));
  CHECK(eikonal_distance(pt(pi / 2 - 1e-4, 0.3), pt(pi / 2, 2.0), res).value < 2 * cell);
}

TEST_CASE("numeric ball volumes") {
  const double res = 1.0 / 512;
  for (double th : {0.0, 0.7}) {
    const double v = ball_volume_numeric(pt(th, 0.5), 4.0, res);
    CHECK(std::abs(v - 4 * pi) < 0.02 * 4 * pi);
  }
  std::vector<double> rs{0.05, 0.1, 0.2}, v0, v8;
  for (double r : rs) v0.push_back(ball_volume_numeric(pt(0, 0), r, res));
  CHECK(loglog_slope(rs, v0) == doctest::Approx(3.0).epsilon(0.1));
  for (double r : {0.05, 0.1}) v8.push_back(ball_volume_numeric(pt(0.8, 0), r, res));
  CHECK(loglog_slope({0.05, 0.1}, v8) == doctest::Approx(2.0).epsilon(0.15));
  // resolution-stable two-sided constants against the model
  for (double r : {0.05, 0.2}) {
    const double a = ball_volume_numeric(pt(0.3, 0), r, 1.0 / 256) / ball_volume_closed(pt(0.3, 0), r);
    const double b = ball_volume_numeric(pt(0.3, 0), r, 1.0 / 512) / ball_volume_closed(pt(0.3, 0), r);
    CHECK(std::abs(a - b) < 0.1 * b);
    CHECK(b > 0.1);
    CHECK(b < 10.0);
  }
  CHECK_THROWS_AS(ball_volume_numeric(pt(0, 0), 0.0, res), DomainError);
  CHECK_THROWS_AS(ball_volume_numeric(pt(0, 0), 0.1, 1.0 / 8), ConfigError);
}

TEST_CASE("weight lemma") {
  const auto r = weight_lemma_check(0.4, 2.8, 0.05, pt(0, 0));
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio > 0.0);
  CHECK(r.stable);
  CHECK(r.pointwise_constant <= 2.0);
  CHECK(r.rhs_model == doctest::Approx(0.05 * 0.05 * 0.05));

  const auto big = weight_lemma_check(0.4, 2.8, 1.5, pt(0.2, 0));
  CHECK(big.lhs <= 4 * pi);
  CHECK(big.ratio <= 4 * pi);

  for (double th : {0.0, 0.3, 1.2}) {
    const auto w = weight_lemma_check(0.9, 2.5, 0.1, pt(th, 0));
    CHECK(w.stable);
    CHECK(w.pointwise_constant >= 1.0);
    CHECK(w.pointwise_constant <= 2.0);
  }
  // the pointwise inequality at theta = 0.3, theta' = 0, r = 0.1, dphi = 0: 1 + 3 <= 1 + 3
  CHECK((1 + weight(0.1, pt(0.3, 0), pt(0, 0))) / (1 + phi_distance(pt(0.3, 0), pt(0, 0)) / 0.1) ==
        doctest::Approx(1.0).epsilon(1e-14));

  try {
    weight_lemma_check(0.5, 2.0, 0.1, pt(0, 0));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("alpha + beta > 3") != std::string::npos);
  }
  try {
    weight_lemma_check(1.2, 3.0, 0.1, pt(0, 0));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("alpha < 1") != std::string::npos);
  }
}

TEST_CASE("sampled pairs are seed-deterministic and thread-count independent") {
  set_thread_budget(1);
  const auto a = sample_pairs(6, 42, 1.0 / 128);
  set_thread_budget(3);
  const auto b = sample_pairs(6, 42, 1.0 / 128);
  set_thread_budget(0);
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pair_id == static_cast<int>(i));
    CHECK(a[i].p.theta == b[i].p.theta);
    CHECK(a[i].eikonal_dist == b[i].eikonal_dist);
    CHECK(a[i].ratio == doctest::Approx(a[i].eikonal_dist / a[i].phi_dist));
  }
  const auto rc = region_constants(a);
  int total = 0;
  for (const auto& c : rc) total += c.count;
  CHECK(total == 6);
}

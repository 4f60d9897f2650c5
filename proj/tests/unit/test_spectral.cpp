#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "grushin/lemmas.hpp"
#include "grushin/plancherel.hpp"
#include "grushin/spectral.hpp"

using namespace grushin;
using namespace grushin::spectral;
using harmonics::eval_profile;

namespace {

// Full sum over l and both signs of m with complex exponentials; no pairing.
std::complex<double> kernel_oracle(const Multiplier& F, int l_max, double theta, double theta_p, double dphi) {
  std::complex<double> s = 0.0;
  const double x = std::sin(theta), xp = std::sin(theta_p);
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      const double f = F(static_cast<double>(l) * (l + 1) - static_cast<double>(m) * m);
      if (f == 0.0) continue;
      s += f * eval_profile(HarmonicIndex{l, m}, x) * eval_profile(HarmonicIndex{l, m}, xp) *
           std::polar(1.0, m * dphi);
    }
  return s;
}

std::vector<Multiplier> sample_multipliers() {
  return {Multiplier::bump(0.25, 1.0).dilated(1.0 / 60),
          Multiplier::bochner_riesz(0.75, 1.0 / 100),
          Multiplier::bochner_riesz(0.0, 1.0 / 40),
          Multiplier::heat(0.05),
          Multiplier::indicator_zero(),
          Multiplier::tabulated({0.0, 10.0, 30.0, 80.0}, {1.0, 0.5, -0.25, 0.0}),
          Multiplier::bump(0.125, 0.5).dilated(1.0 / 12).of_sqrt()};
}

}  // namespace

TEST_CASE("eigenvalues") {
  CHECK(eigenvalue({0, 0}) == 0.0);
  CHECK(eigenvalue({2, 1}) == 5.0);
  CHECK(eigenvalue({2, -1}) == 5.0);
  for (int l = 0; l <= 100; ++l) CHECK(eigenvalue({l, l}) == l);
  for (int l = 0; l <= 300; ++l)
    for (int m = -l; m <= l; ++m) {
      const double alt = (l - std::abs(m) + 0.5) * (l + std::abs(m) + 0.5) - 0.25;
      CHECK(eigenvalue({l, m}) == alt);
      CHECK(eigenvalue({l, m}) >= 0.0);
    }
  CHECK_THROWS_AS(eigenvalue({2, 3}), DomainError);
}

TEST_CASE("degree limits") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dm(0, 400);
  std::uniform_real_distribution<double> dl(0.0, 70000.0);
  for (int k = 0; k < 5000; ++k) {
    const int m = dm(rng);
    const double lam = dl(rng);
    const int L = degree_limit(m, lam);
    if (lam < m) {
      CHECK(L == m - 1);
      continue;
    }
    CHECK(L >= m);
    CHECK(eigenvalue({L, m}) <= lam);
    CHECK(eigenvalue({L + 1, m}) > lam);
  }
  CHECK(degree_limit(0, 0.0) == 0);
  CHECK(degree_limit(0, 1.9) == 0);
  CHECK(degree_limit(0, 2.0) == 1);
}

TEST_CASE("spectral gap") { CHECK(smallest_positive_root_eigenvalue(10000) == 1.0); }

TEST_CASE("multipliers") {
  const auto b = Multiplier::bump(0.25, 1.0);
  CHECK(b(0.2) == 0.0);
  CHECK(b(1.0) == 0.0);
  CHECK(b(0.625) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b(0.5) > 0.0);
  CHECK(b(0.5) < 1.0);
  const auto br = Multiplier::bochner_riesz(0.5, 0.25);
  CHECK(br(2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(br(4.0) == 0.0);
  CHECK(br.lambda_support().second == 4.0);
  CHECK(Multiplier::bochner_riesz(0.0, 1.0)(0.999) == 1.0);
  CHECK(Multiplier::heat(0.3)(2.0) == doctest::Approx(std::exp(-0.6)).epsilon(1e-15));
  CHECK(Multiplier::indicator_zero()(0.0) == 1.0);
  CHECK(Multiplier::indicator_zero()(1.0) == 0.0);
  const auto tab = Multiplier::tabulated({0.0, 1.0, 3.0}, {0.0, 1.0, 0.0});
  CHECK(tab(0.5) == 0.5);
  CHECK(tab(2.0) == 0.5);
  CHECK(tab(3.5) == 0.0);
  const auto s = Multiplier::bump(0.25, 1.0).dilated(1.0 / 8).of_sqrt();
  CHECK(s(25.0) == b(5.0 / 8));
  CHECK(s.lambda_support().second == doctest::Approx(64.0));
  CHECK_THROWS_AS(Multiplier::bump(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(Multiplier::heat(0.0), DomainError);
  CHECK_THROWS_AS(Multiplier::tabulated({1.0, 1.0}, {0.0, 0.0}), DomainError);
}

TEST_CASE("heat truncation") {
  for (double r2 : {1.0, 0.1, 0.01, 1e-3}) {
    const auto t = heat_truncation(r2);
    CHECK(t.bound < 1e-12);
    CHECK(heat_tail_bound(r2, t.lambda_max - 1) >= 1e-12);
    // the closed-form tail against a direct sum over l
    const double L = std::floor(t.lambda_max);
    double direct = std::exp(-r2 * t.lambda_max) * (L + 1) * (L + 1);
    for (double l = L + 1; l < L + 200.0 / r2; ++l) direct += (2 * l + 1) * std::exp(-r2 * l);
    CHECK(heat_tail_bound(r2, t.lambda_max) == doctest::Approx(direct / (4 * pi)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(heat_truncation(-1.0), DomainError);
}

TEST_CASE("indicator column") {
  const auto c = kernel_column(Multiplier::indicator_zero(), 0.4);
  for (std::size_t i = 0; i < c.grid.size(); i += 7) {
    CHECK(c.row_bandwidth(i) == 0);
    CHECK(c.value(i, 1.3) == doctest::Approx(1 / (4 * pi)).epsilon(1e-14));
  }
  CHECK(c.l1_mass() == doctest::Approx(1.0).epsilon(1e-13));
  const auto n = l1_operator_norm(Multiplier::indicator_zero(), {0.0, 0.7, pi / 2});
  CHECK(n.norm == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(n.doubling_change < 1e-12);
}

TEST_CASE("a bump below the first positive eigenvalue gives a zero column") {
  const auto c = kernel_column(Multiplier::bump(0.01, 0.24), 0.3);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    CHECK(c.row_bandwidth(i) == 0);
    CHECK(c.coeffs[i][0] == 0.0);
  }
}

TEST_CASE("insufficient expansion is a configuration error") {
  try {
    kernel_column(Multiplier::bochner_riesz(1.0, 1.0 / 400), 0.2, {}, 100.0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("l_max = 400") != std::string::npos);
  }
  CHECK_THROWS_AS(kernel_column(Multiplier::heat(1.0), 2.0), DomainError);
}

TEST_CASE("columns are real, even and match the unpaired complex sum") {
  for (const auto& F : sample_multipliers()) {
    const int l_max = static_cast<int>(std::floor(spectral_cutoff(F)));
    if (l_max > 120) continue;
    const auto cols = kernel_columns(F, {0.0, 0.35, -1.1});
    for (const auto& c : cols)
      for (std::size_t i = 3; i < c.grid.size(); i += c.grid.size() / 5) {
        for (double d : {0.0, 0.4, 2.9}) {
          const auto ref = kernel_oracle(F, l_max, c.grid.theta[i], c.theta_prime, d);
          const double scale = std::abs(kernel_oracle(F, l_max, c.theta_prime, c.theta_prime, 0.0)) + 1e-300;
          CHECK(std::abs(ref.imag()) <= 1e-12 * scale);
          CHECK(std::abs(c.value(i, d) - ref.real()) <= 1e-11 * scale);
          CHECK(c.value(i, d) == doctest::Approx(c.value(i, -d)).epsilon(1e-13));
          CHECK(std::abs(kernel_value(F, c.grid.theta[i], c.theta_prime, d) - ref.real()) <= 1e-11 * scale);
        }
        // FFT synthesis against the cosine sum
        const int n = c.phi_points(i);
        const auto s = c.row_samples(i, n);
        for (int j : {0, 1, n / 3, n - 1}) CHECK(std::abs(s[static_cast<std::size_t>(j)] - c.value(i, 2 * pi * j / n)) <= 1e-12 * (std::abs(c.value(i, 0)) + 1e-300));
      }
  }
}

TEST_CASE("mirror columns") {
  const auto F = Multiplier::bochner_riesz(1.0, 1.0 / 200);
  const auto c = kernel_columns(F, {0.6, -0.6});
  const std::size_t n = c[0].grid.size();
  for (std::size_t i = 0; i < n; i += 11) CHECK(c[0].value(i, 0.3) == doctest::Approx(c[1].value(n - 1 - i, 0.3)).epsilon(1e-12));
}

TEST_CASE("three routes to the column L2 norm agree") {
  for (const auto& F : sample_multipliers()) {
    const std::vector<double> tps{0.0, 0.2, 0.9, pi / 2};
    const auto cols = kernel_columns(F, tps);
    const auto sq = column_l2_norms_squared(F, tps, cols[0].lambda_max);
    for (std::size_t k = 0; k < tps.size(); ++k) {
      const double a = cols[k].l2_mass_sampled(), b = cols[k].l2_mass_parseval();
      INFO(F.describe(), " theta' = ", tps[k]);
      CHECK(a == doctest::Approx(sq[k]).epsilon(1e-8));
      CHECK(b == doctest::Approx(sq[k]).epsilon(1e-8));
    }
  }
}

TEST_CASE("heat kernels are Markovian and positive") {
  for (double r2 : {1.0, 0.1, 0.01}) {
    const auto n = l1_operator_norm(Multiplier::heat(r2), {0.0, 0.5, 1.2, pi / 2}, {}, false);
    CHECK(n.norm <= 1.0 + 1e-6);
    CHECK(n.norm >= 1.0 - 1e-6);
    const auto c = kernel_column(Multiplier::heat(r2), 0.5);
    CHECK(c.integral() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.min_value() >= -1e-8 * c.max_value());
    CHECK(c.truncation_bound < 1e-12);
  }
  // large time: only the constant survives
  const auto c = kernel_column(Multiplier::heat(60.0), 0.3);
  CHECK(c.max_value() == doctest::Approx(1 / (4 * pi)).epsilon(1e-12));
  CHECK(triple_norm_parseval(Multiplier::heat(60.0), {0.0, 1.0}, std::sqrt(60.0)).value ==
        doctest::Approx(1 / std::sqrt(4 * pi)).epsilon(1e-12));
}

TEST_CASE("heat semigroup") {
  for (auto [r2, s2] : {std::pair{0.05, 0.03}, std::pair{0.2, 0.1}}) {
    const auto s = heat_semigroup_check(r2, s2, 0.2, 0.5);
    CHECK(s.rel_error < 1e-6);
  }
}

TEST_CASE("heat Gaussian fit") {
  const auto f = heat_column_and_fit(0.01, 0.3);
  CHECK(f.fit.b > 0.0);
  CHECK(std::isfinite(f.fit.C));
  CHECK(f.fit.points > 1000);
  CHECK(f.fit.ls_b > 0.0);
}

TEST_CASE("norm_N2") {
  for (int N : {1, 3, 17}) CHECK(norm_N2([](double) { return 1.0; }, N) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(norm_N2([](double x) { return x; }, 2) == doctest::Approx(std::sqrt(5.0 / 8)).epsilon(1e-15));
  // (1 - lambda)_+ is decreasing: the sup sits at the left end of every cell
  for (int N : {1, 4, 10, 64}) {
    double s = 0;
    for (int i = 1; i <= N; ++i) s += std::pow(1.0 - (i - 1.0) / N, 2);
    CHECK(norm_N2(Multiplier::bochner_riesz(1.0, 1.0), N) == doctest::Approx(std::sqrt(s / N)).epsilon(1e-6));
  }
  // the peak of a bump is caught between samples
  const auto b = Multiplier::bump(0.25, 1.0);
  CHECK(norm_N2(b, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(norm_N2(b, 0), DomainError);
}

TEST_CASE("triple norm of the constant kernel") {
  const auto F = Multiplier::indicator_zero();
  const std::vector<double> tps{0.0, 0.8, pi / 2};
  const double expect = 1 / std::sqrt(4 * pi);
  CHECK(triple_norm(kernel_columns(F, tps), 2, 0.0, 0.0, 1.0).value == doctest::Approx(expect).epsilon(1e-13));
  CHECK(triple_norm_l2(F, tps, 0.0, 1.0).value == doctest::Approx(expect).epsilon(1e-13));
  CHECK(triple_norm_parseval(F, tps, 1.0).value == doctest::Approx(expect).epsilon(1e-13));
  CHECK(triple_norm(kernel_columns(F, tps), 1, 0.0, 0.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("weighted triple norm: sampled and Parseval routes agree") {
  const auto F = Multiplier::bump(0.25, 1.0).dilated(1.0 / 16).of_sqrt();
  const std::vector<double> tps{0.0, 0.05, 0.4};
  const auto cols = kernel_columns(F, tps);
  for (double a : {0.0, 0.25, 0.45}) {
    const auto s = triple_norm(cols, 2, 0.0, a, 1.0 / 16);
    const auto p = triple_norm_l2(F, tps, a, 1.0 / 16);
    for (std::size_t k = 0; k < tps.size(); ++k) CHECK(s.per_column[k] == doctest::Approx(p.per_column[k]).epsilon(1e-8));
  }
  // beta > 0 only increases the norm
  CHECK(triple_norm(cols, 2, 1.0, 0.0, 1.0 / 16).value >= triple_norm(cols, 2, 0.0, 0.0, 1.0 / 16).value);
  CHECK_THROWS_AS(triple_norm(cols, 3, 0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("Sobolev norms") {
  const auto b = Multiplier::bump(0.25, 1.0);
  const auto s0 = sobolev_norm(b, 0.0);
  const double l2 = std::sqrt(harmonics::integrate_adaptive([&](double u) { return b(u) * b(u); }, 0.25, 1.0, 1e-13));
  CHECK(s0.value == doctest::Approx(l2).epsilon(1e-6));
  CHECK(s0.converged);
  for (double t : {0.5, 2.0}) CHECK(sobolev_norm(b.dilated(t), 0.0).value == doctest::Approx(l2 / std::sqrt(t)).epsilon(1e-6));
  const auto s11 = sobolev_norm(b, 1.1), s3 = sobolev_norm(b, 3.0);
  CHECK(s11.converged);
  CHECK(s3.converged);
  CHECK(s0.value < s11.value);
  CHECK(s11.value < s3.value);
  CHECK_THROWS_AS(sobolev_norm(Multiplier::heat(1.0), 1.0), DomainError);
}

TEST_CASE("Mihlin statistic on a short sweep") {
  const auto b = Multiplier::bump(0.25, 1.0);
  const auto m11 = mihlin_statistic(b, 1.1, 24.0);
  const auto m3 = mihlin_statistic(b, 3.0, 24.0);
  CHECK(m11.table.size() == m3.table.size());
  CHECK(m11.sup_ratio > 0.0);
  CHECK(m3.sup_ratio < m11.sup_ratio);
  CHECK(m11.sup_ratio_up_to(12.0) <= m11.sup_ratio);
  for (const auto& row : m11.table) {
    CHECK(row.reach <= 24.0 + 1e-9);
    CHECK(row.t == doctest::Approx(row.c / row.eigen));
  }
  // no eigenvalue inside the rescaled support gives a zero row
  const auto zero = l1_operator_norm(b.dilated(1.2), {0.0, 1.0}, {}, false);
  CHECK(zero.norm == 0.0);
  CHECK_THROWS_AS(mihlin_statistic(Multiplier::bump(0.1, 1.0), 1.1, 10.0), DomainError);
}

TEST_CASE("Bochner-Riesz sweeps") {
  const auto s0 = bochner_riesz_sweep(0.0, {8, 16, 32, 64});
  for (std::size_t k = 1; k < s0.rows.size(); ++k) CHECK(s0.rows[k].value > s0.rows[k - 1].value);
  // below the first positive eigenvalue only the constant term is left
  const auto small = l1_operator_norm(Multiplier::bochner_riesz(0.75, 1.5), {0.0, 0.5}, {}, false);
  CHECK(small.norm == doctest::Approx(1.0).epsilon(1e-13));
  const auto s = bochner_riesz_sweep(0.75, {4, 8, 16});
  for (const auto& r : s.rows) CHECK(r.doubling_change < 0.005);
}

TEST_CASE("weighted Plancherel sweep rows") {
  const auto rows = weighted_plancherel_sweep(builtin_bumps(), {8, 16}, {0.0, 0.45});
  CHECK(rows.size() == 3 * 2 * 2);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
    CHECK(r.ratio == doctest::Approx(r.triple / r.normN2));
  }
}

TEST_CASE("Plancherel sums: enumeration") {
  // brute force over every (l, m) with l <= 12
  auto brute = [](int i, double eps, double alpha, double x, bool high) {
    double s = 0;
    for (int l = 0; l <= 12; ++l)
      for (int m = -l; m <= l; ++m) {
        const double lam = l * (l + 1.0) - m * m;
        if (lam < i * i || lam > (i + 1) * (i + 1)) continue;
        const double v = eval_profile(HarmonicIndex{l, m}, x);
        if (high && m != 0 && std::abs(m) >= eps * (l + 0.5))
          s += std::pow(lam, alpha) * std::pow(std::abs(m), -2 * alpha) * v * v;
        if (!high && std::abs(m) <= eps * (l + 0.5)) s += v * v;
      }
    return high ? std::pow(std::max(1.0 / i, std::abs(x)), 1 - 2 * alpha) * s / i : s / i;
  };
  for (double x : {0.0, 0.3, -0.8, 1.0})
    for (double a : {0.0, 0.25, 0.45}) {
      CHECK(plancherel_sum_high(1, 0.5, a, x) == doctest::Approx(brute(1, 0.5, a, x, true)).epsilon(1e-13));
      CHECK(plancherel_sum_high(2, 0.3, a, x) == doctest::Approx(brute(2, 0.3, a, x, true)).epsilon(1e-13));
    }
  for (double x : {0.0, 0.6, 1.0}) CHECK(plancherel_sum_low(1, 0.5, x) == doctest::Approx(brute(1, 0.5, 0, x, false)).epsilon(1e-13));
  CHECK(plancherel_sum_low(1, 0.5, 1.0) == doctest::Approx(3 / (4 * pi)).epsilon(1e-14));
  CHECK(plancherel_sum_high(1, 0.99, 0.0, 0.2) == 0.0);
  CHECK_THROWS_AS(plancherel_sum_high(1, 0.5, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(plancherel_sum_low(1, 1.0, 0.0), DomainError);
}

TEST_CASE("Plancherel scan matches pointwise sums and is thread independent") {
  set_thread_budget(1);
  const auto a = plancherel_scan(2, 24, 0.5, {0.0, 0.25}, 512);
  set_thread_budget(3);
  const auto b = plancherel_scan(2, 24, 0.5, {0.0, 0.25}, 512);
  set_thread_budget(0);
  REQUIRE(a.size() == 3);
  CHECK(a[2].kind == "low");
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t k = 0; k < a[s].sup.size(); ++k) CHECK(a[s].sup[k] == b[s].sup[k]);
  for (int i : {2, 9, 24}) {
    const auto k = static_cast<std::size_t>(i - 2);
    CHECK(a[1].sup[k] == doctest::Approx(plancherel_sum_high(i, 0.5, 0.25, a[1].argmax_x[k])).epsilon(1e-12));
    CHECK(a[2].sup[k] == doctest::Approx(plancherel_sum_low(i, 0.5, a[2].argmax_x[k])).epsilon(1e-12));
    // the sup dominates other grid points
    CHECK(a[2].sup[k] >= plancherel_sum_low(i, 0.5, 0.37) - 1e-15);
  }
  CHECK(a[0].finite());
}

TEST_CASE("weighted commutation lemma") {
  const std::vector<Coefficient> one{{{1, 1}, 1.0}};
  const auto a0 = weighted_commutation_check(one, 0.0);
  CHECK(a0.lhs == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(a0.rhs == 1.0);
  // |Y~_{1,1}|^2 = 3/(8 pi) cos^2: the tan^2 weight leaves 2 pi * 3/(8 pi) * int x^2 dx = 1/2
  const auto a1 = weighted_commutation_check(one, 1.0);
  CHECK(a1.lhs == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(a1.holds);
  std::mt19937_64 rng(17);
  for (int k = 0; k < 10; ++k) {
    const auto c = random_coefficients(rng, 10, 10);
    double sq = 0;
    for (const auto& t : c) sq += std::norm(t.c);
    CHECK(weighted_commutation_check(c, 0.0).lhs == doctest::Approx(sq).epsilon(1e-9));
    for (double a : {0.3, 0.7}) CHECK(weighted_commutation_check(c, a).holds);
  }
  CHECK_THROWS_AS(weighted_commutation_check({{{2, 0}, 1.0}}, 0.5), PreconditionError);
  CHECK_THROWS_AS(weighted_commutation_check(one, 1.5), DomainError);
}

TEST_CASE("sum-integral lemma") {
  const auto inst = builtin_sum_integral_instances();
  const auto c = sum_integral_check(inst[0]);
  CHECK(c.sum == 11.0);
  CHECK(c.integral == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(c.bound == doctest::Approx(2 * std::numbers::e).epsilon(1e-15));
  const auto e = sum_integral_check(inst[1]);
  double s = 0;
  for (int k = 0; k <= 5; ++k) s += std::exp(k);
  CHECK(e.sum == doctest::Approx(s).epsilon(1e-14));
  CHECK(e.integral == doctest::Approx(std::expm1(5.0)).epsilon(1e-9));
  CHECK(e.ratio == doctest::Approx(s / std::expm1(5.0)).epsilon(1e-9));
  for (const auto& i : inst) CHECK(sum_integral_check(i).holds);
  std::mt19937_64 rng(23);
  for (int k = 0; k < 50; ++k) CHECK(sum_integral_check(random_sum_integral_instance(rng)).holds);

  auto bad = inst[0];
  bad.points = {0.0, 0.5};
  CHECK_THROWS_AS(sum_integral_check(bad), DomainError);
  bad = inst[0];
  bad.b = 0.5;
  CHECK_THROWS_AS(sum_integral_check(bad), DomainError);
  bad = inst[1];
  bad.kappa = 1.0;
  bad.phi = [](double x) { return std::exp(2 * x); };
  bad.dphi = [](double x) { return 2 * std::exp(2 * x); };
  CHECK_THROWS_AS(sum_integral_check(bad), DomainError);
}

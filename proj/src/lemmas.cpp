#include "grushin/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "grushin/spectral.hpp"

namespace grushin::spectral {

CommutationCheck weighted_commutation_check(const std::vector<Coefficient>& coeffs, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  std::map<harmonics::HarmonicIndex, std::complex<double>> merged;
  for (const auto& c : coeffs) {
    harmonics::require_index(c.idx.l, c.idx.m);
    if (c.idx.m == 0) throw PreconditionError("coefficient with m = 0: f must be orthogonal to every Y_{l,0}");
    merged[c.idx] += c.c;
  }
  // group by order; different orders are orthogonal in phi
  std::map<int, std::vector<std::pair<int, std::complex<double>>>> by_m;
  CompensatedSum rhs;
  for (const auto& [idx, c] : merged) {
    by_m[idx.m].push_back({idx.l, c});
    rhs.add(std::pow(eigenvalue(idx), alpha) * std::pow(std::abs(idx.m), -2 * alpha) * std::norm(c));
  }
  // in x = sin theta: |tan theta|^{2 alpha} = (x^2 / (1 - x^2))^alpha, cos theta d theta = dx
  const auto integrand = [&](double x) {
    const double omx2 = (1 - x) * (1 + x);
    if (omx2 <= 0.0) return 0.0;
    double s = 0.0;
    for (const auto& [m, terms] : by_m) {
      std::complex<double> g = 0.0;
      for (const auto& [l, c] : terms) g += c * harmonics::eval_profile(harmonics::HarmonicIndex{l, m}, x);
      s += std::norm(g);
    }
    const double w = alpha == 0.0 ? 1.0 : std::pow(x * x / omx2, alpha);
    return 2 * pi * w * s;
  };
  CommutationCheck out;
  out.lhs = harmonics::integrate_adaptive(integrand, -1.0, 0.0, 1e-12) +
            harmonics::integrate_adaptive(integrand, 0.0, 1.0, 1e-12);
  out.rhs = rhs.value();
  out.holds = out.lhs <= out.rhs * (1 + 1e-6);
  return out;
}

std::vector<Coefficient> random_coefficients(std::mt19937_64& rng, int terms, int l_max) {
  if (l_max < 1 || terms < 1) throw DomainError("random coefficients need terms >= 1 and l_max >= 1");
  if (terms > l_max * (l_max + 2)) throw DomainError("more terms than indices with m != 0");
  std::uniform_int_distribution<int> dl(1, l_max);
  std::normal_distribution<double> g;
  std::set<harmonics::HarmonicIndex> used;
  std::vector<Coefficient> out;
  while (static_cast<int>(out.size()) < terms) {
    const int l = dl(rng);
    std::uniform_int_distribution<int> dm(1, l);
    const int m = dm(rng) * (g(rng) < 0 ? -1 : 1);
    const harmonics::HarmonicIndex idx{l, m};
    if (!used.insert(idx).second) continue;
    const double re = g(rng), im = g(rng);
    out.push_back({idx, {re, im}});
  }
  return out;
}

std::vector<std::pair<std::vector<Coefficient>, double>> builtin_commutation_instances() {
  std::vector<std::pair<std::vector<Coefficient>, double>> out;
  const std::vector<Coefficient> one{{{1, 1}, 1.0}};
  out.push_back({one, 0.0});
  out.push_back({one, 1.0});
  const std::vector<Coefficient> mixed{{{2, 1}, {1.0, 0.5}}, {{3, -2}, -0.7}, {{5, 5}, {0.0, 2.0}}, {{5, 1}, 0.3}};
  for (double a : {0.0, 0.3, 0.7, 1.0}) out.push_back({mixed, a});
  std::mt19937_64 rng(7);
  const auto ten = random_coefficients(rng, 10, 12);
  for (double a : {0.3, 0.7}) out.push_back({ten, a});
  return out;
}

SumIntegralCheck sum_integral_check(const SumIntegralInstance& inst, int samples) {
  const double k = inst.kappa;
  if (!(k >= 1.0)) throw DomainError("kappa must be >= 1");
  if (!(inst.b - inst.a >= 1.0 / k * (1 - 1e-12))) throw DomainError("interval length below 1/kappa");
  std::vector<double> pts = inst.points;
  std::sort(pts.begin(), pts.end());
  for (std::size_t j = 1; j < pts.size(); ++j)
    if (pts[j] - pts[j - 1] < 1.0 / k * (1 - 1e-12)) throw DomainError("point separation below 1/kappa");
  if (samples < 2) throw ConfigError("need at least two samples for the differential inequality");
  for (int j = 0; j < samples; ++j) {
    const double x = inst.a + (inst.b - inst.a) * j / (samples - 1);
    const double f = inst.phi(x);
    if (!(f > 0.0)) throw DomainError("phi must be positive on I");
    if (std::abs(inst.dphi(x)) > k * f * (1 + 1e-9)) throw DomainError("differential inequality |phi'| <= kappa phi fails");
  }
  SumIntegralCheck out;
  CompensatedSum s;
  for (double x : pts)
    if (x >= inst.a && x <= inst.b) s.add(inst.phi(x));
  out.sum = s.value();
  out.integral = harmonics::integrate_adaptive(inst.phi, inst.a, inst.b, 1e-10);
  out.bound = 2 * std::numbers::e * k;
  out.ratio = out.sum / out.integral;
  out.holds = out.sum <= out.bound * out.integral;
  return out;
}

namespace {

std::vector<double> integers(int lo, int hi) {
  std::vector<double> v;
  for (int j = lo; j <= hi; ++j) v.push_back(j);
  return v;
}

}  // namespace

std::vector<SumIntegralInstance> builtin_sum_integral_instances() {
  std::vector<SumIntegralInstance> out;
  out.push_back({"constant", [](double) { return 1.0; }, [](double) { return 0.0; }, integers(0, 10), 0.0, 10.0, 1.0});
  out.push_back({"exp", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }, integers(0, 5), 0.0,
                 5.0, 1.0});
  out.push_back({"exp_decay", [](double x) { return std::exp(-x); }, [](double x) { return -std::exp(-x); },
                 integers(0, 5), 0.0, 5.0, 1.0});
  // steep exponential with the sample points at the right end of their cells
  out.push_back({"steep", [](double x) { return std::exp(4 * x); }, [](double x) { return 4 * std::exp(4 * x); },
                 {0.25, 0.5, 0.75, 1.0}, 0.0, 1.0, 4.0});
  out.push_back({"short_interval", [](double x) { return std::exp(-3 * x); },
                 [](double x) { return -3 * std::exp(-3 * x); }, {0.0}, 0.0, 1.0 / 3, 3.0});
  out.push_back({"oscillating", [](double x) { return std::exp(std::sin(2 * x)); },
                 [](double x) { return 2 * std::cos(2 * x) * std::exp(std::sin(2 * x)); }, integers(-6, 6), -6.0, 6.0,
                 2.0});
  return out;
}

SumIntegralInstance random_sum_integral_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double kappa = 1.0 + 7.0 * U(rng);
  const double omega = 0.2 + 5.0 * U(rng);
  const double psi = 2 * pi * U(rng);
  const double u = 2.0 * U(rng) - 1.0;
  const double a = -5.0 + 10.0 * U(rng);
  const double len = (1.0 + 20.0 * U(rng)) / kappa;
  SumIntegralInstance inst;
  inst.name = "random";
  inst.kappa = kappa;
  inst.a = a;
  inst.b = a + len;
  inst.phi = [=](double x) { return std::exp(kappa * u * std::sin(omega * x + psi) / omega); };
  inst.dphi = [=](double x) {
    return kappa * u * std::cos(omega * x + psi) * std::exp(kappa * u * std::sin(omega * x + psi) / omega);
  };
  // separated points: gaps in [1/kappa, 3/kappa], starting a little before I
  double x = a - U(rng) / kappa;
  while (x <= inst.b + 1.0 / kappa) {
    inst.points.push_back(x);
    x += (1.0 + 2.0 * U(rng)) / kappa;
  }
  return inst;
}

}  // namespace grushin::spectral

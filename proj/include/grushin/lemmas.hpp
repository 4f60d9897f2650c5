#ifndef GRUSHIN_LEMMAS_HPP
#define GRUSHIN_LEMMAS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "grushin/harmonics.hpp"

namespace grushin::spectral {

struct Coefficient {
  harmonics::HarmonicIndex idx;
  std::complex<double> c;
};

/// lhs = integral of |tan theta|^{2 alpha} |f|^2 dmu for f = sum c Y_{l,m};
/// rhs = sum lambda^alpha |m|^{-2 alpha} |c|^2.
struct CommutationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;  // lhs <= rhs (1 + 1e-6)
};

/// Repeated indices are merged. Throws PreconditionError for an m = 0 term,
/// DomainError for alpha outside [0, 1].
CommutationCheck weighted_commutation_check(const std::vector<Coefficient>& coeffs, double alpha);

/// `terms` distinct indices with 1 <= |m| <= l <= l_max and Gaussian coefficients.
std::vector<Coefficient> random_coefficients(std::mt19937_64& rng, int terms, int l_max);

struct SumIntegralInstance {
  std::string name;
  std::function<double(double)> phi, dphi;
  std::vector<double> points;
  double a = 0.0, b = 0.0;
  double kappa = 1.0;
};

struct SumIntegralCheck {
  double sum = 0.0;
  double integral = 0.0;
  double ratio = 0.0;
  double bound = 0.0;  // 2 e kappa
  bool holds = false;
};

/// Checks the preconditions (kappa >= 1, |I| >= 1/kappa, separation >= 1/kappa,
/// phi > 0 and |phi'| <= kappa phi on `samples` points of I) and throws
/// DomainError naming the violated one.
SumIntegralCheck sum_integral_check(const SumIntegralInstance& inst, int samples = 2001);

/// The fixed instances: constants, e^{x}, e^{-x}, and a few oscillating ones.
std::vector<SumIntegralInstance> builtin_sum_integral_instances();

/// phi = exp(kappa u sin(omega x + psi) / omega), |u| <= 1, on a random interval
/// with a random 1/kappa-separated point set.
SumIntegralInstance random_sum_integral_instance(std::mt19937_64& rng);

/// Built-in coefficient sets for the commutation check, paired with alpha.
std::vector<std::pair<std::vector<Coefficient>, double>> builtin_commutation_instances();

}  // namespace grushin::spectral

#endif  // GRUSHIN_LEMMAS_HPP

#ifndef GRUSHIN_DETAIL_ENGINE_HPP
#define GRUSHIN_DETAIL_ENGINE_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "grushin/spectral.hpp"

namespace grushin::spectral::detail {

/// Order-m cosine coefficients h_m(theta_i; theta'_k) for rows
/// i_lo .. i_lo + h.rows() - 1; rows outside are negligible.
struct OrderBlock {
  int m = 0;
  std::size_t i_lo = 0;
  Eigen::MatrixXd h;
};

/// lambda_max, or the cutoff of F when negative; ConfigError when a compactly
/// supported F reaches beyond lambda_max.
double resolve_cutoff(const Multiplier& F, double lambda_max);

/// Blocks for m = 0..floor(lambda_max) in increasing m; orders whose
/// coefficients are all below `negligible` are skipped.
void assemble_orders(const Multiplier& F, double lambda_max, const ThetaGrid& g, const std::vector<double>& theta_primes,
                     double negligible, const std::function<void(const OrderBlock&)>& sink);

/// sum_m (2 - [m = 0]) h_m^2 per (theta', row): the exact phi integral of K^2 / (2 pi).
std::vector<std::vector<double>> parseval_rowsums(const Multiplier& F, double lambda_max, const ThetaGrid& g,
                                                  const std::vector<double>& theta_primes, double negligible);

}  // namespace grushin::spectral::detail

#endif  // GRUSHIN_DETAIL_ENGINE_HPP

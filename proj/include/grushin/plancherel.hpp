#ifndef GRUSHIN_PLANCHEREL_HPP
#define GRUSHIN_PLANCHEREL_HPP

#include <string>
#include <vector>

namespace grushin::spectral {

/// (1/i) max{1/i, |x|}^{1-2 alpha} sum of lambda^alpha |m|^{-2 alpha} |Y~_{l,m}(x)|^2
/// over l, both signs of m with |m| >= eps (l + 1/2) and lambda in [i^2, (i+1)^2].
/// Direct enumeration. Requires i >= 1, eps in (0, 1), alpha in [0, 1/2).
double plancherel_sum_high(int i, double eps, double alpha, double x);

/// (1/i) sum of |Y~_{l,m}(x)|^2 over |m| <= eps (l + 1/2), lambda in [i^2, (i+1)^2].
double plancherel_sum_low(int i, double eps, double x);

struct PlancherelBlock {
  int i_lo = 0, i_hi = 0;  // inclusive
  double sup = 0.0;
};

struct PlancherelScan {
  std::string kind;  // "high" or "low"
  double eps = 0.0;
  double alpha = 0.0;
  std::vector<int> i;
  std::vector<double> sup, argmax_x;
  std::vector<PlancherelBlock> blocks;  // dyadic [2^k, 2^{k+1})

  bool finite() const;
  /// max / min of the block sups over blocks starting at i >= i_from.
  double variation(int i_from = 8) const;
};

/// The abscissae of a scan: x_uniform + 1 uniform points on [0, 1] and a
/// geometric cluster 2^{-k} toward 0 (the sums are even in x).
std::vector<double> plancherel_scan_grid(int x_uniform);

/// sup over the x grid of both sums for i = i_min..i_max in one pass over the
/// recurrences: one "high" scan per alpha, then the "low" scan.
std::vector<PlancherelScan> plancherel_scan(int i_min, int i_max, double eps, const std::vector<double>& alphas,
                                            int x_uniform = 4096);

}  // namespace grushin::spectral

#endif  // GRUSHIN_PLANCHEREL_HPP

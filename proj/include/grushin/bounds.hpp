#ifndef GRUSHIN_BOUNDS_HPP
#define GRUSHIN_BOUNDS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grushin/harmonics.hpp"

namespace grushin::bounds {

using harmonics::HarmonicIndex;

enum class Family {
  classical_i,
  classical_ii,
  classical_iii,
  hermite_regime_main,
  hermite_regime_tail,
  bessel_regime_main,
  bessel_regime_tail,
  combined,
};

std::string to_string(Family f);
/// Throws ConfigError on an unknown name.
Family family_from_string(const std::string& name);
const std::vector<Family>& all_families();

/// A pointwise bound shape with its constant set to 1.
struct Envelope {
  Family family = Family::combined;
  double epsilon = 0.5;  // regime split |m| vs epsilon [l]
  double K = 2.0;        // hermite tail: |x| >= K a
  double c = 0.1;        // hermite tail: exp(-c l x^2)
};

/// (a, b) with b = |m| / (l + 1/2), a = sqrt(1 - b^2).
std::pair<double, double> critical_points(HarmonicIndex idx);

/// Empty when the regime guard of the family holds at (idx, x), otherwise
/// the name of the violated guard.
std::optional<std::string> violated_guard(const Envelope& e, HarmonicIndex idx, double x);

/// Right-hand side of the bound with constant 1. Throws PreconditionError
/// naming the guard when (idx, x) is outside the family's regime.
double envelope_value(const Envelope& e, HarmonicIndex idx, double x);

/// |Y~_{l,m}(x)| / envelope, computed in log form so tails never underflow.
double pointwise_ratio(const Envelope& e, HarmonicIndex idx, double x);

struct GridSpec {
  int chebyshev_points = 512;   // Chebyshev-Lobatto points on [-1, 1]; the nonnegative half is used
  int cluster_points = 128;     // per critical point, split evenly between the two sides
  double cluster_halfwidth = 0.1;
  double cluster_min_offset = 1e-5;
  int anchors_per_order = 12;   // degrees whose critical point gets a cluster, per order m
  int pole_points = 48;         // geometric points approaching x = 1
  int density = 1;              // multiplies every point count (grid-doubling checks)
};

struct Block {
  int l_lo = 0;
  int l_hi = 0;  // inclusive
  bool empty = true;
  double sup_ratio = 0.0;
  HarmonicIndex argmax{};
  double argmax_x = 0.0;
};

struct EnvelopeReport {
  Envelope envelope;
  int l_max = 0;
  GridSpec grid;
  std::vector<Block> blocks;

  /// max/min of sup ratios over nonempty blocks with l_lo >= l_from.
  double variation(int l_from) const;
  double overall_sup() const;
};

/// Dyadic blocks {0}, [1,2), [2,4), ..., with the last block closed at l_max.
std::vector<Block> dyadic_blocks(int l_max);

/// Per-block sup of |Y~| / envelope over every regime-valid (l, m, x) with
/// l <= l_max, m >= 0 (|Y~_{l,-m}| = |Y~_{l,m}|) and x >= 0 (parity). All
/// envelopes are scanned in one pass over the recurrences.
std::vector<EnvelopeReport> sup_ratio_scan(const std::vector<Envelope>& envelopes, int l_max, const GridSpec& grid = {});
EnvelopeReport sup_ratio_scan(const Envelope& envelope, int l_max, const GridSpec& grid = {});

/// The nonnegative abscissae scanned for order m.
std::vector<double> scan_grid(int m, int l_max, const GridSpec& grid);

struct TailTrial {
  double K = 0.0;
  double c = 0.0;
  std::vector<Block> blocks;
  double measured_C = 0.0;  // overall sup over blocks with l >= 1
  bool holds = false;
};

struct TailSearch {
  double epsilon = 0.5;
  int l_max = 0;
  int l_stable_from = 64;
  std::vector<TailTrial> trials;
  std::vector<std::pair<double, double>> pareto;  // (K, c) with no holding pair having smaller K and larger c
};

/// Hermite-regime tail |x|^{-1/2} exp(-c l x^2) for |x| >= K a over a (K, c)
/// grid. A trial holds when no block from l_stable_from upward exceeds twice
/// the first such block, i.e. the measured constant does not drift with l.
TailSearch hermite_tail_search(double epsilon, int l_max, const std::vector<double>& Ks, const std::vector<double>& cs,
                               int l_stable_from = 64, const GridSpec& grid = {});

}  // namespace grushin::bounds

#endif  // GRUSHIN_BOUNDS_HPP

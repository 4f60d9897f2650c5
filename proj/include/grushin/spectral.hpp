#ifndef GRUSHIN_SPECTRAL_HPP
#define GRUSHIN_SPECTRAL_HPP

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grushin/harmonics.hpp"

namespace grushin::spectral {

using harmonics::HarmonicIndex;

/// lambda_{l,m} = l(l+1) - m^2. Throws DomainError for |m| > l.
double eigenvalue(HarmonicIndex idx);

/// Largest l with l(l+1) - m^2 <= lambda_max, or m - 1 when there is none.
int degree_limit(int m, double lambda_max);

/// Smallest positive sqrt(lambda) over l <= l_max.
double smallest_positive_root_eigenvalue(int l_max);

enum class MultiplierKind { bump, bochner_riesz, heat, indicator_zero, tabulated };

std::string to_string(MultiplierKind k);

/// A spectral multiplier F evaluated at lambda >= 0. The base profile g(u) is
/// applied to u = scale * lambda, or u = scale * sqrt(lambda) for the F(sqrt L)
/// calculus.
struct Multiplier {
  MultiplierKind kind = MultiplierKind::bump;
  double a = 0.25, b = 1.0;  // bump support
  double delta = 1.0;        // Bochner-Riesz: g(u) = (1 - u)_+^delta
  double r2 = 1.0;           // heat: g(u) = exp(-r2 u)
  std::vector<double> knots, values;  // tabulated: piecewise linear, zero outside the knots
  double scale = 1.0;
  bool sqrt_argument = false;

  static Multiplier bump(double a, double b);
  static Multiplier bochner_riesz(double delta, double t);
  static Multiplier heat(double r2);
  static Multiplier indicator_zero();
  static Multiplier tabulated(std::vector<double> knots, std::vector<double> values);

  /// F(s .) for the same profile.
  Multiplier dilated(double s) const;
  /// Same profile read as a function of sqrt(lambda).
  Multiplier of_sqrt() const;

  double profile(double u) const;
  double operator()(double lambda) const;

  /// Profile support [u_lo, u_hi] (u_hi = +inf for heat).
  std::pair<double, double> profile_support() const;
  /// Smallest and largest lambda where F can be nonzero.
  std::pair<double, double> lambda_support() const;
  /// Points of the profile where the sup over a cell can be attained inside it.
  std::vector<double> profile_critical_points() const;

  std::string describe() const;
};

/// Certified truncation of the heat expansion: every index with lambda >
/// lambda_max contributes at most `bound` to sum exp(-r2 lambda) |Y~(x) Y~(x')|,
/// using min_m lambda_{l,m} = l and the addition theorem.
struct HeatTruncation {
  double lambda_max = 0.0;
  double bound = 0.0;
};
HeatTruncation heat_truncation(double r2, double tol = 1e-12);
double heat_tail_bound(double r2, double lambda_max);

/// Largest eigenvalue that the kernel expansion of F must include.
double spectral_cutoff(const Multiplier& F, double heat_tol = 1e-12);

// ---------------------------------------------------------------------------
// Kernel columns.

struct ColumnGridSpec {
  int points_per_panel = 8;
  double panel_scale = 1.5;  // theta panel width = min(max_panel, panel_scale / sqrt(lambda_max + 1))
  double max_panel = 0.1;
  int min_phi_points = 64;
  int phi_oversample = 8;  // per-row phi rule has >= phi_oversample (M_row + 1) points
  double negligible = 1e-20;
  int density = 1;  // multiplies theta nodes and phi points (grid doubling)
};

/// Composite Gauss rule in theta over [-pi/2, pi/2], symmetric about 0.
struct ThetaGrid {
  std::vector<double> theta, weight, x, cos_theta;
  std::size_t size() const { return theta.size(); }
};
ThetaGrid make_theta_grid(double lambda_max, const ColumnGridSpec& spec);

/// K(N(theta, phi' + dphi), N(theta', phi')) for one theta', stored per theta
/// row as cosine coefficients: K = h_0 + 2 sum_{m >= 1} h_m cos(m dphi).
struct KernelColumn {
  double theta_prime = 0.0;
  Multiplier multiplier;
  double lambda_max = 0.0;
  int l_max = 0;
  double truncation_bound = 0.0;
  ColumnGridSpec spec;
  ThetaGrid grid;
  std::vector<std::vector<double>> coeffs;

  int row_bandwidth(std::size_t row) const { return static_cast<int>(coeffs[row].size()) - 1; }
  /// Points of the uniform phi rule used for a row (a power of two).
  int phi_points(std::size_t row) const;
  double value(std::size_t row, double dphi) const;
  /// K at dphi = 2 pi j / n, j = 0..n-1; n must be even and exceed twice the bandwidth.
  std::vector<double> row_samples(std::size_t row, int n) const;

  /// Integral of |K| dmu on the stored grids.
  double l1_mass() const;
  /// Integral of K^2 dmu by sampling the phi rule.
  double l2_mass_sampled() const;
  /// Integral of K^2 dmu with the phi integral done exactly (Parseval per row).
  double l2_mass_parseval() const;
  /// Integral of K dmu.
  double integral() const;
  double min_value() const;
  double max_value() const;
};

/// Columns for several theta' at once (the recurrences in theta are shared).
std::vector<KernelColumn> kernel_columns(const Multiplier& F, const std::vector<double>& theta_primes,
                                         const ColumnGridSpec& spec = {}, double lambda_max = -1.0);
KernelColumn kernel_column(const Multiplier& F, double theta_prime, const ColumnGridSpec& spec = {},
                           double lambda_max = -1.0);

/// sum |F(lambda)|^2 |Y~(sin theta')|^2 over every index with lambda <= lambda_max
/// and both signs of m: the squared L2 norm of a column.
std::vector<double> column_l2_norms_squared(const Multiplier& F, const std::vector<double>& theta_primes,
                                            double lambda_max = -1.0);

/// K(N(theta, dphi), N(theta', 0)) by direct summation over the indices.
double kernel_value(const Multiplier& F, double theta, double theta_prime, double dphi, double lambda_max = -1.0);

/// theta' >= 0 (columns at -theta' are mirror images): uniform points
/// (pi/2) j / uniform, j = 0..uniform, plus a geometric cluster
/// scale * 2^k in (0, 0.3) with scale = 1 / sqrt(lambda_max + 1).
std::vector<double> theta_prime_grid(double lambda_max, int uniform = 16);

// ---------------------------------------------------------------------------
// Norms.

struct ColumnSup {
  double value = 0.0;
  double argmax_theta = 0.0;
  std::vector<double> per_column;
};

/// sup over theta' of the column L1 mass, with a grid-doubling check on the
/// maximizing column.
struct L1NormResult {
  double norm = 0.0;
  double argmax_theta = 0.0;
  std::vector<double> theta_primes, masses;
  double doubled = 0.0;
  double doubling_change = 0.0;
  double lambda_max = 0.0;
};
L1NormResult l1_operator_norm(const Multiplier& F, const std::vector<double>& theta_primes,
                              const ColumnGridSpec& spec = {}, bool doubling_check = true);

/// (1/N sum_i sup_{[(i-1)/N, i/N]} |F|^2)^{1/2} for F on [0, 1], with 64 samples
/// per cell, the cell endpoints and the given interior critical points.
double norm_N2(const std::function<double(double)>& F, int N, const std::vector<double>& critical_points = {},
               int samples_per_cell = 64);
/// The multiplier evaluated at lambda in [0, 1].
double norm_N2(const Multiplier& F, int N);

/// sup over the columns of V(z', r)^{1/p'} ||(1 + Phi/r)^beta (1 + w_r)^alpha K||_{L^p}
/// on the sampled grids. p is 1 or 2.
ColumnSup triple_norm(const std::vector<KernelColumn>& columns, int p, double beta, double alpha, double r);

/// p = 2, beta = 0 without storing columns: the phi integral is exact by
/// Parseval and the theta integral uses the column grid.
ColumnSup triple_norm_l2(const Multiplier& F, const std::vector<double>& theta_primes, double alpha, double r,
                         const ColumnGridSpec& spec = {});

/// p = 2, alpha = beta = 0 from column_l2_norms_squared.
ColumnSup triple_norm_parseval(const Multiplier& F, const std::vector<double>& theta_primes, double r);

/// ||(1 + xi^2)^{s/2} F^||_{L^2} with the unitary Fourier transform, by FFT on
/// a padded uniform grid; reports the doubled-grid value as well.
struct SobolevResult {
  double value = 0.0;
  double doubled = 0.0;
  int samples = 0;
  bool converged = false;  // < 1% change under doubling
};
SobolevResult sobolev_norm(const Multiplier& F, double s, int min_samples = 1 << 14, double pad_factor = 8.0);

// ---------------------------------------------------------------------------
// Sweeps.

struct HeatFit {
  double C = 0.0;        // max of |K| V over points with Phi <= r
  double b = 0.0;        // largest b with log|K| <= log C - log V - b Phi^2 / r^2 on the grid
  double ls_logC = 0.0;  // least-squares fit of log(|K| V) against Phi^2 / r^2
  double ls_b = 0.0;
  double ls_residual = 0.0;
  std::size_t points = 0;
  double min_over_max = 0.0;  // positivity: min K / max K
};
struct HeatColumnFit {
  KernelColumn column;
  HeatFit fit;
};
HeatColumnFit heat_column_and_fit(double r2, double theta_prime, const ColumnGridSpec& spec = {});

struct SemigroupCheck {
  double composed = 0.0;
  double direct = 0.0;
  double rel_error = 0.0;
};
/// K_{r2+s2}(z, z') against the quadrature of K_{r2}(z, w) K_{s2}(w, z') dmu(w),
/// z = (theta_z, 2 pi shift / n), z' = (theta', 0).
SemigroupCheck heat_semigroup_check(double r2, double s2, double theta_z, double theta_prime, int shift = 3,
                                    const ColumnGridSpec& spec = {});

struct SweepRow {
  double parameter = 0.0;
  double value = 0.0;
  double argmax_theta = 0.0;
  double doubling_change = 0.0;
  double lambda_max = 0.0;
};

struct BochnerRieszSweep {
  double delta = 0.0;
  std::vector<SweepRow> rows;  // parameter = R
  double max_over_min = 0.0;
  bool exceeds_3 = false;
};
/// l1_operator_norm of (1 - lambda / R^2)_+^delta for each R. The expansion
/// runs to lambda = R^2, hence to degree R^2.
BochnerRieszSweep bochner_riesz_sweep(double delta, const std::vector<double>& Rs, int theta_uniform = 16,
                                      const ColumnGridSpec& spec = {});

struct MihlinRow {
  double t = 0.0;
  double eigen = 0.0;  // eigenvalue the sample is tied to
  double c = 0.0;      // t = c / eigen
  double reach = 0.0;  // largest eigenvalue in the support of F(t .)
  double norm = 0.0;
  double ratio = 0.0;
  double argmax_theta = 0.0;
  double doubling_change = 0.0;
};
struct MihlinResult {
  double s = 0.0;
  double sobolev = 0.0;
  double sup_ratio = 0.0;
  std::vector<MihlinRow> table;
  /// sup of the ratio over rows with reach <= lambda_cap.
  double sup_ratio_up_to(double lambda_cap) const;
};
/// t = c / lambda for every distinct eigenvalue lambda and c in `cs`, kept when
/// the support of F(t .) lies in [0, lambda_reach]. F must be supported in [1/4, 1].
MihlinResult mihlin_statistic(const Multiplier& F, double s, double lambda_reach,
                              const std::vector<double>& cs = {0.3, 0.5, 0.8, 1.0}, int theta_uniform = 16,
                              const ColumnGridSpec& spec = {}, bool doubling_check = false);

/// Rows of the weighted Plancherel sweep: triple_norm(F(sqrt L), 2, 0, alpha,
/// 1/N) / ||F(N .)||_{N,2} with F(N .) the given profile on [0, 1].
struct PlancherelRow {
  std::string multiplier;
  int N = 0;
  double alpha = 0.0;
  double triple = 0.0;
  double normN2 = 0.0;
  double ratio = 0.0;
  double argmax_theta = 0.0;
};
std::vector<PlancherelRow> weighted_plancherel_sweep(const std::vector<Multiplier>& profiles, const std::vector<int>& Ns,
                                                     const std::vector<double>& alphas, int theta_uniform = 16,
                                                     const ColumnGridSpec& spec = {});

/// The built-in C_c^infty profiles on [0, 1] used by the weighted sweeps.
std::vector<Multiplier> builtin_bumps();

}  // namespace grushin::spectral

#endif  // GRUSHIN_SPECTRAL_HPP

#ifndef GRUSHIN_HARMONICS_HPP
#define GRUSHIN_HARMONICS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "grushin/common.hpp"

namespace grushin::harmonics {

/// A pair (l, m) with |m| <= l.
struct HarmonicIndex {
  int l = 0;
  int m = 0;

  /// Throws DomainError unless l >= 0 and |m| <= l.
  static HarmonicIndex checked(int l, int m);

  /// l(l+1) - m^2.
  double lambda() const { return static_cast<double>(l) * (l + 1) - static_cast<double>(m) * m; }
  /// [l] = l + 1/2.
  double halfdeg() const { return l + 0.5; }
  double b() const { return std::abs(m) / halfdeg(); }
  double a() const {
    const double bb = b();
    return std::sqrt((1.0 - bb) * (1.0 + bb));
  }

  friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
  friend auto operator<=>(const HarmonicIndex&, const HarmonicIndex&) = default;
};

void require_index(int l, int m);
void require_unit_interval(double x, const char* what = "x");

/// Sign and natural log of the magnitude of a real number. Zero is
/// represented by sign 0 and log_magnitude = -inf.
struct ScaledReal {
  int sign = 0;
  double log_magnitude = -std::numeric_limits<double>::infinity();

  static ScaledReal from_double(double v);
  /// Plain value; underflows to zero and overflows to +-inf outside the
  /// double range.
  double to_double() const;
  bool is_zero() const { return sign == 0; }
};

// ---------------------------------------------------------------------------
// Classical orthogonal polynomials (three-term recurrences).

/// Legendre polynomial P_l(x).
template <class T>
T legendre_poly(int l, T x) {
  if (l < 0) throw DomainError("legendre_poly: degree must be nonnegative");
  if (!(std::abs(x) <= T(1))) throw DomainError("legendre_poly: x outside [-1, 1]");
  if (l == 0) return T(1);
  T p0 = T(1), p1 = x;
  for (int k = 1; k < l; ++k) {
    const T p2 = (T(2 * k + 1) * x * p1 - T(k) * p0) / T(k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// Derivative P_l'(x) together with P_l(x), for Newton iterations.
template <class T>
void legendre_poly_and_derivative(int n, T x, T& p, T& dp) {
  T p0 = T(1), p1 = x;
  if (n == 0) {
    p = T(1);
    dp = T(0);
    return;
  }
  for (int k = 1; k < n; ++k) {
    const T p2 = (T(2 * k + 1) * x * p1 - T(k) * p0) / T(k + 1);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = T(n) * (x * p1 - p0) / (x * x - T(1));
}

/// Jacobi polynomial P_k^{(alpha, beta)}(x), alpha, beta > -1.
template <class T>
T jacobi_poly(int k, T alpha, T beta, T x) {
  if (k < 0) throw DomainError("jacobi_poly: degree must be nonnegative");
  if (!(alpha > T(-1)) || !(beta > T(-1))) throw DomainError("jacobi_poly: alpha and beta must exceed -1");
  if (!(std::abs(x) <= T(1))) throw DomainError("jacobi_poly: x outside [-1, 1]");
  if (k == 0) return T(1);
  T p0 = T(1);
  T p1 = (alpha + T(1)) + (alpha + beta + T(2)) * (x - T(1)) / T(2);
  const T ab = alpha + beta;
  for (int n = 2; n <= k; ++n) {
    const T c = T(2 * n) + ab;
    const T a1 = T(2 * n) * (T(n) + ab) * (c - T(2));
    const T a2 = (c - T(1)) * (c * (c - T(2)) * x + alpha * alpha - beta * beta);
    const T a3 = T(2) * (T(n) + alpha - T(1)) * (T(n) + beta - T(1)) * c;
    const T p2 = (a2 * p1 - a3 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// ---------------------------------------------------------------------------
// Normalized profiles  Y~_{l,m}(x) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(x).

/// Fixed-m upward recurrence in l on the normalized profile, carried in
/// mantissa/exponent form so that the (1-x^2)^{m/2} seed never underflows.
/// Handles m >= 0; negative orders are obtained from the parity identity.
template <class T>
class ProfileRecurrence {
 public:
  ProfileRecurrence(int m, T x) : ProfileRecurrence(m, x, seed_log_for(m)) {}

  /// `seed_log` is log c_m as returned by profile_seed_logs.
  ProfileRecurrence(int m, T x, T seed_log) : m_(m), l_(m), x_(x) {
    using std::log;
    const T omx2 = (T(1) - x) * (T(1) + x);
    if (m > 0 && omx2 <= T(0)) {
      cur_ = T(0);
      return;
    }
    const T log_seed = seed_log + (m > 0 ? T(0.5) * T(m) * log(omx2) : T(0));
    const T e = std::floor(log_seed / T(std::numbers::ln2));
    exponent_ = static_cast<long>(e);
    using std::exp;
    cur_ = exp(log_seed - e * T(std::numbers::ln2));
    if (m % 2 != 0) cur_ = -cur_;
  }

  int degree() const { return l_; }

  void advance() {
    const int L = l_ + 1;
    using std::sqrt;
    const T alpha = sqrt(T(2 * L - 1) * T(2 * L + 1) / (T(L - m_) * T(L + m_)));
    const T next = alpha * (x_ * cur_ - prev_ * inv_alpha_prev_);
    inv_alpha_prev_ = T(1) / alpha;
    prev_ = cur_;
    cur_ = next;
    l_ = L;
    renormalize();
  }

  void advance_to(int l) {
    while (l_ < l) advance();
  }

  /// Value; may underflow to zero.
  T value() const {
    using std::ldexp;
    return ldexp(cur_, static_cast<int>(std::clamp<long>(exponent_, -100000, 100000)));
  }

  ScaledReal scaled() const {
    ScaledReal s;
    if (cur_ == T(0)) return s;
    using std::log;
    s.sign = cur_ > T(0) ? 1 : -1;
    s.log_magnitude = static_cast<double>(log(std::abs(cur_))) + static_cast<double>(exponent_) * std::numbers::ln2;
    return s;
  }

 private:
  static T seed_log_for(int m) {
    using std::log;
    // log c_m accumulated term by term, in the same order as profile_seed_logs
    T log_prod = T(0);
    for (int k = 1; k <= m; ++k) log_prod += log(T(2 * k - 1) / T(2 * k));
    return T(0.5) * (log(T(2 * m + 1) / (T(4) * T(pi))) + log_prod);
  }

  void renormalize() {
    const T big = std::ldexp(T(1), 300);
    const T small = std::ldexp(T(1), -300);
    const T mx = std::max(std::abs(cur_), std::abs(prev_));
    if (mx > big) {
      cur_ = std::ldexp(cur_, -300);
      prev_ = std::ldexp(prev_, -300);
      exponent_ += 300;
    } else if (mx > T(0) && mx < small) {
      cur_ = std::ldexp(cur_, 300);
      prev_ = std::ldexp(prev_, 300);
      exponent_ -= 300;
    }
  }

  int m_;
  int l_;
  T x_;
  T prev_ = T(0);
  T cur_ = T(0);
  T inv_alpha_prev_ = T(0);
  long exponent_ = 0;
};

/// Y~_{l,m}(x) in (sign, log-magnitude) form. Never over- or underflows.
template <class T = double>
ScaledReal eval_profile_scaled(HarmonicIndex idx, T x) {
  require_index(idx.l, idx.m);
  require_unit_interval(static_cast<double>(x));
  const int am = std::abs(idx.m);
  ProfileRecurrence<T> rec(am, x);
  rec.advance_to(idx.l);
  ScaledReal s = rec.scaled();
  // Y~_{l,-m} = (-1)^m Y~_{l,m}
  if (idx.m < 0 && am % 2 != 0) s.sign = -s.sign;
  return s;
}

/// Y~_{l,m}(x); underflows gracefully to zero.
template <class T = double>
T eval_profile(HarmonicIndex idx, T x) {
  require_index(idx.l, idx.m);
  require_unit_interval(static_cast<double>(x));
  const int am = std::abs(idx.m);
  ProfileRecurrence<T> rec(am, x);
  rec.advance_to(idx.l);
  T v = rec.value();
  if (idx.m < 0 && am % 2 != 0) v = -v;
  return v;
}

/// Unnormalized associated Legendre (Ferrers) function P_l^m(x) with the
/// (-1)^m phase. Overflows to +-inf for large l; intended for moderate
/// degrees and cross-checks.
double assoc_legendre(int l, int m, double x);

/// sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) in log form.
double log_profile_normalization(int l, int m);

/// log c_m for m = 0..m_max where Y~_{m,m}(x) = (-1)^m c_m (1-x^2)^{m/2}.
std::vector<double> profile_seed_logs(int m_max);

/// Vectorized fixed-m recurrence over a batch of abscissae. Each lane keeps
/// its own binary exponent; `values()` is the descaled value (zero where it
/// underflows), `log_abs(i)` the exact log-magnitude.
class DegreeSweep {
 public:
  DegreeSweep(int m, const Eigen::ArrayXd& xs, double seed_log);

  int degree() const { return l_; }
  int order() const { return m_; }
  const Eigen::ArrayXd& values() const { return value_; }
  double log_abs(Eigen::Index i) const;
  /// value = mantissa * 2^exponent, lane by lane.
  const Eigen::ArrayXd& mantissas() const { return cur_; }
  const Eigen::ArrayXd& exponents() const { return exponent_; }
  void advance();

 private:
  void renormalize();

  int m_;
  int l_;
  Eigen::ArrayXd x_, prev_, cur_, next_, exponent_, scale_, value_;
  double inv_alpha_prev_ = 0.0;
  int since_check_ = 0;
};

// ---------------------------------------------------------------------------
// Hermite and Bessel functions.

/// Orthonormal Hermite function h_nu(x) = (nu! 2^nu sqrt(pi))^{-1/2} H_nu(x) e^{-x^2/2}.
template <class T = double>
T hermite(int nu, T x) {
  if (nu < 0) throw DomainError("hermite: order must be nonnegative");
  using std::exp;
  using std::sqrt;
  // h_0 = pi^{-1/4} e^{-x^2/2}, carried as mantissa * e^{shift}.
  T log_scale = -x * x / T(2) - T(0.25) * std::log(T(pi));
  T h0 = T(1), h1 = sqrt(T(2)) * x;
  if (nu == 0) return exp(log_scale);
  for (int n = 1; n < nu; ++n) {
    const T h2 = sqrt(T(2) / T(n + 1)) * x * h1 - sqrt(T(n) / T(n + 1)) * h0;
    h0 = h1;
    h1 = h2;
    const T mx = std::max(std::abs(h0), std::abs(h1));
    if (mx > T(1e150)) {
      h0 /= T(1e150);
      h1 /= T(1e150);
      log_scale += T(150) * std::log(T(10));
    }
  }
  return h1 * exp(log_scale);
}

/// Bessel function of the first kind J_nu(z) for nu >= -1/2.
double bessel_j(double nu, double z);

/// Power-series partial sum of J_nu(z); accurate for moderate |z|.
double bessel_j_series(double nu, double z, int terms = 200);

// ---------------------------------------------------------------------------
// Quadrature.

struct QuadratureGrid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int exactness_degree = -1;

  Eigen::Index size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
QuadratureGrid gauss_grid(int n);

/// Composite Gauss-Legendre rule over consecutive panels [b_k, b_{k+1}].
QuadratureGrid composite_gauss(const std::vector<double>& breakpoints, int points_per_panel);

/// Uniform panels of width at most h over [a, b], honoring mandatory
/// breakpoints inside the interval.
std::vector<double> panel_breakpoints(double a, double b, double h, std::vector<double> mandatory = {});

/// Breakpoints graded geometrically toward `center` inside [a, b].
std::vector<double> graded_breakpoints(double a, double b, double center, int levels, double ratio = 0.5);

/// Globally adaptive Gauss-Legendre bisection.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                          int max_depth = 60);

/// 2^k Chebyshev-Lobatto or Gauss points; `lobatto` includes +-1.
Eigen::ArrayXd chebyshev_points(int n, bool lobatto = true);

}  // namespace grushin::harmonics

#endif  // GRUSHIN_HARMONICS_HPP

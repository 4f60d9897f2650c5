#include "grushin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "detail/engine.hpp"

namespace grushin::spectral {

namespace {
constexpr double half_pi = pi / 2;
}

double eigenvalue(HarmonicIndex idx) {
  harmonics::require_index(idx.l, idx.m);
  const std::int64_t l = idx.l, m = idx.m;
  return static_cast<double>(l * (l + 1) - m * m);
}

int degree_limit(int m, double lambda_max) {
  if (m < 0) m = -m;
  if (lambda_max < static_cast<double>(m)) return m - 1;
  const double target = lambda_max + static_cast<double>(m) * m;
  auto l = static_cast<std::int64_t>(std::floor((std::sqrt(1.0 + 4.0 * target) - 1.0) / 2.0));
  const auto lam = [m](std::int64_t L) { return static_cast<double>(L * (L + 1) - static_cast<std::int64_t>(m) * m); };
  while (l > m && lam(l) > lambda_max) --l;
  while (lam(l + 1) <= lambda_max) ++l;
  return static_cast<int>(std::max<std::int64_t>(l, m));
}

double smallest_positive_root_eigenvalue(int l_max) {
  double best = std::numeric_limits<double>::infinity();
  for (int l = 1; l <= l_max; ++l)
    for (int m = 0; m <= l; ++m) {
      const double lam = eigenvalue(HarmonicIndex{l, m});
      if (lam > 0) best = std::min(best, lam);
    }
  return std::sqrt(best);
}

std::string to_string(MultiplierKind k) {
  switch (k) {
    case MultiplierKind::bump:
      return "bump";
    case MultiplierKind::bochner_riesz:
      return "bochner_riesz";
    case MultiplierKind::heat:
      return "heat";
    case MultiplierKind::indicator_zero:
      return "indicator_zero";
    case MultiplierKind::tabulated:
      return "tabulated";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

Multiplier Multiplier::bump(double a, double b) {
  if (!(a >= 0.0 && b > a && std::isfinite(b))) throw DomainError("bump support must satisfy 0 <= a < b < inf");
  Multiplier f;
  f.kind = MultiplierKind::bump;
  f.a = a;
  f.b = b;
  return f;
}

Multiplier Multiplier::bochner_riesz(double delta, double t) {
  if (!(delta >= 0.0)) throw DomainError("Bochner-Riesz exponent must be nonnegative");
  if (!(t > 0.0)) throw DomainError("Bochner-Riesz parameter t must be positive");
  Multiplier f;
  f.kind = MultiplierKind::bochner_riesz;
  f.delta = delta;
  f.scale = t;
  return f;
}

Multiplier Multiplier::heat(double r2) {
  if (!(r2 > 0.0)) throw DomainError("heat time r^2 must be positive");
  Multiplier f;
  f.kind = MultiplierKind::heat;
  f.r2 = r2;
  return f;
}

Multiplier Multiplier::indicator_zero() {
  Multiplier f;
  f.kind = MultiplierKind::indicator_zero;
  return f;
}

Multiplier Multiplier::tabulated(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() != values.size() || knots.size() < 2) throw DomainError("tabulated multiplier needs >= 2 matching samples");
  if (!std::is_sorted(knots.begin(), knots.end()) || std::adjacent_find(knots.begin(), knots.end()) != knots.end())
    throw DomainError("tabulated knots must be strictly increasing");
  if (knots.front() < 0.0) throw DomainError("tabulated knots must be nonnegative");
  Multiplier f;
  f.kind = MultiplierKind::tabulated;
  f.knots = std::move(knots);
  f.values = std::move(values);
  return f;
}

Multiplier Multiplier::dilated(double s) const {
  if (!(s > 0.0)) throw DomainError("dilation factor must be positive");
  Multiplier f = *this;
  f.scale *= s;
  return f;
}

Multiplier Multiplier::of_sqrt() const {
  Multiplier f = *this;
  f.sqrt_argument = true;
  return f;
}

double Multiplier::profile(double u) const {
  switch (kind) {
    case MultiplierKind::bump: {
      if (u <= a || u >= b) return 0.0;
      const double w = b - a;
      return std::exp(4.0 / (w * w) - 1.0 / ((u - a) * (b - u)));
    }
    case MultiplierKind::bochner_riesz:
      if (u >= 1.0 || u < 0.0) return 0.0;
      return delta == 0.0 ? 1.0 : std::pow(1.0 - u, delta);
    case MultiplierKind::heat:
      return std::exp(-r2 * u);
    case MultiplierKind::indicator_zero:
      return u == 0.0 ? 1.0 : 0.0;
    case MultiplierKind::tabulated: {
      if (u < knots.front() || u > knots.back()) return 0.0;
      const auto it = std::upper_bound(knots.begin(), knots.end(), u);
      if (it == knots.end()) return values.back();
      const std::size_t k = static_cast<std::size_t>(it - knots.begin());
      const double t = (u - knots[k - 1]) / (knots[k] - knots[k - 1]);
      return values[k - 1] + t * (values[k] - values[k - 1]);
    }
  }
  return 0.0;
}

double Multiplier::operator()(double lambda) const {
  if (lambda < 0.0) return 0.0;
  const double u = scale * (sqrt_argument ? std::sqrt(lambda) : lambda);
  return profile(u);
}

std::pair<double, double> Multiplier::profile_support() const {
  switch (kind) {
    case MultiplierKind::bump:
      return {a, b};
    case MultiplierKind::bochner_riesz:
      return {0.0, 1.0};
    case MultiplierKind::heat:
      return {0.0, std::numeric_limits<double>::infinity()};
    case MultiplierKind::indicator_zero:
      return {0.0, 0.0};
    case MultiplierKind::tabulated:
      return {knots.front(), knots.back()};
  }
  return {0.0, 0.0};
}

std::pair<double, double> Multiplier::lambda_support() const {
  auto [lo, hi] = profile_support();
  lo /= scale;
  hi /= scale;
  if (sqrt_argument) {
    lo *= lo;
    hi *= hi;
  }
  return {lo, hi};
}

std::vector<double> Multiplier::profile_critical_points() const {
  switch (kind) {
    case MultiplierKind::bump:
      return {0.5 * (a + b)};
    case MultiplierKind::bochner_riesz:
      return {0.0, 1.0};
    case MultiplierKind::heat:
    case MultiplierKind::indicator_zero:
      return {0.0};
    case MultiplierKind::tabulated:
      return knots;
  }
  return {};
}

std::string Multiplier::describe() const {
  std::ostringstream s;
  s.precision(6);
  switch (kind) {
    case MultiplierKind::bump:
      s << "bump[" << a << "," << b << "]";
      break;
    case MultiplierKind::bochner_riesz:
      s << "bochner_riesz(delta=" << delta << ")";
      break;
    case MultiplierKind::heat:
      s << "heat(r2=" << r2 << ")";
      break;
    case MultiplierKind::indicator_zero:
      s << "indicator_zero";
      break;
    case MultiplierKind::tabulated:
      s << "tabulated(" << knots.size() << ")";
      break;
  }
  if (scale != 1.0) s << "*scale=" << scale;
  if (sqrt_argument) s << "(sqrt)";
  return s.str();
}

// ---------------------------------------------------------------------------

double heat_tail_bound(double r2, double lambda_max) {
  // indices with l <= lambda_max and lambda > lambda_max: exp(-r2 lambda_max) (2l+1)/(4 pi) each l
  const double L = std::floor(lambda_max);
  const double head = std::exp(-r2 * lambda_max) * (L + 1) * (L + 1) / (4 * pi);
  // all indices with l > lambda_max: sum_{l >= L+1} (2l+1) q^l, q = exp(-r2)
  const double q1 = -std::expm1(-r2);  // 1 - q
  const double q = 1.0 - q1;
  const double start = L + 1;
  const double tail = std::exp(-r2 * start) * ((2 * start + 1) / q1 + 2 * q / (q1 * q1)) / (4 * pi);
  return head + tail;
}

HeatTruncation heat_truncation(double r2, double tol) {
  if (!(r2 > 0.0)) throw DomainError("heat time must be positive");
  if (!(tol > 0.0)) throw DomainError("heat tolerance must be positive");
  double hi = 1.0;
  while (heat_tail_bound(r2, hi) >= tol) {
    hi *= 2;
    if (hi > 1e9) throw ConfigError("heat truncation does not converge; r^2 too small");
  }
  double lo = std::floor(hi / 2);
  while (hi - lo > 1) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (heat_tail_bound(r2, mid) < tol)
      hi = mid;
    else
      lo = mid;
  }
  return HeatTruncation{hi, heat_tail_bound(r2, hi)};
}

double spectral_cutoff(const Multiplier& F, double heat_tol) {
  if (F.kind == MultiplierKind::heat) {
    if (F.sqrt_argument) throw ConfigError("heat profile in sqrt(L) has no certified truncation");
    return heat_truncation(F.r2 * F.scale, heat_tol).lambda_max;
  }
  return F.lambda_support().second;
}

// ---------------------------------------------------------------------------

ThetaGrid make_theta_grid(double lambda_max, const ColumnGridSpec& spec) {
  if (spec.points_per_panel < 2 || spec.density < 1) throw ConfigError("theta grid needs >= 2 points per panel and density >= 1");
  const double h = std::min(spec.max_panel, spec.panel_scale / std::sqrt(std::max(lambda_max, 0.0) + 1.0));
  const int per_side = std::max(1, static_cast<int>(std::ceil(half_pi / h)));
  std::vector<double> br;
  for (int k = -per_side; k <= per_side; ++k) br.push_back(half_pi * k / per_side);
  const auto q = harmonics::composite_gauss(br, spec.points_per_panel * spec.density);
  ThetaGrid g;
  const auto n = static_cast<std::size_t>(q.nodes.size());
  g.theta.resize(n);
  g.weight.resize(n);
  g.x.resize(n);
  g.cos_theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.theta[i] = q.nodes[static_cast<Eigen::Index>(i)];
    g.weight[i] = q.weights[static_cast<Eigen::Index>(i)];
    g.x[i] = std::sin(g.theta[i]);
    g.cos_theta[i] = std::cos(g.theta[i]);
  }
  return g;
}

std::vector<double> theta_prime_grid(double lambda_max, int uniform) {
  if (uniform < 1) throw ConfigError("theta' grid needs at least one uniform step");
  std::vector<double> t;
  for (int j = 0; j <= uniform; ++j) t.push_back(half_pi * j / uniform);
  const double s = 1.0 / std::sqrt(std::max(lambda_max, 0.0) + 1.0);
  for (double v = 0.5 * s; v < 0.3; v *= 2) t.push_back(v);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), t.end());
  return t;
}

// ---------------------------------------------------------------------------

namespace detail {

double resolve_cutoff(const Multiplier& F, double lambda_max) {
  const double need = spectral_cutoff(F);
  if (lambda_max < 0.0) return need;
  if (F.kind != MultiplierKind::heat && lambda_max < need) {
    std::ostringstream s;
    s << "expansion to lambda <= " << lambda_max << " misses the support of " << F.describe()
      << "; required l_max = " << static_cast<long long>(std::floor(need));
    throw ConfigError(s.str());
  }
  return lambda_max;
}

void assemble_orders(const Multiplier& F, double lambda_max, const ThetaGrid& g, const std::vector<double>& theta_primes,
                     double negligible, const std::function<void(const OrderBlock&)>& sink) {
  const int m_max = static_cast<int>(std::floor(lambda_max));
  if (m_max < 0) return;
  const std::vector<double> seeds = harmonics::profile_seed_logs(m_max);
  const Eigen::Index ntp = static_cast<Eigen::Index>(theta_primes.size());
  Eigen::ArrayXd xp(ntp);
  for (Eigen::Index k = 0; k < ntp; ++k) xp[k] = std::sin(theta_primes[static_cast<std::size_t>(k)]);
  const std::size_t n = g.size();
  const double x_top = n ? std::abs(g.x.back()) : 0.0;

  auto compute = [&](int m, OrderBlock& out) {
    out.m = m;
    out.i_lo = 0;
    out.h.resize(0, 0);
    const int L = degree_limit(m, lambda_max);
    if (L < m) return;
    const int nk = L - m + 1;
    std::vector<double> fv(static_cast<std::size_t>(nk));
    bool any = false;
    for (int k = 0; k < nk; ++k) {
      fv[static_cast<std::size_t>(k)] = F(eigenvalue(HarmonicIndex{m + k, m}));
      any = any || fv[static_cast<std::size_t>(k)] != 0.0;
    }
    if (!any) return;
    Eigen::MatrixXd C(nk, ntp);
    {
      harmonics::DegreeSweep sw(m, xp, seeds[static_cast<std::size_t>(m)]);
      for (int k = 0; k < nk; ++k) {
        if (k > 0) sw.advance();
        C.row(k) = (fv[static_cast<std::size_t>(k)] * sw.values()).matrix().transpose();
      }
    }
    Eigen::VectorXd cmax = C.cwiseAbs().rowwise().maxCoeff();
    if (cmax.maxCoeff() < negligible) return;

    // |x| beyond which every term is negligible; past the outermost turning
    // point the profiles decay monotonically toward the poles
    double X = x_top;
    if (m > 0) {
      const auto S = [&](double x) {
        harmonics::ProfileRecurrence<double> rec(m, x, seeds[static_cast<std::size_t>(m)]);
        double s = 0.0;
        for (int k = 0; k < nk; ++k) {
          if (k > 0) rec.advance();
          s += cmax[k] * std::abs(rec.value());
        }
        return s;
      };
      if (S(x_top) < negligible) {
        const double b = m / (L + 0.5);
        double lo = std::min(std::sqrt((1.0 - b) * (1.0 + b)), x_top), hi = x_top;
        if (S(lo) < negligible) {
          X = lo;
        } else {
          for (int it = 0; it < 40 && hi - lo > 1e-9; ++it) {
            const double mid = 0.5 * (lo + hi);
            (S(mid) >= negligible ? lo : hi) = mid;
          }
          X = hi;
        }
      }
    }
    const auto first = std::lower_bound(g.x.begin(), g.x.end(), -X);
    const auto last = std::upper_bound(g.x.begin(), g.x.end(), X);
    if (first >= last) return;
    const auto i_lo = static_cast<std::size_t>(first - g.x.begin());
    const auto na = static_cast<Eigen::Index>(last - first);
    Eigen::ArrayXd xs(na);
    for (Eigen::Index i = 0; i < na; ++i) xs[i] = g.x[i_lo + static_cast<std::size_t>(i)];
    Eigen::MatrixXd Y(na, nk);
    harmonics::DegreeSweep sn(m, xs, seeds[static_cast<std::size_t>(m)]);
    for (int k = 0; k < nk; ++k) {
      if (k > 0) sn.advance();
      Y.col(k) = sn.values().matrix();
    }
    out.i_lo = i_lo;
    out.h.noalias() = Y * C;
  };

  // orders are computed in parallel and handed to the sink in increasing m
  const int chunk = std::max(1, 4 * thread_budget());
  std::vector<OrderBlock> blocks(static_cast<std::size_t>(chunk));
  for (int m0 = 0; m0 <= m_max; m0 += chunk) {
    const int count = std::min(chunk, m_max - m0 + 1);
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t j) { compute(m0 + static_cast<int>(j), blocks[j]); });
    for (int j = 0; j < count; ++j)
      if (blocks[static_cast<std::size_t>(j)].h.size() > 0) sink(blocks[static_cast<std::size_t>(j)]);
  }
}

std::vector<std::vector<double>> parseval_rowsums(const Multiplier& F, double lambda_max, const ThetaGrid& g,
                                                  const std::vector<double>& theta_primes, double negligible) {
  std::vector<std::vector<double>> rows(theta_primes.size(), std::vector<double>(g.size(), 0.0));
  assemble_orders(F, lambda_max, g, theta_primes, negligible, [&](const OrderBlock& b) {
    const double mult = b.m == 0 ? 1.0 : 2.0;
    for (Eigen::Index k = 0; k < b.h.cols(); ++k) {
      auto& r = rows[static_cast<std::size_t>(k)];
      for (Eigen::Index i = 0; i < b.h.rows(); ++i) {
        const double v = b.h(i, k);
        r[b.i_lo + static_cast<std::size_t>(i)] += mult * v * v;
      }
    }
  });
  return rows;
}

}  // namespace detail

// ---------------------------------------------------------------------------

int KernelColumn::phi_points(std::size_t row) const {
  const int need = std::max(spec.min_phi_points, spec.phi_oversample * (row_bandwidth(row) + 1)) * spec.density;
  int n = 2;
  while (n < need) n *= 2;
  return n;
}

double KernelColumn::value(std::size_t row, double dphi) const {
  const auto& c = coeffs[row];
  double s = c[0];
  for (std::size_t m = 1; m < c.size(); ++m) s += 2.0 * c[m] * std::cos(static_cast<double>(m) * dphi);
  return s;
}

std::vector<double> KernelColumn::row_samples(std::size_t row, int n) const {
  const auto& c = coeffs[row];
  if (n % 2 != 0 || static_cast<std::size_t>(n / 2) <= c.size() - 1)
    throw ConfigError("phi rule too coarse for the row bandwidth");
  thread_local Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec_half(static_cast<std::size_t>(n / 2 + 1), 0.0);
  for (std::size_t m = 0; m < c.size(); ++m) spec_half[m] = c[m];
  std::vector<double> out(static_cast<std::size_t>(n));
  fft.inv(out.data(), spec_half.data(), n);
  return out;
}

double KernelColumn::l1_mass() const {
  std::vector<double> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const int n = phi_points(i);
    const auto s = row_samples(i, n);
    double acc = 0.0;
    for (double v : s) acc += std::abs(v);
    rows[i] = grid.weight[i] * grid.cos_theta[i] * (2 * pi / n) * acc;
  });
  return compensated_sum(rows);
}

double KernelColumn::l2_mass_sampled() const {
  std::vector<double> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const int n = phi_points(i);
    const auto s = row_samples(i, n);
    double acc = 0.0;
    for (double v : s) acc += v * v;
    rows[i] = grid.weight[i] * grid.cos_theta[i] * (2 * pi / n) * acc;
  });
  return compensated_sum(rows);
}

double KernelColumn::l2_mass_parseval() const {
  std::vector<double> rows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& c = coeffs[i];
    double acc = c[0] * c[0];
    for (std::size_t m = 1; m < c.size(); ++m) acc += 2.0 * c[m] * c[m];
    rows[i] = grid.weight[i] * grid.cos_theta[i] * 2 * pi * acc;
  }
  return compensated_sum(rows);
}

double KernelColumn::integral() const {
  std::vector<double> rows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = grid.weight[i] * grid.cos_theta[i] * 2 * pi * coeffs[i][0];
  return compensated_sum(rows);
}

double KernelColumn::min_value() const {
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (double v : row_samples(i, phi_points(i))) mn = std::min(mn, v);
  return mn;
}

double KernelColumn::max_value() const {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (double v : row_samples(i, phi_points(i))) mx = std::max(mx, v);
  return mx;
}

std::vector<KernelColumn> kernel_columns(const Multiplier& F, const std::vector<double>& theta_primes,
                                         const ColumnGridSpec& spec, double lambda_max) {
  for (double t : theta_primes)
    if (!(t >= -half_pi && t <= half_pi)) throw DomainError("theta' outside [-pi/2, pi/2]");
  const double lam = detail::resolve_cutoff(F, lambda_max);
  const ThetaGrid g = make_theta_grid(lam, spec);
  std::vector<KernelColumn> cols(theta_primes.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    auto& c = cols[k];
    c.theta_prime = theta_primes[k];
    c.multiplier = F;
    c.lambda_max = lam;
    c.l_max = static_cast<int>(std::floor(lam));
    c.truncation_bound = F.kind == MultiplierKind::heat ? heat_tail_bound(F.r2 * F.scale, lam) : 0.0;
    c.spec = spec;
    c.grid = g;
    c.coeffs.assign(g.size(), std::vector<double>(1, 0.0));
  }
  detail::assemble_orders(F, lam, g, theta_primes, spec.negligible, [&](const detail::OrderBlock& b) {
    for (Eigen::Index k = 0; k < b.h.cols(); ++k) {
      auto& rows = cols[static_cast<std::size_t>(k)].coeffs;
      for (Eigen::Index i = 0; i < b.h.rows(); ++i) {
        auto& r = rows[b.i_lo + static_cast<std::size_t>(i)];
        if (r.size() < static_cast<std::size_t>(b.m) + 1) r.resize(static_cast<std::size_t>(b.m) + 1, 0.0);
        r[static_cast<std::size_t>(b.m)] = b.h(i, k);
      }
    }
  });
  // trailing zero coefficients carry no bandwidth
  for (auto& c : cols)
    for (auto& r : c.coeffs)
      while (r.size() > 1 && r.back() == 0.0) r.pop_back();
  return cols;
}

KernelColumn kernel_column(const Multiplier& F, double theta_prime, const ColumnGridSpec& spec, double lambda_max) {
  return std::move(kernel_columns(F, {theta_prime}, spec, lambda_max).front());
}

std::vector<double> column_l2_norms_squared(const Multiplier& F, const std::vector<double>& theta_primes,
                                            double lambda_max) {
  const double lam = lambda_max < 0.0 ? (F.kind == MultiplierKind::heat ? heat_truncation(2 * F.r2 * F.scale).lambda_max
                                                                         : spectral_cutoff(F))
                                      : detail::resolve_cutoff(F, lambda_max);
  const int m_max = static_cast<int>(std::floor(lam));
  const Eigen::Index n = static_cast<Eigen::Index>(theta_primes.size());
  Eigen::ArrayXd xp(n);
  for (Eigen::Index k = 0; k < n; ++k) xp[k] = std::sin(theta_primes[static_cast<std::size_t>(k)]);
  const std::vector<double> seeds = harmonics::profile_seed_logs(std::max(m_max, 0));
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(n));
  const int chunk = 256;
  std::vector<Eigen::ArrayXd> partial(static_cast<std::size_t>(chunk));
  for (int m0 = 0; m0 <= m_max; m0 += chunk) {
    const int count = std::min(chunk, m_max - m0 + 1);
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t j) {
      const int m = m0 + static_cast<int>(j);
      Eigen::ArrayXd s = Eigen::ArrayXd::Zero(n);
      const int L = degree_limit(m, lam);
      if (L >= m) {
        harmonics::DegreeSweep sw(m, xp, seeds[static_cast<std::size_t>(m)]);
        for (int l = m; l <= L; ++l) {
          if (l > m) sw.advance();
          const double f = F(eigenvalue(HarmonicIndex{l, m}));
          if (f != 0.0) s += f * f * sw.values().square();
        }
      }
      partial[j] = (m == 0 ? 1.0 : 2.0) * s;
    });
    for (int j = 0; j < count; ++j)
      for (Eigen::Index k = 0; k < n; ++k) acc[static_cast<std::size_t>(k)].add(partial[static_cast<std::size_t>(j)][k]);
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].value();
  return out;
}

double kernel_value(const Multiplier& F, double theta, double theta_prime, double dphi, double lambda_max) {
  const double lam = detail::resolve_cutoff(F, lambda_max);
  const int m_max = static_cast<int>(std::floor(lam));
  const double x = std::sin(theta), xp = std::sin(theta_prime);
  CompensatedSum total;
  for (int m = 0; m <= m_max; ++m) {
    const int L = degree_limit(m, lam);
    if (L < m) break;
    harmonics::ProfileRecurrence<double> a(m, x), b(m, xp);
    double s = 0.0;
    for (int l = m; l <= L; ++l) {
      if (l > m) {
        a.advance();
        b.advance();
      }
      const double f = F(eigenvalue(HarmonicIndex{l, m}));
      if (f != 0.0) s += f * a.value() * b.value();
    }
    total.add((m == 0 ? 1.0 : 2.0 * std::cos(m * dphi)) * s);
  }
  return total.value();
}

}  // namespace grushin::spectral

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>

#include <unsupported/Eigen/FFT>

#include "detail/engine.hpp"
#include "grushin/geometry.hpp"
#include "grushin/spectral.hpp"

namespace grushin::spectral {

namespace {

constexpr std::size_t column_batch = 8;

std::vector<double> column_l1_masses(const Multiplier& F, const std::vector<double>& theta_primes,
                                     const ColumnGridSpec& spec) {
  std::vector<double> out;
  for (std::size_t k0 = 0; k0 < theta_primes.size(); k0 += column_batch) {
    const std::size_t k1 = std::min(theta_primes.size(), k0 + column_batch);
    const std::vector<double> part(theta_primes.begin() + static_cast<std::ptrdiff_t>(k0),
                                   theta_primes.begin() + static_cast<std::ptrdiff_t>(k1));
    for (const auto& c : kernel_columns(F, part, spec)) out.push_back(c.l1_mass());
  }
  return out;
}

int pow2_at_least(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

}  // namespace

L1NormResult l1_operator_norm(const Multiplier& F, const std::vector<double>& theta_primes, const ColumnGridSpec& spec,
                              bool doubling_check) {
  if (theta_primes.empty()) throw ConfigError("no theta' samples");
  L1NormResult r;
  r.theta_primes = theta_primes;
  r.lambda_max = spectral_cutoff(F);
  r.masses = column_l1_masses(F, theta_primes, spec);
  const auto it = std::max_element(r.masses.begin(), r.masses.end());
  r.norm = *it;
  r.argmax_theta = theta_primes[static_cast<std::size_t>(it - r.masses.begin())];
  r.doubled = r.norm;
  if (doubling_check) {
    ColumnGridSpec fine = spec;
    fine.density *= 2;
    r.doubled = kernel_column(F, r.argmax_theta, fine).l1_mass();
    r.doubling_change = std::abs(r.doubled - r.norm) / r.norm;
  }
  return r;
}

double norm_N2(const std::function<double(double)>& F, int N, const std::vector<double>& critical_points,
               int samples_per_cell) {
  if (N < 1) throw DomainError("norm_N2 needs N >= 1");
  if (samples_per_cell < 1) throw ConfigError("norm_N2 needs at least one sample per cell");
  CompensatedSum acc;
  for (int i = 1; i <= N; ++i) {
    const double lo = static_cast<double>(i - 1) / N, hi = static_cast<double>(i) / N;
    double sup = 0.0;
    for (int k = 0; k <= samples_per_cell; ++k) sup = std::max(sup, std::abs(F(lo + (hi - lo) * k / samples_per_cell)));
    for (double c : critical_points)
      if (c >= lo && c <= hi) sup = std::max(sup, std::abs(F(c)));
    acc.add(sup * sup);
  }
  return std::sqrt(acc.value() / N);
}

double norm_N2(const Multiplier& F, int N) {
  std::vector<double> crit;
  for (double u : F.profile_critical_points()) {
    double lam = u / F.scale;
    if (F.sqrt_argument) lam *= lam;
    crit.push_back(lam);
  }
  return norm_N2([&F](double lam) { return F(lam); }, N, crit);
}

ColumnSup triple_norm(const std::vector<KernelColumn>& columns, int p, double beta, double alpha, double r) {
  if (p != 1 && p != 2) throw DomainError("triple norm supports p = 1 or 2");
  if (!(r > 0.0)) throw DomainError("triple norm needs r > 0");
  ColumnSup out;
  out.value = -1.0;
  for (const auto& c : columns) {
    const auto zp = geometry::SpherePoint::make(c.theta_prime, 0.0);
    const double V = geometry::ball_volume_closed(zp, r);
    std::vector<double> rows(c.grid.size());
    parallel_for(c.grid.size(), [&](std::size_t i) {
      const int n = c.phi_points(i);
      const auto s = c.row_samples(i, n);
      const double th = c.grid.theta[i];
      const double w = geometry::weight(r, geometry::SpherePoint::make(th, 0.0), zp);
      const double fw = alpha == 0.0 ? 1.0 : std::pow(1.0 + w, alpha);
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        double v = std::abs(s[static_cast<std::size_t>(j)]) * fw;
        if (beta != 0.0) {
          const double Phi = geometry::phi_distance(geometry::SpherePoint::make(th, 2 * pi * j / n), zp);
          v *= std::pow(1.0 + Phi / r, beta);
        }
        acc += p == 1 ? v : v * v;
      }
      rows[i] = c.grid.weight[i] * c.grid.cos_theta[i] * (2 * pi / n) * acc;
    });
    const double integral = compensated_sum(rows);
    const double val = p == 1 ? integral : std::sqrt(V * integral);
    out.per_column.push_back(val);
    if (val > out.value) {
      out.value = val;
      out.argmax_theta = c.theta_prime;
    }
  }
  return out;
}

namespace {

ColumnSup weighted_l2_from_rowsums(const ThetaGrid& g, const std::vector<std::vector<double>>& rowsums,
                                   const std::vector<double>& theta_primes, double alpha, double r) {
  ColumnSup out;
  out.value = -1.0;
  for (std::size_t k = 0; k < theta_primes.size(); ++k) {
    const auto zp = geometry::SpherePoint::make(theta_primes[k], 0.0);
    const double V = geometry::ball_volume_closed(zp, r);
    CompensatedSum acc;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double w = geometry::weight(r, geometry::SpherePoint::make(g.theta[i], 0.0), zp);
      const double fw = alpha == 0.0 ? 1.0 : std::pow(1.0 + w, 2 * alpha);
      acc.add(g.weight[i] * g.cos_theta[i] * 2 * pi * fw * rowsums[k][i]);
    }
    const double val = std::sqrt(V * acc.value());
    out.per_column.push_back(val);
    if (val > out.value) {
      out.value = val;
      out.argmax_theta = theta_primes[k];
    }
  }
  return out;
}

}  // namespace

ColumnSup triple_norm_l2(const Multiplier& F, const std::vector<double>& theta_primes, double alpha, double r,
                         const ColumnGridSpec& spec) {
  if (!(r > 0.0)) throw DomainError("triple norm needs r > 0");
  const double lam = spectral_cutoff(F);
  const ThetaGrid g = make_theta_grid(lam, spec);
  const auto rows = detail::parseval_rowsums(F, lam, g, theta_primes, spec.negligible);
  return weighted_l2_from_rowsums(g, rows, theta_primes, alpha, r);
}

ColumnSup triple_norm_parseval(const Multiplier& F, const std::vector<double>& theta_primes, double r) {
  if (!(r > 0.0)) throw DomainError("triple norm needs r > 0");
  const auto sq = column_l2_norms_squared(F, theta_primes);
  ColumnSup out;
  out.value = -1.0;
  for (std::size_t k = 0; k < sq.size(); ++k) {
    const double V = geometry::ball_volume_closed(geometry::SpherePoint::make(theta_primes[k], 0.0), r);
    const double val = std::sqrt(V * sq[k]);
    out.per_column.push_back(val);
    if (val > out.value) {
      out.value = val;
      out.argmax_theta = theta_primes[k];
    }
  }
  return out;
}

SobolevResult sobolev_norm(const Multiplier& F, double s, int min_samples, double pad_factor) {
  if (!(s >= 0.0)) throw DomainError("Sobolev exponent must be nonnegative");
  if (!(pad_factor >= 1.0)) throw ConfigError("Sobolev padding factor must be >= 1");
  const auto [lo, hi] = F.lambda_support();
  if (!std::isfinite(hi) || !(hi > lo)) throw DomainError("Sobolev norm needs a compactly supported multiplier");
  const double W = hi - lo;
  const double P = (1.0 + pad_factor) * W;
  const double x0 = lo - 0.5 * pad_factor * W;
  auto at = [&](int n) {
    const double dx = P / n;
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) f[static_cast<std::size_t>(j)] = F(x0 + j * dx);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> X;
    fft.fwd(X, f);
    CompensatedSum acc;
    for (int k = 0; k < n; ++k) {
      const double xi = 2 * pi * (k < n / 2 ? k : k - n) / P;
      const double mag = std::abs(X[static_cast<std::size_t>(k)]) * dx / std::sqrt(2 * pi);
      acc.add((2 * pi / P) * std::pow(1.0 + xi * xi, s) * mag * mag);
    }
    return std::sqrt(acc.value());
  };
  SobolevResult r;
  r.samples = pow2_at_least(std::max(min_samples, 16));
  r.value = at(r.samples);
  r.doubled = at(2 * r.samples);
  r.converged = std::abs(r.doubled - r.value) < 0.01 * r.doubled;
  return r;
}

// ---------------------------------------------------------------------------

HeatColumnFit heat_column_and_fit(double r2, double theta_prime, const ColumnGridSpec& spec) {
  HeatColumnFit out{kernel_column(Multiplier::heat(r2), theta_prime, spec), {}};
  const auto& c = out.column;
  const double r = std::sqrt(r2);
  const auto zp = geometry::SpherePoint::make(theta_prime, 0.0);
  const double V = geometry::ball_volume_closed(zp, r);
  struct Pt {
    double s, y;
  };
  std::vector<std::vector<Pt>> per_row(c.grid.size());
  std::vector<double> row_max(c.grid.size()), row_min(c.grid.size());
  parallel_for(c.grid.size(), [&](std::size_t i) {
    const int n = c.phi_points(i);
    const auto v = c.row_samples(i, n);
    row_max[i] = *std::max_element(v.begin(), v.end());
    row_min[i] = *std::min_element(v.begin(), v.end());
    for (int j = 0; j < n; ++j) {
      const double Phi = geometry::phi_distance(geometry::SpherePoint::make(c.grid.theta[i], 2 * pi * j / n), zp);
      per_row[i].push_back({Phi * Phi / r2, v[static_cast<std::size_t>(j)]});
    }
  });
  const double kmax = *std::max_element(row_max.begin(), row_max.end());
  const double kmin = *std::min_element(row_min.begin(), row_min.end());
  out.fit.min_over_max = kmin / kmax;
  const double floor = 1e-12;
  std::vector<Pt> pts;
  for (const auto& row : per_row)
    for (const auto& p : row)
      if (p.y > floor) pts.push_back({p.s, std::log(p.y * V)});
  HeatFit& f = out.fit;
  f.points = pts.size();
  double logC = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts)
    if (p.s <= 1.0) logC = std::max(logC, p.y);
  f.C = std::exp(logC);
  f.b = std::numeric_limits<double>::infinity();
  for (const auto& p : pts)
    if (p.s > 1.0) f.b = std::min(f.b, (logC - p.y) / p.s);
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (const auto& p : pts) {
    S += 1;
    Sx += p.s;
    Sy += p.y;
    Sxx += p.s * p.s;
    Sxy += p.s * p.y;
  }
  const double den = S * Sxx - Sx * Sx;
  if (den > 0) {
    const double slope = (S * Sxy - Sx * Sy) / den;
    f.ls_b = -slope;
    f.ls_logC = (Sy - slope * Sx) / S;
    double res = 0;
    for (const auto& p : pts) {
      const double e = p.y - (f.ls_logC + slope * p.s);
      res += e * e;
    }
    f.ls_residual = std::sqrt(res / S);
  }
  return out;
}

SemigroupCheck heat_semigroup_check(double r2, double s2, double theta_z, double theta_prime, int shift,
                                    const ColumnGridSpec& spec) {
  const double lam = heat_truncation(std::min(r2, s2)).lambda_max;
  const auto A = kernel_column(Multiplier::heat(r2), theta_z, spec, lam);
  const auto B = kernel_column(Multiplier::heat(s2), theta_prime, spec, lam);
  int n = 0;
  for (std::size_t i = 0; i < A.grid.size(); ++i) n = std::max({n, A.phi_points(i), B.phi_points(i)});
  std::vector<double> rows(A.grid.size());
  parallel_for(A.grid.size(), [&](std::size_t i) {
    const auto a = A.row_samples(i, n), b = B.row_samples(i, n);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += a[static_cast<std::size_t>(((j - shift) % n + n) % n)] * b[static_cast<std::size_t>(j)];
    rows[i] = A.grid.weight[i] * A.grid.cos_theta[i] * (2 * pi / n) * acc;
  });
  SemigroupCheck out;
  out.composed = compensated_sum(rows);
  out.direct = kernel_value(Multiplier::heat(r2 + s2), theta_z, theta_prime, 2 * pi * shift / n, lam);
  out.rel_error = std::abs(out.composed - out.direct) / std::abs(out.direct);
  return out;
}

BochnerRieszSweep bochner_riesz_sweep(double delta, const std::vector<double>& Rs, int theta_uniform,
                                      const ColumnGridSpec& spec) {
  BochnerRieszSweep out;
  out.delta = delta;
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (double R : Rs) {
    if (!(R >= 1.0)) throw DomainError("Bochner-Riesz sweep needs R >= 1");
    const auto F = Multiplier::bochner_riesz(delta, 1.0 / (R * R));
    const auto res = l1_operator_norm(F, theta_prime_grid(R * R, theta_uniform), spec, true);
    out.rows.push_back({R, res.norm, res.argmax_theta, res.doubling_change, res.lambda_max});
    mn = std::min(mn, res.norm);
    mx = std::max(mx, res.norm);
  }
  out.max_over_min = Rs.empty() ? 0.0 : mx / mn;
  out.exceeds_3 = out.max_over_min > 3.0;
  return out;
}

double MihlinResult::sup_ratio_up_to(double lambda_cap) const {
  double s = 0.0;
  for (const auto& row : table)
    if (row.reach <= lambda_cap) s = std::max(s, row.ratio);
  return s;
}

MihlinResult mihlin_statistic(const Multiplier& F, double s, double lambda_reach, const std::vector<double>& cs,
                              int theta_uniform, const ColumnGridSpec& spec, bool doubling_check) {
  const auto [lo, hi] = F.lambda_support();
  if (lo < 0.25 - 1e-12 || hi > 1.0 + 1e-12) throw DomainError("Mihlin statistic needs F supported in [1/4, 1]");
  if (!(lambda_reach >= 1.0)) throw DomainError("Mihlin reach must be >= 1");
  MihlinResult out;
  out.s = s;
  out.sobolev = sobolev_norm(F, s).value;
  std::set<double> eigs;
  const int lmax = static_cast<int>(std::floor(lambda_reach));
  for (int l = 1; l <= lmax; ++l)
    for (int m = 0; m <= l; ++m) {
      const double lam = eigenvalue(HarmonicIndex{l, m});
      if (lam > 0 && lam <= lambda_reach) eigs.insert(lam);
    }
  for (double lam : eigs)
    for (double c : cs) {
      const double t = c / lam;
      const auto Ft = F.dilated(t);
      const double reach = Ft.lambda_support().second;
      if (reach > lambda_reach * (1 + 1e-12)) continue;
      const auto res = l1_operator_norm(Ft, theta_prime_grid(reach, theta_uniform), spec, doubling_check);
      MihlinRow row;
      row.t = t;
      row.eigen = lam;
      row.c = c;
      row.reach = reach;
      row.norm = res.norm;
      row.ratio = res.norm / out.sobolev;
      row.argmax_theta = res.argmax_theta;
      row.doubling_change = res.doubling_change;
      out.table.push_back(row);
      out.sup_ratio = std::max(out.sup_ratio, row.ratio);
    }
  return out;
}

std::vector<PlancherelRow> weighted_plancherel_sweep(const std::vector<Multiplier>& profiles, const std::vector<int>& Ns,
                                                     const std::vector<double>& alphas, int theta_uniform,
                                                     const ColumnGridSpec& spec) {
  std::vector<PlancherelRow> out;
  for (const auto& G : profiles) {
    const auto [glo, ghi] = G.lambda_support();
    if (glo < 0.0 || ghi > 1.0 + 1e-12) throw DomainError("weighted Plancherel profiles must live on [0, 1]");
    for (int N : Ns) {
      if (N < 1) throw DomainError("weighted Plancherel needs N >= 1");
      const auto F = G.dilated(1.0 / N).of_sqrt();
      const double lam = spectral_cutoff(F);
      const auto tps = theta_prime_grid(lam, theta_uniform);
      const ThetaGrid g = make_theta_grid(lam, spec);
      const auto rows = detail::parseval_rowsums(F, lam, g, tps, spec.negligible);
      const double n2 = norm_N2(G, N);
      for (double alpha : alphas) {
        const auto sup = weighted_l2_from_rowsums(g, rows, tps, alpha, 1.0 / N);
        out.push_back({G.describe(), N, alpha, sup.value, n2, sup.value / n2, sup.argmax_theta});
      }
    }
  }
  return out;
}

std::vector<Multiplier> builtin_bumps() {
  return {Multiplier::bump(0.25, 1.0), Multiplier::bump(0.5, 1.0), Multiplier::bump(0.125, 0.5)};
}

}  // namespace grushin::spectral

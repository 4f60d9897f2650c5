#include "grushin/plancherel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "grushin/harmonics.hpp"
#include "grushin/spectral.hpp"

namespace grushin::spectral {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
}

std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

// Visits every (l, m >= 0) with lambda in [i^2, (i+1)^2] at one abscissa.
template <class Fn>
void for_block(int i, double x, Fn&& fn) {
  const double lo = static_cast<double>(i) * i, hi = static_cast<double>(i + 1) * (i + 1);
  const int m_max = static_cast<int>(hi);
  for (int m = 0; m <= m_max; ++m) {
    const int L = degree_limit(m, hi);
    if (L < m) break;
    harmonics::ProfileRecurrence<double> rec(m, x);
    for (int l = m; l <= L; ++l) {
      if (l > m) rec.advance();
      const double lam = eigenvalue(HarmonicIndex{l, m});
      if (lam >= lo) fn(l, m, lam, rec.value());
    }
  }
}

}  // namespace

double plancherel_sum_high(int i, double eps, double alpha, double x) {
  if (i < 1) throw DomainError("block index i must be >= 1");
  require_eps(eps);
  if (!(alpha >= 0.0 && alpha < 0.5)) throw DomainError("alpha must lie in [0, 1/2)");
  harmonics::require_unit_interval(x);
  CompensatedSum acc;
  for_block(i, x, [&](int l, int m, double lam, double v) {
    if (m > 0 && m >= eps * (l + 0.5)) acc.add(2.0 * std::pow(lam, alpha) * std::pow(m, -2 * alpha) * v * v);
  });
  return std::pow(std::max(1.0 / i, std::abs(x)), 1 - 2 * alpha) * acc.value() / i;
}

double plancherel_sum_low(int i, double eps, double x) {
  if (i < 1) throw DomainError("block index i must be >= 1");
  require_eps(eps);
  harmonics::require_unit_interval(x);
  CompensatedSum acc;
  for_block(i, x, [&](int l, int m, double, double v) {
    if (m <= eps * (l + 0.5)) acc.add((m == 0 ? 1.0 : 2.0) * v * v);
  });
  return acc.value() / i;
}

bool PlancherelScan::finite() const {
  return std::all_of(sup.begin(), sup.end(), [](double v) { return std::isfinite(v); });
}

double PlancherelScan::variation(int i_from) const {
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (const auto& b : blocks)
    if (b.i_lo >= i_from) {
      mn = std::min(mn, b.sup);
      mx = std::max(mx, b.sup);
    }
  return mx > 0.0 ? mx / mn : 0.0;
}

std::vector<double> plancherel_scan_grid(int x_uniform) {
  if (x_uniform < 1) throw ConfigError("scan grid needs at least one uniform step");
  std::vector<double> xs;
  for (int j = 0; j <= x_uniform; ++j) xs.push_back(static_cast<double>(j) / x_uniform);
  for (double v = 0.5 / x_uniform; v > 1e-6; v /= 2) xs.push_back(v);
  std::sort(xs.begin(), xs.end());
  return xs;
}

std::vector<PlancherelScan> plancherel_scan(int i_min, int i_max, double eps, const std::vector<double>& alphas,
                                            int x_uniform) {
  if (i_min < 1 || i_max < i_min) throw DomainError("scan needs 1 <= i_min <= i_max");
  require_eps(eps);
  for (double a : alphas)
    if (!(a >= 0.0 && a < 0.5)) throw DomainError("alpha must lie in [0, 1/2)");
  const std::vector<double> xs = plancherel_scan_grid(x_uniform);
  const auto nx = static_cast<Eigen::Index>(xs.size());
  const auto na = alphas.size();
  const int ni = i_max - i_min + 1;
  const double lam_lo = static_cast<double>(i_min) * i_min;
  const double lam_hi = static_cast<double>(i_max + 1) * (i_max + 1);
  const int m_max = static_cast<int>(lam_hi);
  const std::vector<double> seeds = harmonics::profile_seed_logs(m_max);

  // sums[a][i - i_min] per x; a = na is the low sum
  std::vector<std::vector<Eigen::ArrayXd>> sums(na + 1, std::vector<Eigen::ArrayXd>(static_cast<std::size_t>(ni)));
  for (auto& s : sums)
    for (auto& v : s) v = Eigen::ArrayXd::Zero(nx);

  // lanes are independent: split the grid into fixed blocks
  constexpr Eigen::Index lanes = 256;
  const auto nblocks = static_cast<std::size_t>((nx + lanes - 1) / lanes);
  parallel_for(nblocks, [&](std::size_t bi) {
    const Eigen::Index x0 = static_cast<Eigen::Index>(bi) * lanes;
    const Eigen::Index w = std::min(lanes, nx - x0);
    Eigen::ArrayXd xb(w);
    for (Eigen::Index k = 0; k < w; ++k) xb[k] = xs[static_cast<std::size_t>(x0 + k)];
    std::vector<std::vector<Eigen::ArrayXd>> acc(na + 1, std::vector<Eigen::ArrayXd>(static_cast<std::size_t>(ni)));
    for (auto& s : acc)
      for (auto& v : s) v = Eigen::ArrayXd::Zero(w);
    std::vector<double> wa(na);
    for (int m = 0; m <= m_max; ++m) {
      const int L = degree_limit(m, lam_hi);
      if (L < m) break;
      harmonics::DegreeSweep sw(m, xb, seeds[static_cast<std::size_t>(m)]);
      for (int l = m; l <= L; ++l) {
        if (l > m) sw.advance();
        const std::int64_t lam = static_cast<std::int64_t>(l) * (l + 1) - static_cast<std::int64_t>(m) * m;
        if (static_cast<double>(lam) < lam_lo) continue;
        const bool high = m > 0 && m >= eps * (l + 0.5);
        const bool low = m <= eps * (l + 0.5);
        const std::int64_t r = isqrt(lam);
        // lambda = i^2 belongs to the blocks of i - 1 and i
        const std::int64_t cand[2] = {r, r * r == lam ? r - 1 : -1};
        const Eigen::ArrayXd v2 = sw.values().square();
        if (high)
          for (std::size_t a = 0; a < na; ++a)
            wa[a] = 2.0 * std::pow(static_cast<double>(lam), alphas[a]) * std::pow(static_cast<double>(m), -2 * alphas[a]);
        for (std::int64_t i : cand) {
          if (i < i_min || i > i_max) continue;
          const auto ii = static_cast<std::size_t>(i - i_min);
          if (high)
            for (std::size_t a = 0; a < na; ++a) acc[a][ii] += wa[a] * v2;
          if (low) acc[na][ii] += (m == 0 ? 1.0 : 2.0) * v2;
        }
      }
    }
    for (std::size_t a = 0; a <= na; ++a)
      for (int i = 0; i < ni; ++i) sums[a][static_cast<std::size_t>(i)].segment(x0, w) = acc[a][static_cast<std::size_t>(i)];
  });

  std::vector<PlancherelScan> out;
  for (std::size_t a = 0; a <= na; ++a) {
    PlancherelScan s;
    s.kind = a < na ? "high" : "low";
    s.eps = eps;
    s.alpha = a < na ? alphas[a] : 0.0;
    for (int i = i_min; i <= i_max; ++i) {
      const auto& v = sums[a][static_cast<std::size_t>(i - i_min)];
      double best = -1.0, arg = 0.0;
      for (Eigen::Index k = 0; k < nx; ++k) {
        const double x = xs[static_cast<std::size_t>(k)];
        double val = v[k] / i;
        if (a < na) val *= std::pow(std::max(1.0 / i, x), 1 - 2 * s.alpha);
        if (val > best) {
          best = val;
          arg = x;
        }
      }
      s.i.push_back(i);
      s.sup.push_back(best);
      s.argmax_x.push_back(arg);
    }
    for (int lo = 1; lo <= i_max; lo *= 2) {
      const int b_lo = std::max(lo, i_min), b_hi = std::min(2 * lo - 1, i_max);
      if (b_lo > b_hi) continue;
      PlancherelBlock b{b_lo, b_hi, 0.0};
      for (int i = b_lo; i <= b_hi; ++i) b.sup = std::max(b.sup, s.sup[static_cast<std::size_t>(i - i_min)]);
      s.blocks.push_back(b);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace grushin::spectral

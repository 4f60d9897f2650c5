#include "grushin/checks.hpp"

#include <cmath>

namespace grushin::harmonics {

AdditionCheck addition_theorem_check(int l_max, int points) {
  if (l_max < 0) throw DomainError("l_max must be nonnegative");
  if (points < 2) throw ConfigError("addition check needs at least two points");
  Eigen::ArrayXd xs(points);
  for (int k = 0; k < points; ++k) xs[k] = -1.0 + 2.0 * k / (points - 1);
  const auto seeds = profile_seed_logs(l_max);
  std::vector<Eigen::ArrayXd> partial(static_cast<std::size_t>(l_max) + 1);
  // per order, then summed over m in increasing order
  std::vector<std::vector<Eigen::ArrayXd>> by_m(static_cast<std::size_t>(l_max) + 1);
  parallel_for(static_cast<std::size_t>(l_max) + 1, [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    DegreeSweep sw(m, xs, seeds[mi]);
    auto& out = by_m[mi];
    for (int l = m; l <= l_max; ++l) {
      if (l > m) sw.advance();
      out.push_back((m == 0 ? 1.0 : 2.0) * sw.values().square());
    }
  });
  AdditionCheck r;
  r.l_max = l_max;
  r.points = points;
  for (int l = 0; l <= l_max; ++l) {
    Eigen::ArrayXd s = Eigen::ArrayXd::Zero(points);
    for (int m = 0; m <= l; ++m) s += by_m[static_cast<std::size_t>(m)][static_cast<std::size_t>(l - m)];
    const double want = (2 * l + 1) / (4 * pi);
    for (int k = 0; k < points; ++k) {
      const double e = std::abs(s[k] - want) / want;
      if (e > r.max_rel_err) {
        r.max_rel_err = e;
        r.worst_l = l;
        r.worst_x = xs[k];
      }
    }
  }
  return r;
}

OrthonormalityCheck orthonormality_check(int l_max) {
  if (l_max < 0) throw DomainError("l_max must be nonnegative");
  const auto g = gauss_grid(l_max + 1);
  const Eigen::ArrayXd xs = g.nodes.array();
  const auto seeds = profile_seed_logs(l_max);
  OrthonormalityCheck r;
  r.l_max = l_max;
  for (int m = 0; m <= l_max; ++m) {
    const int n = l_max - m + 1;
    Eigen::MatrixXd Y(xs.size(), n);
    DegreeSweep sw(m, xs, seeds[static_cast<std::size_t>(m)]);
    for (int k = 0; k < n; ++k) {
      if (k > 0) sw.advance();
      Y.col(k) = sw.values().matrix();
    }
    const Eigen::MatrixXd G = 2 * pi * Y.transpose() * g.weights.asDiagonal() * Y;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double e = std::abs(G(a, b) - (a == b ? 1.0 : 0.0));
        if (e > r.max_residual) {
          r.max_residual = e;
          r.worst_a = {m + a, m};
          r.worst_b = {m + b, m};
        }
      }
  }
  return r;
}

ParityCheck parity_check(int l_max, int points) {
  if (l_max < 0) throw DomainError("l_max must be nonnegative");
  const Eigen::ArrayXd xs = chebyshev_points(points, true);
  ParityCheck r;
  r.l_max = l_max;
  for (int l = 0; l <= l_max; ++l) {
    const double scale = std::sqrt((2 * l + 1) / (4 * pi));
    for (int m = -l; m <= l; ++m)
      for (Eigen::Index k = 0; k < xs.size(); ++k) {
        const double x = xs[k];
        const double v = eval_profile(HarmonicIndex{l, m}, x);
        const double w = eval_profile(HarmonicIndex{l, -m}, x);
        r.max_order_residual = std::max(r.max_order_residual, std::abs(std::abs(v) - std::abs(w)));
        const double sign = ((l + m) % 2 == 0) ? 1.0 : -1.0;
        const double u = eval_profile(HarmonicIndex{l, m}, -x);
        r.max_reflection_residual = std::max(r.max_reflection_residual, std::abs(u - sign * v) / scale);
      }
  }
  return r;
}

}  // namespace grushin::harmonics

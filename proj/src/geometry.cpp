#include "grushin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>

#include "grushin/harmonics.hpp"

namespace grushin::geometry {

namespace {

constexpr double half_pi = pi / 2;
constexpr double two_pi = 2 * pi;
constexpr double pole_snap = 1e-3;
constexpr double phi_cost_clamp = 1e3;
constexpr int min_cells = 32;

double wrap_2pi(double phi) {
  double r = std::fmod(phi, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

// Signed offset b - a reduced to (-pi, pi].
double signed_offset(double a, double b) {
  double d = std::remainder(b - a, two_pi);
  if (d <= -pi) d += two_pi;
  return d;
}

double phi_coefficient(double theta) { return std::min(1.0 / std::abs(std::tan(theta)), phi_cost_clamp); }

double snap(double theta) {
  if (theta > half_pi - pole_snap) return half_pi;
  if (theta < -half_pi + pole_snap) return -half_pi;
  return theta;
}

int cells_for(double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) throw ConfigError("resolution must be positive");
  const double n = std::round(1.0 / resolution);
  if (n < min_cells) {
    std::ostringstream s;
    s << "resolution " << resolution << " gives " << n << " cells per axis; at least " << min_cells << " are required";
    throw ConfigError(s.str());
  }
  if (n > 1 << 15) throw ConfigError("resolution finer than 1/32768 is not supported");
  return static_cast<int>(n);
}

// Chart grid through an origin node. Rows ascend in theta; columns are phi
// offsets from the origin, ascending from 0 (periodic) or centered on 0
// (patch). Spacing is uniform apart from optional inserted lines through a
// target point and rows added at the poles.
struct ChartGrid {
  std::vector<double> theta;
  std::vector<double> offset;
  double phi0 = 0.0;
  bool periodic = true;
  int origin_row = 0;
  int origin_col = 0;
  std::vector<double> krow, kmid, vgap, cgap;

  int rows() const { return static_cast<int>(theta.size()); }
  int cols() const { return static_cast<int>(offset.size()); }
  int node(int i, int j) const { return i * cols() + j; }

  void build_rows(double theta_p, double lo, double hi, double dtheta, std::optional<double> extra = {}) {
    const int i_lo = static_cast<int>(std::ceil((lo - theta_p) / dtheta - 1e-9));
    const int i_hi = static_cast<int>(std::floor((hi - theta_p) / dtheta + 1e-9));
    for (int i = i_lo; i <= i_hi; ++i) theta.push_back(std::clamp(theta_p + i * dtheta, -half_pi, half_pi));
    if (lo <= -half_pi) theta.push_back(-half_pi);
    if (hi >= half_pi) theta.push_back(half_pi);
    if (extra) theta.push_back(*extra);
    dedupe(theta);
    origin_row = index_of(theta, theta_p);
  }

  void build_cols(std::vector<double> offsets) {
    offset = std::move(offsets);
    dedupe(offset);
    origin_col = index_of(offset, 0.0);
  }

  void build_costs() {
    const int n = rows(), c = cols();
    krow.resize(n);
    kmid.assign(n, 0.0);
    vgap.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      krow[i] = phi_coefficient(theta[i]);
      if (i + 1 < n) {
        vgap[i] = theta[i + 1] - theta[i];
        kmid[i] = phi_coefficient(0.5 * (theta[i] + theta[i + 1]));
      }
    }
    cgap.assign(c, std::numeric_limits<double>::infinity());
    for (int j = 0; j + 1 < c; ++j) cgap[j] = offset[j + 1] - offset[j];
    if (periodic) cgap[c - 1] = two_pi - offset[c - 1] + offset[0];
  }

  // Cost of the move from (i, j) by (di, dj); `gap` is the phi spacing crossed.
  double edge(int i, int di, double gap) const {
    if (di == 0) return gap * krow[i];
    const int lo = di > 0 ? i : i - 1;
    if (gap == 0.0) return vgap[lo];
    return std::hypot(vgap[lo], gap * kmid[lo]);
  }

  static void dedupe(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
      if (out.empty() || x - out.back() > 1e-12) out.push_back(x);
    v = std::move(out);
  }

  static int index_of(const std::vector<double>& v, double x) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(v.size()); ++k)
      if (std::abs(v[k] - x) < std::abs(v[best] - x)) best = k;
    return best;
  }
};

// Full sphere, periodic in phi, with exact lines through q.
ChartGrid full_sphere_grid(const SpherePoint& p, const SpherePoint& q, int n) {
  ChartGrid g;
  g.phi0 = p.phi;
  g.periodic = true;
  g.build_rows(p.theta, -half_pi, half_pi, pi / n, q.theta);
  double t = signed_offset(p.phi, q.phi);
  if (t < 0) t += two_pi;
  std::vector<double> offs;
  for (int j = 0; j < n; ++j) offs.push_back(two_pi * j / n);
  if (t < two_pi - 1e-12) offs.push_back(t);
  g.build_cols(std::move(offs));
  g.build_costs();
  return g;
}

// Smallest grid containing every point within sub-Riemannian distance r of p:
// along a horizontal curve |dtheta| <= ds and |dphi| <= tan|theta| ds.
ChartGrid ball_patch_grid(const SpherePoint& p, double r, int n) {
  ChartGrid g;
  g.phi0 = p.phi;
  const double reach = 1.05 * r;
  const double lo = std::max(-half_pi, p.theta - reach), hi = std::min(half_pi, p.theta + reach);
  const double top = std::abs(p.theta) + reach;
  const double width = top >= half_pi ? std::numeric_limits<double>::infinity() : reach * std::tan(top);
  std::vector<double> offs;
  if (width >= pi) {
    g.periodic = true;
    for (int j = 0; j < n; ++j) offs.push_back(two_pi * j / n);
  } else {
    g.periodic = false;
    const int h = n / 2;
    for (int j = -h; j <= h; ++j) offs.push_back(width * j / h);
  }
  g.build_rows(p.theta, lo, hi, (hi - lo) / n);
  g.build_cols(std::move(offs));
  g.build_costs();
  return g;
}

// Dijkstra from the grid origin; `stop(d, node)` is consulted after each
// settled node and ends the search when it returns true.
template <class Stop>
std::vector<double> dijkstra(const ChartGrid& g, Stop&& stop) {
  const int rows = g.rows(), cols = g.cols();
  std::vector<double> dist(static_cast<std::size_t>(rows) * cols, std::numeric_limits<double>::infinity());
  std::vector<char> settled(dist.size(), 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const int src = g.node(g.origin_row, g.origin_col);
  dist[src] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    if (stop(d, u)) break;
    const int i = u / cols, j = u % cols;
    for (int dj = -1; dj <= 1; ++dj) {
      int nj = j + dj;
      double gap = 0.0;
      if (dj != 0) {
        if (g.periodic) {
          nj = (nj + cols) % cols;
        } else if (nj < 0 || nj >= cols) {
          continue;
        }
        gap = dj > 0 ? g.cgap[j] : g.cgap[nj];
      }
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const int ni = i + di;
        if (ni < 0 || ni >= rows) continue;
        const int v = g.node(ni, nj);
        if (settled[v]) continue;
        const double nd = d + g.edge(i, di, gap);
        if (nd < dist[v]) {
          dist[v] = nd;
          heap.emplace(nd, v);
        }
      }
    }
  }
  return dist;
}

}  // namespace

SpherePoint SpherePoint::make(double theta, double phi) {
  if (!(theta >= -half_pi && theta <= half_pi)) {
    std::ostringstream s;
    s << "latitude " << theta << " outside [-pi/2, pi/2]";
    throw DomainError(s.str());
  }
  if (!std::isfinite(phi)) throw DomainError("longitude must be finite");
  return SpherePoint{theta, wrap_2pi(phi)};
}

Eigen::Vector3d SpherePoint::embed() const {
  const double c = std::cos(theta);
  return {c * std::cos(phi), c * std::sin(phi), std::sin(theta)};
}

double circle_distance(double phi1, double phi2) { return std::abs(signed_offset(phi1, phi2)); }

double phi_distance(const SpherePoint& p, const SpherePoint& q) {
  const double dphi = circle_distance(p.phi, q.phi);
  const double dtheta = std::abs(p.theta - q.theta);
  if (dphi == 0.0) return dtheta;
  const double t = std::max(std::abs(std::tan(p.theta)), std::abs(std::tan(q.theta)));
  const double root = std::sqrt(dphi);
  if (t == 0.0) return dtheta + root;
  return dtheta + std::min(root, dphi / t);
}

double riemannian_distance(const SpherePoint& p, const SpherePoint& q) {
  const Eigen::Vector3d a = p.embed(), b = q.embed();
  // atan2 form is accurate for both nearby and nearly antipodal points
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

std::string to_string(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::closed_form_phi:
      return "closed_form_phi";
    case DistanceMethod::eikonal:
      return "eikonal";
    case DistanceMethod::riemannian:
      return "riemannian";
  }
  return "unknown";
}

DistanceResult eikonal_distance(const SpherePoint& p_in, const SpherePoint& q_in, double resolution) {
  const int n = cells_for(resolution);
  const SpherePoint p{snap(p_in.theta), p_in.phi}, q{snap(q_in.theta), q_in.phi};
  const ChartGrid g = full_sphere_grid(p, q, n);
  double t = signed_offset(p.phi, q.phi);
  if (t < 0) t += two_pi;
  const int target = g.node(ChartGrid::index_of(g.theta, q.theta), ChartGrid::index_of(g.offset, t));
  const auto dist = dijkstra(g, [&](double, int u) { return u == target; });
  DistanceResult r;
  r.method = DistanceMethod::eikonal;
  r.resolution = pi / n;
  r.value = dist[target];
  r.error_estimate = std::hypot(r.resolution, two_pi / n * phi_coefficient(q.theta));
  return r;
}

double ball_volume_closed(const SpherePoint& p, double r) {
  if (!(r >= 0.0)) throw DomainError("radius must be nonnegative");
  return std::min(1.0, r * r * std::max(r, std::abs(p.theta)));
}

double ball_volume_numeric(const SpherePoint& p_in, double r, double resolution) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
  const int n = cells_for(resolution);
  const SpherePoint p{snap(p_in.theta), p_in.phi};
  const ChartGrid g = ball_patch_grid(p, r, n);
  const auto dist = dijkstra(g, [&](double d, int) { return d >= r; });
  const int rows = g.rows();
  // cell edges halfway between rows, outer edges half a spacing out, clipped to the poles
  std::vector<double> edges(rows + 1);
  for (int i = 1; i < rows; ++i) edges[i] = 0.5 * (g.theta[i - 1] + g.theta[i]);
  edges[0] = rows > 1 ? g.theta[0] - 0.5 * (g.theta[1] - g.theta[0]) : g.theta[0];
  edges[rows] = rows > 1 ? g.theta[rows - 1] + 0.5 * (g.theta[rows - 1] - g.theta[rows - 2]) : g.theta[0];
  CompensatedSum total;
  // uniform columns: every node carries one column spacing of longitude
  const double dphi = g.periodic ? two_pi / g.cols() : g.cgap[0];
  for (int i = 0; i < rows; ++i) {
    const double lo = std::clamp(edges[i], -half_pi, half_pi), hi = std::clamp(edges[i + 1], -half_pi, half_pi);
    const double area = dphi * std::abs(std::sin(hi) - std::sin(lo));
    int inside = 0;
    for (int j = 0; j < g.cols(); ++j) inside += dist[g.node(i, j)] < r;
    total.add(area * inside);
  }
  return total.value();
}

double weight(double r, const SpherePoint& z, const SpherePoint& zp) {
  if (!(r > 0.0)) throw DomainError("weight requires r > 0");
  return std::abs(z.theta) / std::max(r, std::abs(zp.theta));
}

namespace {

std::vector<double> merged_breakpoints(std::vector<std::vector<double>> sets) {
  std::vector<double> all;
  for (auto& s : sets) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double x : all)
    if (out.empty() || x - out.back() > 1e-15) out.push_back(x);
  return out;
}

struct LemmaIntegral {
  double lhs = 0.0;
  double pointwise = 0.0;
  std::size_t nodes = 0;
};

LemmaIntegral lemma_integral(double alpha, double beta, double r, const SpherePoint& zp, int ppp) {
  using harmonics::composite_gauss;
  using harmonics::graded_breakpoints;
  using harmonics::panel_breakpoints;
  constexpr int levels = 48;
  const double tp = zp.theta;
  const auto tb = merged_breakpoints({graded_breakpoints(-half_pi, half_pi, tp, levels),
                                      graded_breakpoints(-half_pi, half_pi, 0.0, levels),
                                      graded_breakpoints(-half_pi, half_pi, -tp, levels),
                                      panel_breakpoints(-half_pi, half_pi, 0.05)});
  const auto pb = merged_breakpoints({graded_breakpoints(0.0, pi, 0.0, levels), panel_breakpoints(0.0, pi, 0.05)});
  const auto tq = composite_gauss(tb, ppp);
  const auto pq = composite_gauss(pb, ppp);
  const double tan_p = std::abs(std::tan(tp));
  const double wscale = std::max(r, std::abs(tp));
  const Eigen::Index nt = tq.nodes.size(), np = pq.nodes.size();
  std::vector<double> row(nt), row_max(nt);
  parallel_for(static_cast<std::size_t>(nt), [&](std::size_t a) {
    const double th = tq.nodes[a];
    const double t = std::max(std::abs(std::tan(th)), tan_p);
    const double w = std::abs(th) / wscale;
    const double wfac = std::pow(1.0 + w, -alpha);
    const double dth = std::abs(th - tp);
    CompensatedSum s;
    double mx = 0.0;
    for (Eigen::Index b = 0; b < np; ++b) {
      const double dp = pq.nodes[b];
      const double root = std::sqrt(dp);
      const double phi = dth + (t == 0.0 ? root : std::min(root, dp / t));
      s.add(pq.weights[b] * std::pow(1.0 + phi / r, -beta));
      mx = std::max(mx, (1.0 + w) / (1.0 + phi / r));
    }
    // Delta phi = 0 column of the pointwise check
    mx = std::max(mx, (1.0 + w) / (1.0 + dth / r));
    row[a] = 2.0 * tq.weights[a] * std::cos(th) * wfac * s.value();
    row_max[a] = mx;
  });
  LemmaIntegral out;
  out.lhs = compensated_sum(row);
  out.pointwise = *std::max_element(row_max.begin(), row_max.end());
  out.nodes = static_cast<std::size_t>(nt * np);
  return out;
}

}  // namespace

WeightLemmaResult weight_lemma_check(double alpha, double beta, double r, const SpherePoint& zp, int points_per_panel) {
  if (!(r > 0.0)) throw DomainError("weight lemma requires r > 0");
  if (!(alpha >= 0.0)) throw DomainError("weight lemma requires alpha >= 0");
  if (!(beta >= 0.0)) throw DomainError("weight lemma requires beta >= 0");
  if (!(alpha + beta > 3.0)) throw DomainError("weight lemma requires alpha + beta > 3");
  if (!(alpha < 1.0)) throw DomainError("weight lemma requires alpha < 1");
  if (points_per_panel < 2) throw ConfigError("weight lemma needs at least 2 points per panel");
  const auto base = lemma_integral(alpha, beta, r, zp, points_per_panel);
  const auto fine = lemma_integral(alpha, beta, r, zp, 2 * points_per_panel);
  WeightLemmaResult res;
  res.lhs = base.lhs;
  res.rhs_model = ball_volume_closed(zp, r);
  res.ratio = base.lhs / res.rhs_model;
  res.ratio_doubled = fine.lhs / res.rhs_model;
  res.pointwise_constant = base.pointwise;
  res.pointwise_constant_doubled = fine.pointwise;
  res.nodes = base.nodes;
  const auto close = [](double a, double b) { return std::abs(a - b) < 0.1 * std::max(std::abs(a), std::abs(b)); };
  res.stable = std::isfinite(res.ratio) && close(res.ratio, res.ratio_doubled) &&
               close(res.pointwise_constant, res.pointwise_constant_doubled);
  return res;
}

SpherePoint sample_uniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), v(0.0, two_pi);
  const double s = u(rng);
  const double phi = v(rng);
  return SpherePoint::make(std::asin(s), phi);
}

std::vector<PairRecord> sample_pairs(int n, std::uint64_t seed, double resolution) {
  if (n < 0) throw DomainError("pair count must be nonnegative");
  cells_for(resolution);
  std::mt19937_64 rng(seed);
  std::vector<PairRecord> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[i].pair_id = i;
    out[i].p = sample_uniform(rng);
    out[i].q = sample_uniform(rng);
  }
  parallel_for(out.size(), [&](std::size_t i) {
    auto& rec = out[i];
    rec.phi_dist = phi_distance(rec.p, rec.q);
    rec.eikonal_dist = eikonal_distance(rec.p, rec.q, resolution).value;
    rec.riemannian_dist = riemannian_distance(rec.p, rec.q);
    rec.ratio = rec.eikonal_dist / rec.phi_dist;
  });
  return out;
}

std::string pair_region(const PairRecord& rec) {
  const double hi = std::max(std::abs(rec.p.theta), std::abs(rec.q.theta));
  const double lo = std::min(std::abs(rec.p.theta), std::abs(rec.q.theta));
  if (hi < 0.25) return "equatorial";
  if (lo > half_pi - 0.25) return "polar";
  return "intermediate";
}

std::vector<RegionConstants> region_constants(const std::vector<PairRecord>& pairs) {
  std::vector<RegionConstants> out;
  for (const char* name : {"equatorial", "intermediate", "polar"}) {
    RegionConstants rc;
    rc.region = name;
    for (const auto& rec : pairs) {
      if (pair_region(rec) != rc.region || !std::isfinite(rec.ratio)) continue;
      ++rc.count;
      rc.min_ratio = std::min(rc.min_ratio, rec.ratio);
      rc.max_ratio = std::max(rc.max_ratio, rec.ratio);
    }
    out.push_back(rc);
  }
  return out;
}

double loglog_slope(const std::vector<double>& r, const std::vector<double>& v) {
  if (r.size() != v.size() || r.size() < 2) throw DomainError("slope needs at least two matching samples");
  const Eigen::Index n = static_cast<Eigen::Index>(r.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(r[i] > 0 && v[i] > 0)) throw DomainError("slope needs positive samples");
    a(i, 0) = std::log(r[i]);
    a(i, 1) = 1.0;
    y[i] = std::log(v[i]);
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
  return coef[0];
}

}  // namespace grushin::geometry

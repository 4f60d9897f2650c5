#include "grushin/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace grushin::harmonics {

void require_index(int l, int m) {
  if (l < 0 || std::abs(m) > l) {
    std::ostringstream os;
    os << "index (" << l << ", " << m << ") violates |m| <= l";
    throw DomainError(os.str());
  }
}

void require_unit_interval(double x, const char* what) {
  if (!(x >= -1.0 && x <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << x << " outside [-1, 1]";
    throw DomainError(os.str());
  }
}

HarmonicIndex HarmonicIndex::checked(int l, int m) {
  require_index(l, m);
  return HarmonicIndex{l, m};
}

ScaledReal ScaledReal::from_double(double v) {
  ScaledReal s;
  if (v == 0.0 || std::isnan(v)) return s;
  s.sign = v > 0 ? 1 : -1;
  s.log_magnitude = std::log(std::abs(v));
  return s;
}

double ScaledReal::to_double() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_magnitude);
}

double log_profile_normalization(int l, int m) {
  require_index(l, m);
  return 0.5 * (std::log((2.0 * l + 1.0) / (4.0 * pi)) + std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0));
}

double assoc_legendre(int l, int m, double x) {
  require_index(l, m);
  require_unit_interval(x);
  const double y = eval_profile<double>(HarmonicIndex{l, m}, x);
  return y * std::exp(-log_profile_normalization(l, m));
}

std::vector<double> profile_seed_logs(int m_max) {
  std::vector<double> out(static_cast<std::size_t>(std::max(m_max, 0)) + 1);
  double log_prod = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    if (m > 0) log_prod += std::log((2.0 * m - 1.0) / (2.0 * m));
    out[static_cast<std::size_t>(m)] = 0.5 * (std::log((2.0 * m + 1.0) / (4.0 * pi)) + log_prod);
  }
  return out;
}

// ---------------------------------------------------------------------------

DegreeSweep::DegreeSweep(int m, const Eigen::ArrayXd& xs, double seed_log) : m_(m), l_(m), x_(xs) {
  if (m < 0) throw DomainError("DegreeSweep: order must be nonnegative");
  const Eigen::Index n = xs.size();
  prev_.setZero(n);
  cur_.resize(n);
  exponent_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = xs[i];
    require_unit_interval(x);
    const double omx2 = (1.0 - x) * (1.0 + x);
    if (m > 0 && omx2 <= 0.0) {
      cur_[i] = 0.0;
      exponent_[i] = 0.0;
      continue;
    }
    const double L = seed_log + (m > 0 ? 0.5 * m * std::log(omx2) : 0.0);
    const double e = std::floor(L / std::numbers::ln2);
    exponent_[i] = e;
    cur_[i] = std::exp(L - e * std::numbers::ln2);
    if (m % 2 != 0) cur_[i] = -cur_[i];
  }
  scale_ = exponent_.unaryExpr([](double e) { return std::ldexp(1.0, static_cast<int>(std::max(e, -2000.0))); });
  value_ = cur_ * scale_;
}

double DegreeSweep::log_abs(Eigen::Index i) const {
  if (cur_[i] == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(cur_[i])) + exponent_[i] * std::numbers::ln2;
}

void DegreeSweep::advance() {
  const int L = l_ + 1;
  const double dL = L;
  const double alpha = std::sqrt((2.0 * dL - 1.0) * (2.0 * dL + 1.0) / ((dL - m_) * (dL + m_)));
  next_ = alpha * (x_ * cur_ - inv_alpha_prev_ * prev_);
  inv_alpha_prev_ = 1.0 / alpha;
  prev_.swap(cur_);
  cur_.swap(next_);
  l_ = L;
  if (++since_check_ >= 8) {
    since_check_ = 0;
    renormalize();
  }
  value_ = cur_ * scale_;
}

void DegreeSweep::renormalize() {
  const double big = std::ldexp(1.0, 300);
  const double small = std::ldexp(1.0, -300);
  bool changed = false;
  for (Eigen::Index i = 0; i < cur_.size(); ++i) {
    const double mx = std::max(std::abs(cur_[i]), std::abs(prev_[i]));
    if (mx > big) {
      cur_[i] = std::ldexp(cur_[i], -300);
      prev_[i] = std::ldexp(prev_[i], -300);
      exponent_[i] += 300;
      changed = true;
    } else if (mx > 0.0 && mx < small) {
      cur_[i] = std::ldexp(cur_[i], 300);
      prev_[i] = std::ldexp(prev_[i], 300);
      exponent_[i] -= 300;
      changed = true;
    }
  }
  if (changed)
    scale_ = exponent_.unaryExpr([](double e) { return std::ldexp(1.0, static_cast<int>(std::max(e, -2000.0))); });
}

// ---------------------------------------------------------------------------

double bessel_j_series(double nu, double z, int terms) {
  if (nu < -0.5) throw DomainError("bessel_j: order below -1/2");
  if (z == 0.0) return nu == 0.0 ? 1.0 : (nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  const double h = z / 2.0;
  double term = std::pow(std::abs(h), nu) / std::tgamma(nu + 1.0);
  if (z < 0.0 && nu != std::floor(nu)) throw DomainError("bessel_j: negative argument needs integer order");
  if (z < 0.0 && static_cast<long>(nu) % 2 != 0) term = -term;
  CompensatedSum s;
  s.add(term);
  for (int k = 1; k < terms; ++k) {
    term *= -(h * h) / (k * (k + nu));
    s.add(term);
    if (std::abs(term) < 1e-18 * std::abs(s.value())) break;
  }
  return s.value();
}

double bessel_j(double nu, double z) {
  if (!(nu >= -0.5)) throw DomainError("bessel_j: order below -1/2");
  if (z < 0.0) {
    if (nu != std::floor(nu)) throw DomainError("bessel_j: negative argument needs integer order");
    const double v = bessel_j(nu, -z);
    return static_cast<long>(nu) % 2 == 0 ? v : -v;
  }
  if (z == 0.0) return nu == 0.0 ? 1.0 : (nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  if (nu >= 0.0) return std::cyl_bessel_j(nu, z);
  // J_nu = (2(nu+1)/z) J_{nu+1} - J_{nu+2}, stable in the decreasing-order direction.
  const double j1 = std::cyl_bessel_j(nu + 1.0, z);
  const double j2 = std::cyl_bessel_j(nu + 2.0, z);
  return 2.0 * (nu + 1.0) / z * j1 - j2;
}

// ---------------------------------------------------------------------------

QuadratureGrid gauss_grid(int n) {
  if (n < 1) throw DomainError("gauss_grid: n must be positive");
  QuadratureGrid g;
  g.nodes.resize(n);
  g.weights.resize(n);
  g.exactness_degree = 2 * n - 1;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre_poly_and_derivative(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    legendre_poly_and_derivative(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

QuadratureGrid composite_gauss(const std::vector<double>& breakpoints, int points_per_panel) {
  if (breakpoints.size() < 2) throw DomainError("composite_gauss: need at least two breakpoints");
  const QuadratureGrid base = gauss_grid(points_per_panel);
  const Eigen::Index panels = static_cast<Eigen::Index>(breakpoints.size()) - 1;
  QuadratureGrid g;
  g.nodes.resize(panels * points_per_panel);
  g.weights.resize(panels * points_per_panel);
  g.exactness_degree = base.exactness_degree;
  for (Eigen::Index k = 0; k < panels; ++k) {
    const double a = breakpoints[k], b = breakpoints[k + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    g.nodes.segment(k * points_per_panel, points_per_panel) = (c + h * base.nodes.array()).matrix();
    g.weights.segment(k * points_per_panel, points_per_panel) = h * base.weights;
  }
  return g;
}

std::vector<double> panel_breakpoints(double a, double b, double h, std::vector<double> mandatory) {
  std::vector<double> cuts{a, b};
  for (double c : mandatory)
    if (c > a && c < b) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> out{cuts.front()};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h - 1e-12)));
    for (int j = 1; j <= n; ++j) out.push_back(j == n ? hi : lo + (hi - lo) * j / n);
  }
  return out;
}

std::vector<double> graded_breakpoints(double a, double b, double center, int levels, double ratio) {
  std::vector<double> pts{a, b};
  center = std::clamp(center, a, b);
  pts.push_back(center);
  double dl = center - a, dr = b - center;
  for (int k = 0; k < levels; ++k) {
    dl *= ratio;
    dr *= ratio;
    if (dl > 0) pts.push_back(center - dl);
    if (dr > 0) pts.push_back(center + dr);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

namespace {

struct Interval {
  double a, b, value, error;
  int depth;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gauss_kronrod_like(const std::function<double(double)>& f, double a, double b, int depth) {
  static const QuadratureGrid g10 = gauss_grid(10);
  static const QuadratureGrid g21 = gauss_grid(21);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  CompensatedSum s1, s2;
  for (Eigen::Index i = 0; i < g10.size(); ++i) s1.add(g10.weights[i] * f(c + h * g10.nodes[i]));
  for (Eigen::Index i = 0; i < g21.size(); ++i) s2.add(g21.weights[i] * f(c + h * g21.nodes[i]));
  const double v1 = h * s1.value(), v2 = h * s2.value();
  return Interval{a, b, v2, std::abs(v2 - v1), depth};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  std::priority_queue<Interval> heap;
  std::vector<Interval> done;
  heap.push(gauss_kronrod_like(f, a, b, 0));
  double total = heap.top().value, err = heap.top().error;
  for (int iter = 0; iter < 20000 && !heap.empty(); ++iter) {
    if (err <= rel_tol * std::abs(total) || err < 1e-300) break;
    Interval worst = heap.top();
    heap.pop();
    if (worst.depth >= max_depth) {
      done.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Interval l = gauss_kronrod_like(f, worst.a, mid, worst.depth + 1);
    Interval r = gauss_kronrod_like(f, mid, worst.b, worst.depth + 1);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(), [](const Interval& p, const Interval& q) { return p.a < q.a; });
  CompensatedSum s;
  for (const auto& iv : done) s.add(iv.value);
  return s.value();
}

Eigen::ArrayXd chebyshev_points(int n, bool lobatto) {
  if (n < 1) throw DomainError("chebyshev_points: n must be positive");
  Eigen::ArrayXd x(n);
  for (int k = 0; k < n; ++k) {
    if (lobatto)
      x[k] = n == 1 ? 0.0 : -std::cos(pi * k / (n - 1));
    else
      x[k] = -std::cos(pi * (2 * k + 1) / (2.0 * n));
  }
  return x;
}

}  // namespace grushin::harmonics

#include "grushin/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace grushin::bounds {

using harmonics::DegreeSweep;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct FamilyName {
  Family f;
  const char* name;
};

constexpr FamilyName family_names[] = {
    {Family::classical_i, "classical_i"},
    {Family::classical_ii, "classical_ii"},
    {Family::classical_iii, "classical_iii"},
    {Family::hermite_regime_main, "hermite_regime_main"},
    {Family::hermite_regime_tail, "hermite_regime_tail"},
    {Family::bessel_regime_main, "bessel_regime_main"},
    {Family::bessel_regime_tail, "bessel_regime_tail"},
    {Family::combined, "combined"},
};

bool hermite_regime(HarmonicIndex idx, double eps) { return std::abs(idx.m) >= eps * idx.halfdeg(); }
bool bessel_regime(HarmonicIndex idx, double eps) { return std::abs(idx.m) <= eps * idx.halfdeg(); }

double a_squared(HarmonicIndex idx) {
  const double b = idx.b();
  return (1.0 - b) * (1.0 + b);
}

// Additive constant A in (A + |x^2 - a^2|)^{-1/4} for the three peak-shaped families.
double peak_offset(Family f, HarmonicIndex idx) {
  const double l1 = 1.0 + idx.l;
  const double m1 = 1.0 + std::abs(idx.m);
  switch (f) {
    case Family::hermite_regime_main:
      return 1.0 / l1;
    case Family::bessel_regime_main:
      return std::pow(m1, 4.0 / 3.0) / (l1 * l1);
    case Family::combined:
      return m1 / (l1 * l1);
    default:
      return 0.0;
  }
}

// log of the envelope; +inf where the envelope is singular.
double log_envelope(const Envelope& e, HarmonicIndex idx, double x) {
  const double l1 = 1.0 + idx.l;
  const double ax = std::abs(x);
  const double omx2 = (1.0 - ax) * (1.0 + ax);
  switch (e.family) {
    case Family::classical_i:
      return 0.5 * std::log(l1);
    case Family::classical_ii:
      return omx2 <= 0.0 ? inf : 0.25 * std::log(l1) - 0.25 * std::log(omx2);
    case Family::classical_iii: {
      const double w = ax * omx2;
      return w <= 0.0 ? inf : std::log(l1) / 6.0 - std::log(w) / 6.0;
    }
    case Family::hermite_regime_main:
    case Family::bessel_regime_main:
    case Family::combined:
      return -0.25 * std::log(peak_offset(e.family, idx) + std::abs(x * x - a_squared(idx)));
    case Family::hermite_regime_tail:
      return -0.5 * std::log(ax) - e.c * idx.l * x * x;
    case Family::bessel_regime_tail:
      return -0.5 * std::log(idx.b()) - std::abs(idx.m) * std::numbers::ln2;
  }
  return inf;
}

}  // namespace

std::string to_string(Family f) {
  for (const auto& fn : family_names)
    if (fn.f == f) return fn.name;
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (const auto& fn : family_names)
    if (name == fn.name) return fn.f;
  throw ConfigError("unknown envelope family '" + name + "'");
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> v = [] {
    std::vector<Family> out;
    for (const auto& fn : family_names) out.push_back(fn.f);
    return out;
  }();
  return v;
}

std::pair<double, double> critical_points(HarmonicIndex idx) {
  harmonics::require_index(idx.l, idx.m);
  return {idx.a(), idx.b()};
}

std::optional<std::string> violated_guard(const Envelope& e, HarmonicIndex idx, double x) {
  switch (e.family) {
    case Family::hermite_regime_main:
      if (!hermite_regime(idx, e.epsilon)) return "|m| >= epsilon [l]";
      return std::nullopt;
    case Family::hermite_regime_tail:
      if (!hermite_regime(idx, e.epsilon)) return "|m| >= epsilon [l]";
      if (!(std::abs(x) >= e.K * idx.a())) return "|x| >= K a_{l,m}";
      return std::nullopt;
    case Family::bessel_regime_main:
      if (!bessel_regime(idx, e.epsilon)) return "|m| <= epsilon [l]";
      return std::nullopt;
    case Family::bessel_regime_tail:
      if (!bessel_regime(idx, e.epsilon)) return "|m| <= epsilon [l]";
      if (idx.m == 0) return "m != 0 (b_{l,m} > 0)";
      if (!(std::sqrt((1.0 - x) * (1.0 + x)) <= idx.b() / 4.0)) return "sqrt(1 - x^2) <= b_{l,m} / 4";
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

double envelope_value(const Envelope& e, HarmonicIndex idx, double x) {
  harmonics::require_index(idx.l, idx.m);
  harmonics::require_unit_interval(x);
  if (auto g = violated_guard(e, idx, x)) throw PreconditionError(to_string(e.family) + ": regime guard violated: " + *g);
  return std::exp(log_envelope(e, idx, x));
}

double pointwise_ratio(const Envelope& e, HarmonicIndex idx, double x) {
  harmonics::require_index(idx.l, idx.m);
  harmonics::require_unit_interval(x);
  if (auto g = violated_guard(e, idx, x)) throw PreconditionError(to_string(e.family) + ": regime guard violated: " + *g);
  const auto y = harmonics::eval_profile_scaled(idx, x);
  const double le = log_envelope(e, idx, x);
  if (y.is_zero() || le == inf) return 0.0;
  return std::exp(y.log_magnitude - le);
}

// ---------------------------------------------------------------------------

std::vector<Block> dyadic_blocks(int l_max) {
  std::vector<Block> out;
  out.push_back(Block{0, 0});
  for (int lo = 1; lo <= l_max; lo *= 2) {
    int hi = std::min(2 * lo - 1, l_max);
    out.push_back(Block{lo, hi});
  }
  // the last block is closed at l_max: fold a trailing singleton {l_max} into it
  if (out.size() > 2 && out.back().l_lo == l_max && (l_max & (l_max - 1)) == 0) {
    out.pop_back();
    out.back().l_hi = l_max;
  }
  return out;
}

namespace {

int block_of(const std::vector<Block>& blocks, int l) {
  // blocks are contiguous and sorted
  int lo = 0, hi = static_cast<int>(blocks.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (blocks[mid].l_lo <= l)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

void offer(Block& b, double ratio, int l, int m, double x) {
  if (!(ratio > b.sup_ratio) && !b.empty) return;
  if (b.empty || ratio > b.sup_ratio) {
    b.empty = false;
    b.sup_ratio = ratio;
    b.argmax = HarmonicIndex{l, m};
    b.argmax_x = x;
  }
}

void merge_into(Block& into, const Block& from) {
  if (from.empty) return;
  if (into.empty || from.sup_ratio > into.sup_ratio) {
    into.empty = false;
    into.sup_ratio = from.sup_ratio;
    into.argmax = from.argmax;
    into.argmax_x = from.argmax_x;
  }
}

}  // namespace

double EnvelopeReport::variation(int l_from) const {
  double mx = 0.0, mn = inf;
  for (const auto& b : blocks) {
    if (b.empty || b.l_lo < l_from) continue;
    mx = std::max(mx, b.sup_ratio);
    mn = std::min(mn, b.sup_ratio);
  }
  if (mn == inf) return 1.0;
  return mn > 0 ? mx / mn : inf;
}

double EnvelopeReport::overall_sup() const {
  double mx = 0.0;
  for (const auto& b : blocks)
    if (!b.empty) mx = std::max(mx, b.sup_ratio);
  return mx;
}

std::vector<double> scan_grid(int m, int l_max, const GridSpec& grid) {
  std::vector<double> xs;
  const int n = std::max(2, grid.chebyshev_points * grid.density);
  for (int k = 0; k < n; ++k) {
    const double x = -std::cos(pi * k / (n - 1));
    if (x >= 0.0) xs.push_back(x);
  }
  xs.push_back(0.0);
  xs.push_back(1.0);

  const int half = std::max(1, grid.cluster_points * grid.density / 2);
  const int anchors = std::max(1, grid.anchors_per_order);
  const int span = std::max(0, l_max - m);
  std::vector<int> degrees;
  for (int j = 0; j < anchors; ++j) {
    const double t = anchors == 1 ? 0.0 : static_cast<double>(j) / (anchors - 1);
    degrees.push_back(m + static_cast<int>(std::lround(std::pow(span + 1.0, t) - 1.0)));
  }
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  const double ratio = grid.cluster_min_offset / grid.cluster_halfwidth;
  for (int l : degrees) {
    const double a = HarmonicIndex{l, m}.a();
    for (int k = 0; k < half; ++k) {
      const double d = grid.cluster_halfwidth * std::pow(ratio, half == 1 ? 0.0 : static_cast<double>(k) / (half - 1));
      if (a - d >= 0.0) xs.push_back(a - d);
      if (a + d <= 1.0) xs.push_back(a + d);
    }
    xs.push_back(a);
  }
  const int poles = grid.pole_points * grid.density;
  for (int k = 0; k < poles; ++k) xs.push_back(1.0 - 0.5 * std::pow(10.0, -12.0 * k / std::max(1, poles - 1)));

  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<EnvelopeReport> sup_ratio_scan(const std::vector<Envelope>& envelopes, int l_max, const GridSpec& grid) {
  if (l_max < 0) throw DomainError("sup_ratio_scan: l_max must be nonnegative");
  const std::vector<Block> proto = dyadic_blocks(l_max);
  const std::size_t nenv = envelopes.size();
  const std::size_t nblk = proto.size();
  const auto seeds = harmonics::profile_seed_logs(l_max);

  // partial[m][e * nblk + b]
  std::vector<std::vector<Block>> partial(static_cast<std::size_t>(l_max) + 1);

  parallel_for(static_cast<std::size_t>(l_max) + 1, [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    std::vector<Block> local(nenv * nblk);
    for (std::size_t e = 0; e < nenv; ++e)
      for (std::size_t b = 0; b < nblk; ++b) local[e * nblk + b] = proto[b];

    const std::vector<double> xv = scan_grid(m, l_max, grid);
    const Eigen::Index n = static_cast<Eigen::Index>(xv.size());
    const Eigen::ArrayXd xs = Eigen::Map<const Eigen::ArrayXd>(xv.data(), n);
    const Eigen::ArrayXd x2 = xs * xs;
    const Eigen::ArrayXd omx2 = (1.0 - xs) * (1.0 + xs);
    const Eigen::ArrayXd w2 = omx2.sqrt().sqrt();
    const Eigen::ArrayXd w3 = (xs * omx2).pow(1.0 / 6.0);
    Eigen::ArrayXd absy(n), tmp(n);

    DegreeSweep sweep(m, xs, seeds[mi]);
    for (int l = m; l <= l_max; ++l) {
      if (l > m) sweep.advance();
      const HarmonicIndex idx{l, m};
      const int bi = block_of(proto, l);
      absy = sweep.values().abs();
      const double l1 = 1.0 + l;
      const double a2 = a_squared(idx);
      Eigen::Index arg = 0;
      for (std::size_t e = 0; e < nenv; ++e) {
        const Envelope& env = envelopes[e];
        Block& blk = local[e * nblk + static_cast<std::size_t>(bi)];
        switch (env.family) {
          case Family::classical_i: {
            const double r = absy.maxCoeff(&arg) / std::sqrt(l1);
            offer(blk, r, l, m, xs[arg]);
            break;
          }
          case Family::classical_ii: {
            const double r = (absy * w2).maxCoeff(&arg) / std::sqrt(std::sqrt(l1));
            offer(blk, r, l, m, xs[arg]);
            break;
          }
          case Family::classical_iii: {
            const double r = (absy * w3).maxCoeff(&arg) / std::pow(l1, 1.0 / 6.0);
            offer(blk, r, l, m, xs[arg]);
            break;
          }
          case Family::hermite_regime_main:
          case Family::bessel_regime_main:
          case Family::combined: {
            if (env.family == Family::hermite_regime_main && !hermite_regime(idx, env.epsilon)) break;
            if (env.family == Family::bessel_regime_main && !bessel_regime(idx, env.epsilon)) break;
            const double A = peak_offset(env.family, idx);
            tmp = absy * (A + (x2 - a2).abs()).sqrt().sqrt();
            const double r = tmp.maxCoeff(&arg);
            offer(blk, r, l, m, xs[arg]);
            break;
          }
          case Family::hermite_regime_tail: {
            if (!hermite_regime(idx, env.epsilon)) break;
            const double xmin = env.K * idx.a();
            auto it = std::lower_bound(xv.begin(), xv.end(), xmin);
            for (auto k = static_cast<Eigen::Index>(it - xv.begin()); k < n; ++k) {
              const double ly = sweep.log_abs(k);
              if (ly == -inf) continue;
              const double r = std::exp(ly + 0.5 * std::log(xs[k]) + env.c * l * x2[k]);
              offer(blk, r, l, m, xs[k]);
            }
            break;
          }
          case Family::bessel_regime_tail: {
            if (m == 0 || !bessel_regime(idx, env.epsilon)) break;
            const double b = idx.b();
            const double xmin = std::sqrt((1.0 - b / 4.0) * (1.0 + b / 4.0));
            auto it = std::lower_bound(xv.begin(), xv.end(), xmin);
            const double shift = 0.5 * std::log(b) + m * std::numbers::ln2;
            for (auto k = static_cast<Eigen::Index>(it - xv.begin()); k < n; ++k) {
              if (!(std::sqrt(omx2[k]) <= b / 4.0)) continue;
              const double ly = sweep.log_abs(k);
              if (ly == -inf) continue;
              offer(blk, std::exp(ly + shift), l, m, xs[k]);
            }
            break;
          }
        }
      }
    }
    partial[mi] = std::move(local);
  });

  std::vector<EnvelopeReport> reports(nenv);
  for (std::size_t e = 0; e < nenv; ++e) {
    reports[e].envelope = envelopes[e];
    reports[e].l_max = l_max;
    reports[e].grid = grid;
    reports[e].blocks = proto;
  }
  for (std::size_t mi = 0; mi < partial.size(); ++mi)
    for (std::size_t e = 0; e < nenv; ++e)
      for (std::size_t b = 0; b < nblk; ++b) merge_into(reports[e].blocks[b], partial[mi][e * nblk + b]);
  return reports;
}

EnvelopeReport sup_ratio_scan(const Envelope& envelope, int l_max, const GridSpec& grid) {
  return sup_ratio_scan(std::vector<Envelope>{envelope}, l_max, grid).front();
}

TailSearch hermite_tail_search(double epsilon, int l_max, const std::vector<double>& Ks, const std::vector<double>& cs,
                               int l_stable_from, const GridSpec& grid) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("hermite_tail_search: epsilon must lie in (0, 1)");
  for (double K : Ks)
    if (!(K >= 2.0)) throw DomainError("hermite_tail_search: K must be >= 2");
  for (double c : cs)
    if (!(c > 0.0)) throw DomainError("hermite_tail_search: c must be positive");

  // The tail region lies away from the critical point, so the clustered points
  // are not needed here.
  GridSpec tail_grid = grid;
  tail_grid.anchors_per_order = 0;
  tail_grid.cluster_points = 0;

  const std::vector<Block> proto = dyadic_blocks(l_max);
  const std::size_t nblk = proto.size(), nK = Ks.size(), nc = cs.size();
  const auto seeds = harmonics::profile_seed_logs(l_max);
  std::vector<std::vector<Block>> partial(static_cast<std::size_t>(l_max) + 1);

  parallel_for(static_cast<std::size_t>(l_max) + 1, [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    std::vector<Block> local(nK * nc * nblk);
    for (std::size_t t = 0; t < nK * nc; ++t)
      for (std::size_t b = 0; b < nblk; ++b) local[t * nblk + b] = proto[b];
    // hermite regime needs m >= epsilon (l + 1/2), i.e. l <= m / epsilon - 1/2
    if (m == 0) {
      partial[mi] = std::move(local);
      return;
    }
    const int l_top = std::min(l_max, static_cast<int>(std::floor(m / epsilon - 0.5)));
    std::vector<double> xv;
    for (double x : scan_grid(m, l_max, tail_grid))
      if (x > 0.0) xv.push_back(x);
    const Eigen::Index n = static_cast<Eigen::Index>(xv.size());
    const Eigen::ArrayXd xs = Eigen::Map<const Eigen::ArrayXd>(xv.data(), n);
    const Eigen::ArrayXd half_log_x = 0.5 * xs.log();
    DegreeSweep sweep(m, xs, seeds[mi]);
    std::vector<double> base(static_cast<std::size_t>(n));
    for (int l = m; l <= l_top; ++l) {
      if (l > m) sweep.advance();
      const HarmonicIndex idx{l, m};
      if (!hermite_regime(idx, epsilon)) continue;
      const int bi = block_of(proto, l);
      const double a = idx.a();
      auto first = static_cast<Eigen::Index>(std::lower_bound(xv.begin(), xv.end(), *std::min_element(Ks.begin(), Ks.end()) * a) - xv.begin());
      for (Eigen::Index k = first; k < n; ++k) base[k] = sweep.log_abs(k) + half_log_x[k];
      for (std::size_t ki = 0; ki < nK; ++ki) {
        const auto start = static_cast<Eigen::Index>(std::lower_bound(xv.begin(), xv.end(), Ks[ki] * a) - xv.begin());
        for (std::size_t ci = 0; ci < nc; ++ci) {
          Block& blk = local[(ki * nc + ci) * nblk + static_cast<std::size_t>(bi)];
          for (Eigen::Index k = std::max(start, first); k < n; ++k) {
            if (base[k] == -inf) continue;
            offer(blk, std::exp(base[k] + cs[ci] * l * xs[k] * xs[k]), l, m, xs[k]);
          }
        }
      }
    }
    partial[mi] = std::move(local);
  });

  TailSearch out;
  out.epsilon = epsilon;
  out.l_max = l_max;
  out.l_stable_from = l_stable_from;
  for (std::size_t ki = 0; ki < nK; ++ki)
    for (std::size_t ci = 0; ci < nc; ++ci) {
      TailTrial t;
      t.K = Ks[ki];
      t.c = cs[ci];
      t.blocks = proto;
      const std::size_t off = (ki * nc + ci) * nblk;
      for (const auto& part : partial)
        for (std::size_t b = 0; b < nblk; ++b) merge_into(t.blocks[b], part[off + b]);
      double first = -1.0, worst = 0.0;
      for (const auto& b : t.blocks) {
        if (b.empty) continue;
        if (b.l_lo >= 1) t.measured_C = std::max(t.measured_C, b.sup_ratio);
        if (b.l_lo < l_stable_from) continue;
        if (first < 0) first = b.sup_ratio;
        worst = std::max(worst, b.sup_ratio);
      }
      t.holds = first > 0 && std::isfinite(worst) && worst <= 2.0 * first;
      out.trials.push_back(std::move(t));
    }
  for (const auto& t : out.trials) {
    if (!t.holds) continue;
    bool dominated = false;
    for (const auto& u : out.trials)
      if (u.holds && u.K <= t.K && u.c >= t.c && (u.K < t.K || u.c > t.c)) dominated = true;
    if (!dominated) out.pareto.emplace_back(t.K, t.c);
  }
  return out;
}

}  // namespace grushin::bounds

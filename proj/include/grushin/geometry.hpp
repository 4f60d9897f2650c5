#ifndef GRUSHIN_GEOMETRY_HPP
#define GRUSHIN_GEOMETRY_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "grushin/common.hpp"

namespace grushin::geometry {

/// Latitude theta in [-pi/2, pi/2], longitude phi in [0, 2 pi).
struct SpherePoint {
  double theta = 0.0;
  double phi = 0.0;

  /// Reduces phi modulo 2 pi; throws DomainError for theta outside [-pi/2, pi/2].
  static SpherePoint make(double theta, double phi);
  /// (cos theta cos phi, cos theta sin phi, sin theta).
  Eigen::Vector3d embed() const;
};

/// Arclength distance between two longitudes on the circle, in [0, pi].
double circle_distance(double phi1, double phi2);

/// |dtheta| + min{|dphi|^{1/2}, |dphi| / max{|tan theta|, |tan theta'|}}.
double phi_distance(const SpherePoint& p, const SpherePoint& q);

/// Great-circle distance in [0, pi].
double riemannian_distance(const SpherePoint& p, const SpherePoint& q);

enum class DistanceMethod { closed_form_phi, eikonal, riemannian };
std::string to_string(DistanceMethod m);

struct DistanceResult {
  double value = 0.0;
  DistanceMethod method = DistanceMethod::eikonal;
  double resolution = 0.0;      // latitude spacing of the grid, radians
  double error_estimate = 0.0;  // one grid cell measured in the metric at the target
};

/// Shortest path for ds^2 = dtheta^2 + dphi^2 / tan^2 theta on an 8-connected
/// (theta, phi) grid through p with 1/resolution cells per axis (full sphere,
/// periodic in phi). Throws ConfigError below 32 cells per axis.
DistanceResult eikonal_distance(const SpherePoint& p, const SpherePoint& q, double resolution = 1.0 / 512);

/// min{1, r^2 max{r, |theta|}}.
double ball_volume_closed(const SpherePoint& p, double r);

/// mu-measure of {z : eikonal(p, z) < r} by cell summation on a patch that
/// contains the ball (|dtheta| <= r, |dphi| <= r tan(|theta_p| + r)), with
/// 1/resolution cells per axis.
double ball_volume_numeric(const SpherePoint& p, double r, double resolution = 1.0 / 512);

/// |theta| / max{r, |theta'|}; throws DomainError for r <= 0.
double weight(double r, const SpherePoint& z, const SpherePoint& zp);

struct WeightLemmaResult {
  double lhs = 0.0;
  double rhs_model = 0.0;
  double ratio = 0.0;
  double ratio_doubled = 0.0;      // same integral with twice the nodes per panel
  double pointwise_constant = 0.0;  // max of (1 + w) / (1 + Phi / r) on the quadrature grid
  double pointwise_constant_doubled = 0.0;
  bool stable = false;  // both quantities change by < 10% under doubling
  std::size_t nodes = 0;
};

/// Integral of (1 + Phi/r)^{-beta} (1 + w_r)^{-alpha} dmu against the model
/// volume V(z', r). Requires alpha + beta > 3, 0 <= alpha < 1, beta >= 0, r > 0.
WeightLemmaResult weight_lemma_check(double alpha, double beta, double r, const SpherePoint& zp, int points_per_panel = 8);

/// Uniform point on the sphere (theta = asin(2u - 1)).
SpherePoint sample_uniform(std::mt19937_64& rng);

struct PairRecord {
  int pair_id = 0;
  SpherePoint p, q;
  double phi_dist = 0.0;
  double eikonal_dist = 0.0;
  double riemannian_dist = 0.0;
  double ratio = 0.0;  // eikonal / phi
};

/// n seeded uniform pairs with all three distances; parallel over pairs,
/// output in pair order.
std::vector<PairRecord> sample_pairs(int n, std::uint64_t seed, double resolution = 1.0 / 512);

/// "equatorial" (both |theta| < 0.25), "polar" (both |theta| > pi/2 - 0.25)
/// or "intermediate".
std::string pair_region(const PairRecord& rec);

struct RegionConstants {
  std::string region;
  int count = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
};

/// Two-sided eikonal / phi constants measured per region.
std::vector<RegionConstants> region_constants(const std::vector<PairRecord>& pairs);

/// Least-squares slope of log V against log r.
double loglog_slope(const std::vector<double>& r, const std::vector<double>& v);

}  // namespace grushin::geometry

#endif  // GRUSHIN_GEOMETRY_HPP

#ifndef GRUSHIN_COMMON_HPP
#define GRUSHIN_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace grushin {

inline constexpr double pi = std::numbers::pi;

/// Homogeneous dimension of the Grushin sphere at equatorial points.
inline constexpr int homogeneous_dimension = 3;

/// Topological dimension of the sphere.
inline constexpr int topological_dimension = 2;

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A regime guard or other precondition of a bound was violated.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical configuration cannot deliver the requested computation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier compensated summation. Accumulation order is the call order, so
/// callers that feed terms in index order get thread-count independent sums.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(const std::vector<double>& terms) {
  CompensatedSum s;
  for (double t : terms) s.add(t);
  return s.value();
}

/// Number of worker threads used by batch sweeps. Reads GRUSHIN_THREADS on
/// first use; `set_thread_budget` overrides it (0 restores "auto").
int thread_budget();
void set_thread_budget(int threads);

namespace detail {
void run_partitioned(std::size_t n, int threads, void (*body)(void*, std::size_t, std::size_t), void* ctx);
}  // namespace detail

/// Runs fn(i) for i in [0, n) on a static contiguous partition. Callers write
/// results into per-index slots and reduce them afterwards in index order.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  if (n == 0) return;
  const int threads = thread_budget();
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  using F = std::remove_reference_t<Fn>;
  detail::run_partitioned(
      n, threads,
      [](void* ctx, std::size_t lo, std::size_t hi) {
        auto& f = *static_cast<F*>(ctx);
        for (std::size_t i = lo; i < hi; ++i) f(i);
      },
      const_cast<void*>(static_cast<const void*>(&fn)));
}

/// Semantic version reported in run manifests.
inline constexpr const char* version = "1.0.0";

}  // namespace grushin

#endif  // GRUSHIN_COMMON_HPP

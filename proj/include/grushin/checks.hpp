#ifndef GRUSHIN_CHECKS_HPP
#define GRUSHIN_CHECKS_HPP

#include "grushin/harmonics.hpp"

namespace grushin::harmonics {

struct AdditionCheck {
  int l_max = 0;
  int points = 0;
  double max_rel_err = 0.0;
  int worst_l = 0;
  double worst_x = 0.0;
};

/// max over l <= l_max and `points` uniform x in [-1, 1] of
/// |sum_m Y~_{l,m}(x)^2 - (2l+1)/(4 pi)| / ((2l+1)/(4 pi)).
AdditionCheck addition_theorem_check(int l_max, int points = 513);

struct OrthonormalityCheck {
  int l_max = 0;
  double max_residual = 0.0;
  HarmonicIndex worst_a{}, worst_b{};
};

/// Gram matrix 2 pi sum_i w_i Y~_{l,m}(x_i) Y~_{l',m}(x_i) on l_max + 1 Gauss
/// nodes, for every m and l, l' <= l_max, against the identity.
OrthonormalityCheck orthonormality_check(int l_max);

struct ParityCheck {
  int l_max = 0;
  double max_order_residual = 0.0;  // | |Y~_{l,-m}| - |Y~_{l,m}| |
  double max_reflection_residual = 0.0;  // |Y~(-x) - (-1)^{l+m} Y~(x)| / sup scale
};

/// Both parity identities on `points` Chebyshev points for l <= l_max.
ParityCheck parity_check(int l_max, int points = 21);

}  // namespace grushin::harmonics

#endif  // GRUSHIN_CHECKS_HPP

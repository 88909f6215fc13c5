#pragma once

#include "corrchol/transform.hpp"
#include "corrchol/types.hpp"

namespace corrchol {

/// Shape parameter of the LKJ prior; eta = 1 is uniform over the set of
/// correlation matrices.
class LkjShape {
 public:
  LkjShape() = default;
  explicit LkjShape(double eta);
  double eta() const noexcept { return eta_; }

 private:
  double eta_ = 1.0;
};

/// Log density of the LKJ prior on a correlation Cholesky factor, up to an
/// additive constant independent of L:
///   sum_{k=2}^{n} (n - k + 2*eta - 2) * log L(k,k).
/// Depends on L only through its diagonal. Not a normalized log-probability.
double lkj_cholesky_logpdf(const CholFactor& L, LkjShape shape);

/// Unnormalized log target over the unconstrained space: LKJ prior on the
/// transformed factor plus the transform's log-Jacobian. Transform errors
/// (degenerate intervals, infeasible pins) propagate to the caller.
double log_posterior(const UnconstrainedVector& x, const BoundsSpec& bounds,
                     LkjShape shape, const FixedValueSpec* fixed = nullptr);

}  // namespace corrchol

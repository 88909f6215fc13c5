#pragma once

#include <Eigen/Dense>

#include "corrchol/types.hpp"

namespace corrchol {

struct ScalarMap {
  double x = 0.0;
  double log_jac = 0.0;
};

struct Interval {
  double lb = 0.0;
  double ub = 0.0;
};

/// Maps y in R into the open interval (lb, ub) through the scaled and
/// shifted logistic x = lb + (ub - lb) * sigmoid(y), returning the mapped
/// value together with the log-derivative
///   log(ub - lb) + log sigmoid(y) + log(1 - sigmoid(y)).
/// Stable for |y| up to ~700: the log terms are evaluated with log1p
/// identities, never through the saturated sigmoid itself.
ScalarMap lb_ub_forward(double y, double lb, double ub);

/// Inverse of lb_ub_forward in its first argument:
/// y = logit((x - lb)/(ub - lb)). Requires x strictly inside (lb, ub)
/// with kStrictSlack margin, else throws OutOfBounds.
double lb_ub_inverse(double x, double lb, double ub);

/// Interval the Cholesky entry (i, j) may occupy, 1-based, 2 <= j < i <= n:
///   lb = max(-stick, (a - z)/L(j,j)),  ub = min(stick, (b - z)/L(j,j)),
/// where z = sum_{k<j} L(i,k) L(j,k) and stick is the residual length of
/// row i's unit vector. Throws DegenerateInterval when lb >= ub.
Interval entry_bounds(const Eigen::MatrixXd& partial, int i, int j, double a,
                      double b, double stick);

/// Same, with the stick length recomputed from row i of the partial factor.
Interval entry_bounds(const Eigen::MatrixXd& partial, int i, int j, double a,
                      double b);

/// Maps an unconstrained vector to a Cholesky factor whose implied
/// correlations respect the per-entry bounds, accumulating the
/// log-absolute-determinant of the Jacobian. Consumption order: column 1
/// rows 2..n, then row-major over rows i = 3..n, columns j = 2..i-1.
TransformResult forward(const UnconstrainedVector& x, const BoundsSpec& bounds);

/// Same map, evaluated in the better-conditioned form: the entry is bounded
/// on the correlation-offset scale (low = max(-stick*L(j,j), a - z),
/// up = min(stick*L(j,j), b - z)), mapped there, then divided by L(j,j)
/// with a -log L(j,j) Jacobian correction. Identical contract to forward.
TransformResult forward_stable(const UnconstrainedVector& x,
                               const BoundsSpec& bounds);

/// forward with m correlations pinned to known constants. x has length
/// n(n-1)/2 - m; pinned entries are computed deterministically as
/// (p - z)/L(j,j) and contribute no Jacobian term. Throws InfeasiblePin
/// when a pinned entry falls outside the row stick.
TransformResult forward_with_fixed(const UnconstrainedVector& x,
                                   const BoundsSpec& bounds,
                                   const FixedValueSpec& fixed);

/// Recovers the unconstrained vector: replays the forward traversal,
/// rebuilding each entry's interval from the already-known entries of L.
/// Throws OutOfBounds naming the first entry whose value is incompatible
/// with its interval, InvalidFactor if L fails validation.
UnconstrainedVector inverse(const CholFactor& L, const BoundsSpec& bounds);

/// The correlation matrix L L^T (exactly symmetric, unit diagonal up to
/// row-norm tolerance).
Eigen::MatrixXd to_correlation(const CholFactor& L);

struct ProbeResult {
  bool feasible = true;
  // First offending entry and its interval when feasible == false.
  int row = 0;
  int col = 0;
  double lb = 0.0;
  double ub = 0.0;
};

/// Midpoint-recursion feasibility probe: walks the transform with every
/// free entry at its interval midpoint and reports the first entry whose
/// interval is narrower than min_width (or whose pin is infeasible).
/// A failure proves the bounds break down along the midpoint path; success
/// does not certify global feasibility.
ProbeResult probe_bounds(const BoundsSpec& bounds,
                         const FixedValueSpec& fixed = {},
                         double min_width = 1e-8);

}  // namespace corrchol

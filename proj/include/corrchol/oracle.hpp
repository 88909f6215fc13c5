#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "corrchol/types.hpp"

// Brute-force verifiers, independent of the incremental code paths they
// check: a finite-difference Jacobian, from-scratch bound recomputation,
// and a rejection sampler as a distributional reference. Shipped as a
// public module so downstream users can re-run the checks.
namespace corrchol::oracle {

/// Matrix of central finite differences of the strict-lower factor entries
/// (transform consumption order) with respect to the input coordinates.
/// Lower-triangular up to truncation error: entry k depends only on the
/// coordinates consumed up to k.
Eigen::MatrixXd numerical_jacobian(const UnconstrainedVector& x,
                                   const BoundsSpec& bounds, double h = 1e-5);

/// log|det| of the finite-difference matrix above. Retries once at h/10 if
/// a perturbed forward leaves the feasible set; throws
/// PerturbationInfeasible if that fails too.
double numerical_jacobian_logdet(const UnconstrainedVector& x,
                                 const BoundsSpec& bounds, double h = 1e-5);

struct BoundsReportRow {
  int i = 0;  // 1-based
  int j = 0;
  double lb = 0.0;
  double ub = 0.0;
  bool ok = false;
};

/// Recomputes every strict-lower entry's interval from scratch (full sums,
/// no incremental stick update) and flags whether the entry lies strictly
/// inside it. All rows ok exactly when the inverse transform accepts L.
std::vector<BoundsReportRow> recompute_factor_bounds(const CholFactor& L,
                                                     const BoundsSpec& bounds);

struct CorrelationWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Correlation-scale window for entry (i, j) given the filled rows of the
/// factor: intersects the user bound with the unit-row stick limit on the
/// Cholesky scale, then maps back through C = z + L(j,j) * t. When the
/// window excludes the declared bound entirely, the entry is infeasible.
CorrelationWindow feasible_correlation_window(const Eigen::MatrixXd& partial,
                                              int i, int j, double a, double b);

/// One candidate of the rejection reference: off-diagonals uniform within
/// their bounds (column-major order), accepted iff positive definite.
/// Deterministic in (seed, index), independent of evaluation order.
std::optional<Eigen::MatrixXd> rejection_candidate(int n,
                                                   const BoundsSpec& bounds,
                                                   std::uint64_t seed,
                                                   std::uint64_t index);

/// Uniform draws from the bounded correlation-matrix set by rejection;
/// the reference distribution for eta = 1. Desk scale only (n <= 4).
/// Throws AcceptanceTooLow when the probe batch accepts fewer than 1e-4.
std::vector<Eigen::MatrixXd> rejection_sample_reference(
    int n, const BoundsSpec& bounds, int count, std::uint64_t seed);

}  // namespace corrchol::oracle

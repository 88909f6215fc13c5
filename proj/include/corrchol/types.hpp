#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "corrchol/errors.hpp"

namespace corrchol {

/// Domain of the transform: a real vector of length n(n-1)/2, or
/// n(n-1)/2 - m when m correlations are pinned.
using UnconstrainedVector = Eigen::VectorXd;

/// Row-norm tolerance for factor validation.
inline constexpr double kRowNormTol = 1e-12;

/// Slack used to enforce strict interior preconditions: values within
/// this distance of an interval endpoint are treated as out of bounds.
inline constexpr double kStrictSlack = 1e-14;

/// Number of strictly-lower-triangular entries of an n x n matrix.
inline int tri_size(int n) { return n * (n - 1) / 2; }

/// 0-based (row, col) pairs in the order the transform consumes its input:
/// column 1 rows 2..n first, then row-major over rows i = 3..n, j = 2..i-1.
std::vector<std::pair<int, int>> consumption_order(int n);

/// 0-based (row, col) pairs of the strict lower triangle, column-major.
/// This is the serialization order for flattened correlation entries.
std::vector<std::pair<int, int>> column_major_order(int n);

/// Per-entry correlation bounds (a, b) over the strict lower triangle,
/// either a single scalar pair broadcast to every entry or a full table.
/// Entry labels use 1-based indices with 1 <= j < i <= n.
class BoundsSpec {
 public:
  /// Broadcasts one (lower, upper) pair to every entry.
  BoundsSpec(int n, double lower, double upper);

  /// Full per-entry table; only the strict lower triangles of the two
  /// matrices are read, entry (i, j) at 0-based position (i-1, j-1).
  BoundsSpec(int n, const Eigen::MatrixXd& lower, const Eigen::MatrixXd& upper);

  int dim() const noexcept { return n_; }

  double lower(int i, int j) const;
  double upper(int i, int j) const;

  /// Overrides the bounds of a single entry.
  void set_entry(int i, int j, double lower, double upper);

 private:
  void check_range(int i, int j) const;

  int n_;
  Eigen::MatrixXd lower_;
  Eigen::MatrixXd upper_;
};

/// Lower-triangular Cholesky factor of a correlation matrix: unit first
/// entry, strictly positive diagonal, unit-norm rows.
class CholFactor {
 public:
  explicit CholFactor(Eigen::MatrixXd m);

  static CholFactor identity(int n);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  Eigen::MatrixXd& matrix() noexcept { return m_; }

  /// Throws InvalidFactor unless all invariants hold: square lower
  /// triangle, L(1,1) = 1, positive diagonal, rows unit-norm within
  /// kRowNormTol, strict-lower entries inside (-1, 1).
  void validate() const;

 private:
  Eigen::MatrixXd m_;
};

struct TransformResult {
  CholFactor factor;
  double log_abs_det_jacobian = 0.0;
};

/// One pinned correlation: C(i, j) = value, 1-based indices, j < i.
struct Pin {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

/// A set of correlations fixed to known constants. Pinned entries consume
/// no unconstrained parameters and contribute no Jacobian term.
class FixedValueSpec {
 public:
  FixedValueSpec() = default;

  /// Throws InvalidBounds on duplicate positions, j >= i, or |value| >= 1.
  explicit FixedValueSpec(std::vector<Pin> pins);

  const std::vector<Pin>& pins() const noexcept { return pins_; }
  int size() const noexcept { return static_cast<int>(pins_.size()); }
  bool empty() const noexcept { return pins_.empty(); }

  /// Pin at (i, j), or nullptr. 1-based.
  const Pin* find(int i, int j) const noexcept;

  /// Range checks against a concrete dimension: i <= n and m < n(n-1)/2.
  void validate_for(int n) const;

 private:
  std::vector<Pin> pins_;
};

/// splitmix64 step; used to derive independent seeds for parallel streams.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

}  // namespace corrchol

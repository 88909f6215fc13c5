#pragma once

#include <stdexcept>
#include <string>

namespace corrchol {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error attached to a matrix entry. Row/column labels are 1-based with
/// j < i, the convention used in all diagnostics; 0 means "no entry".
class EntryError : public Error {
 public:
  EntryError(const std::string& msg, int row, int col)
      : Error(msg), row_(row), col_(col) {}
  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }

 private:
  int row_;
  int col_;
};

/// A bounds specification violates -1 <= a < b <= 1 or indexing rules.
class InvalidBounds : public Error {
 public:
  using Error::Error;
};

/// Input vector or matrix has the wrong size for the requested operation.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A non-finite value was encountered, or a stick length underflowed to <= 0.
class NonFinite : public EntryError {
 public:
  explicit NonFinite(const std::string& msg, int row = 0, int col = 0)
      : EntryError(msg, row, col) {}
};

/// The intersected interval for an entry is empty: lb >= ub. This is the
/// infeasible-bounds condition; the offending entry is attached when known.
class DegenerateInterval : public EntryError {
 public:
  DegenerateInterval(const std::string& msg, double lb, double ub, int row = 0,
                     int col = 0)
      : EntryError(msg, row, col), lb_(lb), ub_(ub) {}
  double lb() const noexcept { return lb_; }
  double ub() const noexcept { return ub_; }

 private:
  double lb_;
  double ub_;
};

/// A value lies outside (or within slack of the endpoints of) its interval.
class OutOfBounds : public EntryError {
 public:
  explicit OutOfBounds(const std::string& msg, int row = 0, int col = 0)
      : EntryError(msg, row, col) {}
};

/// A matrix fails the Cholesky-factor invariants.
class InvalidFactor : public Error {
 public:
  using Error::Error;
};

/// A pinned correlation forces the Cholesky entry outside the row stick.
class InfeasiblePin : public EntryError {
 public:
  using EntryError::EntryError;
};

class NonPositiveEta : public Error {
 public:
  using Error::Error;
};

/// The target density is infeasible already at the midpoint initialization.
class InfeasibleAtInit : public EntryError {
 public:
  using EntryError::EntryError;
};

class EmptyChain : public Error {
 public:
  using Error::Error;
};

/// A finite-difference perturbation left the feasible set.
class PerturbationInfeasible : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling accepted too small a fraction of the probe batch.
class AcceptanceTooLow : public Error {
 public:
  using Error::Error;
};

/// Formats a 1-based entry label, e.g. "(3,2)".
inline std::string entry_label(int row, int col) {
  return "(" + std::to_string(row) + "," + std::to_string(col) + ")";
}

}  // namespace corrchol

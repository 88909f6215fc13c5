#include "corrchol/types.hpp"

#include <cmath>

namespace corrchol {

std::vector<std::pair<int, int>> consumption_order(int n) {
  std::vector<std::pair<int, int>> order;
  order.reserve(tri_size(n));
  for (int r = 1; r < n; ++r) order.emplace_back(r, 0);
  for (int r = 2; r < n; ++r)
    for (int c = 1; c < r; ++c) order.emplace_back(r, c);
  return order;
}

std::vector<std::pair<int, int>> column_major_order(int n) {
  std::vector<std::pair<int, int>> order;
  order.reserve(tri_size(n));
  for (int c = 0; c < n; ++c)
    for (int r = c + 1; r < n; ++r) order.emplace_back(r, c);
  return order;
}

namespace {

void check_bound_pair(const std::string& where, double lo, double hi) {
  const std::string label = where.empty() ? "bounds" : "bounds " + where;
  if (!(std::isfinite(lo) && std::isfinite(hi)))
    throw InvalidBounds("non-finite " + label);
  if (!(-1.0 <= lo && lo < hi && hi <= 1.0))
    throw InvalidBounds(label + " must satisfy -1 <= a < b <= 1, got [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

BoundsSpec::BoundsSpec(int n, double lower, double upper) : n_(n) {
  if (n < 2) throw InvalidBounds("dimension must be >= 2");
  check_bound_pair("", lower, upper);
  lower_ = Eigen::MatrixXd::Constant(n, n, lower);
  upper_ = Eigen::MatrixXd::Constant(n, n, upper);
}

BoundsSpec::BoundsSpec(int n, const Eigen::MatrixXd& lower,
                       const Eigen::MatrixXd& upper)
    : n_(n), lower_(lower), upper_(upper) {
  if (n < 2) throw InvalidBounds("dimension must be >= 2");
  if (lower.rows() != n || lower.cols() != n || upper.rows() != n ||
      upper.cols() != n)
    throw InvalidBounds("bound tables must be n x n");
  for (int r = 1; r < n; ++r)
    for (int c = 0; c < r; ++c)
      check_bound_pair("at " + entry_label(r + 1, c + 1), lower_(r, c),
                       upper_(r, c));
}

void BoundsSpec::check_range(int i, int j) const {
  if (!(1 <= j && j < i && i <= n_))
    throw InvalidBounds("entry " + entry_label(i, j) +
                        " outside strict lower triangle of dimension " +
                        std::to_string(n_));
}

double BoundsSpec::lower(int i, int j) const {
  check_range(i, j);
  return lower_(i - 1, j - 1);
}

double BoundsSpec::upper(int i, int j) const {
  check_range(i, j);
  return upper_(i - 1, j - 1);
}

void BoundsSpec::set_entry(int i, int j, double lower, double upper) {
  check_range(i, j);
  check_bound_pair("at " + entry_label(i, j), lower, upper);
  lower_(i - 1, j - 1) = lower;
  upper_(i - 1, j - 1) = upper;
}

CholFactor::CholFactor(Eigen::MatrixXd m) : m_(std::move(m)) {}

CholFactor CholFactor::identity(int n) {
  return CholFactor(Eigen::MatrixXd::Identity(n, n));
}

void CholFactor::validate() const {
  const int n = dim();
  if (n < 1 || m_.cols() != m_.rows()) throw InvalidFactor("factor must be square");
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c)
      if (m_(r, c) != 0.0)
        throw InvalidFactor("nonzero entry above the diagonal at " +
                            entry_label(r + 1, c + 1));
  if (m_(0, 0) != 1.0) throw InvalidFactor("L(1,1) must equal 1 exactly");
  for (int r = 0; r < n; ++r) {
    if (!(m_(r, r) > 0.0) || !std::isfinite(m_(r, r)))
      throw InvalidFactor("diagonal entry " + std::to_string(r + 1) +
                          " is not strictly positive");
    const double norm2 = m_.row(r).head(r + 1).squaredNorm();
    if (std::abs(norm2 - 1.0) > kRowNormTol)
      throw InvalidFactor("row " + std::to_string(r + 1) +
                          " is not unit-norm: |row|^2 = " +
                          std::to_string(norm2));
    for (int c = 0; c < r; ++c)
      if (!(std::abs(m_(r, c)) < 1.0))
        throw InvalidFactor("entry " + entry_label(r + 1, c + 1) +
                            " outside (-1, 1)");
  }
}

FixedValueSpec::FixedValueSpec(std::vector<Pin> pins) : pins_(std::move(pins)) {
  for (std::size_t k = 0; k < pins_.size(); ++k) {
    const Pin& p = pins_[k];
    if (!(1 <= p.j && p.j < p.i))
      throw InvalidBounds("pin " + entry_label(p.i, p.j) +
                          " must lie in the strict lower triangle");
    if (!std::isfinite(p.value) || !(std::abs(p.value) < 1.0))
      throw InvalidBounds("pinned value at " + entry_label(p.i, p.j) +
                          " must lie strictly inside (-1, 1)");
    for (std::size_t l = 0; l < k; ++l)
      if (pins_[l].i == p.i && pins_[l].j == p.j)
        throw InvalidBounds("duplicate pin at " + entry_label(p.i, p.j));
  }
}

const Pin* FixedValueSpec::find(int i, int j) const noexcept {
  for (const Pin& p : pins_)
    if (p.i == i && p.j == j) return &p;
  return nullptr;
}

void FixedValueSpec::validate_for(int n) const {
  for (const Pin& p : pins_)
    if (p.i > n)
      throw InvalidBounds("pin " + entry_label(p.i, p.j) +
                          " outside dimension " + std::to_string(n));
  if (size() > tri_size(n))
    throw InvalidBounds("more pins than strict-lower entries");
}

}  // namespace corrchol

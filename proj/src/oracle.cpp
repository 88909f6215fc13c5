#include "corrchol/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <random>
#include <string>

#include "corrchol/transform.hpp"

namespace corrchol::oracle {

namespace {

Eigen::VectorXd strict_lower_in_consumption_order(const Eigen::MatrixXd& L) {
  const int n = static_cast<int>(L.rows());
  Eigen::VectorXd v(tri_size(n));
  int k = 0;
  for (const auto& [r, c] : consumption_order(n)) v[k++] = L(r, c);
  return v;
}

}  // namespace

Eigen::MatrixXd numerical_jacobian(const UnconstrainedVector& x,
                                   const BoundsSpec& bounds, double h) {
  const int k = static_cast<int>(x.size());
  Eigen::MatrixXd jac(k, k);
  for (int col = 0; col < k; ++col) {
    UnconstrainedVector xp = x;
    UnconstrainedVector xm = x;
    xp[col] += h;
    xm[col] -= h;
    const Eigen::VectorXd up =
        strict_lower_in_consumption_order(forward(xp, bounds).factor.matrix());
    const Eigen::VectorXd um =
        strict_lower_in_consumption_order(forward(xm, bounds).factor.matrix());
    jac.col(col) = (up - um) / (2.0 * h);
  }
  return jac;
}

double numerical_jacobian_logdet(const UnconstrainedVector& x,
                                 const BoundsSpec& bounds, double h) {
  if (x.size() != tri_size(bounds.dim()))
    throw DimensionMismatch("expected input of length " +
                            std::to_string(tri_size(bounds.dim())));
  auto logdet = [&](double step) {
    return Eigen::HouseholderQR<Eigen::MatrixXd>(
               numerical_jacobian(x, bounds, step))
        .logAbsDeterminant();
  };
  try {
    return logdet(h);
  } catch (const EntryError&) {
    // A perturbation left the feasible set; one retry with a smaller step.
  }
  try {
    return logdet(h / 10.0);
  } catch (const EntryError& e) {
    throw PerturbationInfeasible(
        "perturbed forward failed at steps h and h/10: " +
        std::string(e.what()));
  }
}

std::vector<BoundsReportRow> recompute_factor_bounds(const CholFactor& Lf,
                                                     const BoundsSpec& bounds) {
  const Eigen::MatrixXd& L = Lf.matrix();
  const int n = Lf.dim();
  std::vector<BoundsReportRow> report;
  report.reserve(tri_size(n));
  for (int r = 1; r < n; ++r) {
    for (int c = 0; c < r; ++c) {
      const double a = bounds.lower(r + 1, c + 1);
      const double b = bounds.upper(r + 1, c + 1);
      double lb, ub;
      if (c == 0) {
        lb = a;
        ub = b;
      } else {
        const double stick =
            std::sqrt(1.0 - L.row(r).head(c).squaredNorm());
        const double z = L.row(r).head(c).dot(L.row(c).head(c));
        lb = std::max(-stick, (a - z) / L(c, c));
        ub = std::min(stick, (b - z) / L(c, c));
      }
      const bool ok = lb < ub && L(r, c) > lb + kStrictSlack &&
                      L(r, c) < ub - kStrictSlack;
      report.push_back(BoundsReportRow{r + 1, c + 1, lb, ub, ok});
    }
  }
  return report;
}

CorrelationWindow feasible_correlation_window(const Eigen::MatrixXd& partial,
                                              int i, int j, double a,
                                              double b) {
  if (!(2 <= j && j < i && i <= partial.rows()))
    throw DimensionMismatch("entry " + entry_label(i, j) +
                            " outside strict lower triangle below column 1");
  const int r = i - 1;
  const int c = j - 1;
  const double stick = std::sqrt(1.0 - partial.row(r).head(c).squaredNorm());
  const double z = partial.row(r).head(c).dot(partial.row(c).head(c));
  const double ljj = partial(c, c);
  return {z + ljj * std::max(a, -stick), z + ljj * std::min(b, stick)};
}

std::optional<Eigen::MatrixXd> rejection_candidate(int n,
                                                   const BoundsSpec& bounds,
                                                   std::uint64_t seed,
                                                   std::uint64_t index) {
  std::mt19937_64 rng(mix_seed(seed, index));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(n, n);
  for (const auto& [r, c] : column_major_order(n)) {
    const double a = bounds.lower(r + 1, c + 1);
    const double b = bounds.upper(r + 1, c + 1);
    const double v = a + (b - a) * unif(rng);
    corr(r, c) = v;
    corr(c, r) = v;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return corr;
}

std::vector<Eigen::MatrixXd> rejection_sample_reference(int n,
                                                        const BoundsSpec& bounds,
                                                        int count,
                                                        std::uint64_t seed) {
  if (n > 4)
    throw DimensionMismatch(
        "rejection reference is desk-scale only: n <= 4, got " +
        std::to_string(n));
  if (n != bounds.dim())
    throw DimensionMismatch("bounds dimension does not match n");

  constexpr std::uint64_t kProbeBatch = 20000;
  std::vector<Eigen::MatrixXd> draws;
  draws.reserve(count);
  std::uint64_t attempts = 0;
  while (static_cast<int>(draws.size()) < count) {
    auto candidate = rejection_candidate(n, bounds, seed, attempts);
    ++attempts;
    if (candidate) draws.push_back(std::move(*candidate));
    if (attempts == kProbeBatch &&
        static_cast<double>(draws.size()) / attempts < 1e-4)
      throw AcceptanceTooLow("acceptance below 1e-4 over the first " +
                             std::to_string(kProbeBatch) + " attempts");
  }
  return draws;
}

}  // namespace corrchol::oracle

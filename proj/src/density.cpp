#include "corrchol/density.hpp"

#include <cmath>
#include <string>

namespace corrchol {

LkjShape::LkjShape(double eta) : eta_(eta) {
  if (!std::isfinite(eta) || !(eta > 0.0))
    throw NonPositiveEta("eta must be finite and positive, got " +
                         std::to_string(eta));
}

namespace {

double lkj_kernel(const Eigen::MatrixXd& L, double eta) {
  const int n = static_cast<int>(L.rows());
  double acc = 0.0;
  for (int k = 2; k <= n; ++k)
    acc += (n - k + 2.0 * eta - 2.0) * std::log(L(k - 1, k - 1));
  return acc;
}

}  // namespace

double lkj_cholesky_logpdf(const CholFactor& L, LkjShape shape) {
  L.validate();
  return lkj_kernel(L.matrix(), shape.eta());
}

double log_posterior(const UnconstrainedVector& x, const BoundsSpec& bounds,
                     LkjShape shape, const FixedValueSpec* fixed) {
  const TransformResult result =
      fixed ? forward_with_fixed(x, bounds, *fixed) : forward(x, bounds);
  // The factor is valid by construction; skip re-validation on the hot path.
  return lkj_kernel(result.factor.matrix(), shape.eta()) +
         result.log_abs_det_jacobian;
}

}  // namespace corrchol

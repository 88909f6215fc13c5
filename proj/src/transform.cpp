#include "corrchol/transform.hpp"

#include <cmath>
#include <string>

namespace corrchol {

namespace {

// log(1 + e^t) without overflow for large |t|.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double y) {
  if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
  const double e = std::exp(y);
  return e / (1.0 + e);
}

// log sigmoid(y) and log(1 - sigmoid(y)).
double log_sigmoid(double y) { return -softplus(-y); }
double log1m_sigmoid(double y) { return -softplus(y); }

std::string interval_str(double lb, double ub) {
  return "[" + std::to_string(lb) + ", " + std::to_string(ub) + "]";
}

Interval entry_bounds_impl(const Eigen::MatrixXd& L, int r, int c, double a,
                           double b, double stick) {
  const double z = L.row(r).head(c).dot(L.row(c).head(c));
  const double ljj = L(c, c);
  const double lb = std::max(-stick, (a - z) / ljj);
  const double ub = std::min(stick, (b - z) / ljj);
  if (!(lb < ub))
    throw DegenerateInterval("empty interval " + interval_str(lb, ub) +
                                 " for entry " + entry_label(r + 1, c + 1),
                             lb, ub, r + 1, c + 1);
  return {lb, ub};
}

enum class Variant { direct, stable };

double updated_stick(double stick, double entry, int r, int c) {
  const double ratio = entry / stick;
  const double shrink = 1.0 - ratio * ratio;
  if (!(shrink > 0.0) || !std::isfinite(shrink))
    throw NonFinite("stick length underflowed after entry " +
                        entry_label(r + 1, c + 1),
                    r + 1, c + 1);
  return stick * std::sqrt(shrink);
}

TransformResult run_forward(const UnconstrainedVector& x,
                            const BoundsSpec& bounds,
                            const FixedValueSpec* fixed, Variant variant) {
  const int n = bounds.dim();
  const int m = fixed ? fixed->size() : 0;
  if (fixed) fixed->validate_for(n);
  const int expected = tri_size(n) - m;
  if (static_cast<int>(x.size()) != expected)
    throw DimensionMismatch("expected input of length " +
                            std::to_string(expected) + ", got " +
                            std::to_string(x.size()));
  for (int k = 0; k < x.size(); ++k)
    if (!std::isfinite(x[k]))
      throw NonFinite("non-finite input coordinate " + std::to_string(k));

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  L(0, 0) = 1.0;
  double log_jac = 0.0;
  int next = 0;

  auto pin_at = [&](int r, int c) -> const Pin* {
    return fixed ? fixed->find(r + 1, c + 1) : nullptr;
  };

  // Column 1: the entries are the correlations themselves.
  for (int r = 1; r < n; ++r) {
    if (const Pin* p = pin_at(r, 0)) {
      L(r, 0) = p->value;
    } else {
      const ScalarMap s =
          lb_ub_forward(x[next++], bounds.lower(r + 1, 1), bounds.upper(r + 1, 1));
      L(r, 0) = s.x;
      log_jac += s.log_jac;
    }
  }
  const double d2 = 1.0 - L(1, 0) * L(1, 0);
  if (!(d2 > 0.0))
    throw NonFinite("stick length underflowed after entry (2,1)", 2, 1);
  L(1, 1) = std::sqrt(d2);

  for (int r = 2; r < n; ++r) {
    double stick = std::sqrt(1.0 - L(r, 0) * L(r, 0));
    if (!(stick > 0.0) || !std::isfinite(stick))
      throw NonFinite("stick length underflowed after entry " +
                          entry_label(r + 1, 1),
                      r + 1, 1);
    for (int c = 1; c < r; ++c) {
      if (const Pin* p = pin_at(r, c)) {
        const double z = L.row(r).head(c).dot(L.row(c).head(c));
        const double v = (p->value - z) / L(c, c);
        if (!std::isfinite(v) || !(std::abs(v) < stick))
          throw InfeasiblePin(
              "pinned value " + std::to_string(p->value) + " at " +
                  entry_label(r + 1, c + 1) + " requires entry magnitude " +
                  std::to_string(std::abs(v)) + ", beyond the stick length " +
                  std::to_string(stick),
              r + 1, c + 1);
        L(r, c) = v;  // deterministic function of the pin: no Jacobian term
      } else {
        const double a = bounds.lower(r + 1, c + 1);
        const double b = bounds.upper(r + 1, c + 1);
        if (variant == Variant::direct) {
          const Interval iv = entry_bounds_impl(L, r, c, a, b, stick);
          const ScalarMap s = lb_ub_forward(x[next++], iv.lb, iv.ub);
          L(r, c) = s.x;
          log_jac += s.log_jac;
        } else {
          // Bound the offset quantity C - z instead, then divide by L(j,j);
          // the division contributes -log L(j,j) to the log-Jacobian.
          const double z = L.row(r).head(c).dot(L.row(c).head(c));
          const double ljj = L(c, c);
          const double low = std::max(-stick * ljj, a - z);
          const double up = std::min(stick * ljj, b - z);
          if (!(low < up))
            throw DegenerateInterval("empty interval " + interval_str(low, up) +
                                         " for entry " + entry_label(r + 1, c + 1),
                                     low, up, r + 1, c + 1);
          const ScalarMap s = lb_ub_forward(x[next++], low, up);
          L(r, c) = s.x / ljj;
          log_jac += s.log_jac - std::log(ljj);
        }
      }
      stick = updated_stick(stick, L(r, c), r, c);
    }
    L(r, r) = stick;
  }
  return {CholFactor(std::move(L)), log_jac};
}

}  // namespace

ScalarMap lb_ub_forward(double y, double lb, double ub) {
  if (!std::isfinite(lb) || !std::isfinite(ub))
    throw NonFinite("non-finite interval " + interval_str(lb, ub));
  if (!(lb < ub))
    throw DegenerateInterval("empty interval " + interval_str(lb, ub), lb, ub);
  if (!std::isfinite(y)) throw NonFinite("non-finite input");
  const double s = sigmoid(y);
  return {lb + (ub - lb) * s,
          std::log(ub - lb) + log_sigmoid(y) + log1m_sigmoid(y)};
}

double lb_ub_inverse(double x, double lb, double ub) {
  if (!(lb < ub))
    throw DegenerateInterval("empty interval " + interval_str(lb, ub), lb, ub);
  if (!(x > lb + kStrictSlack) || !(x < ub - kStrictSlack))
    throw OutOfBounds("value " + std::to_string(x) +
                      " not strictly inside " + interval_str(lb, ub));
  const double t = (x - lb) / (ub - lb);
  return std::log(t) - std::log1p(-t);
}

Interval entry_bounds(const Eigen::MatrixXd& partial, int i, int j, double a,
                      double b, double stick) {
  if (!(2 <= j && j < i && i <= partial.rows()))
    throw DimensionMismatch("entry " + entry_label(i, j) +
                            " outside strict lower triangle below column 1");
  if (!(stick > 0.0) || !std::isfinite(stick))
    throw NonFinite("non-positive stick length for entry " + entry_label(i, j),
                    i, j);
  return entry_bounds_impl(partial, i - 1, j - 1, a, b, stick);
}

Interval entry_bounds(const Eigen::MatrixXd& partial, int i, int j, double a,
                      double b) {
  if (!(2 <= j && j < i && i <= partial.rows()))
    throw DimensionMismatch("entry " + entry_label(i, j) +
                            " outside strict lower triangle below column 1");
  const double stick =
      std::sqrt(1.0 - partial.row(i - 1).head(j - 1).squaredNorm());
  if (!(stick > 0.0) || !std::isfinite(stick))
    throw NonFinite("non-positive stick length for entry " + entry_label(i, j),
                    i, j);
  return entry_bounds_impl(partial, i - 1, j - 1, a, b, stick);
}

TransformResult forward(const UnconstrainedVector& x, const BoundsSpec& bounds) {
  return run_forward(x, bounds, nullptr, Variant::direct);
}

TransformResult forward_stable(const UnconstrainedVector& x,
                               const BoundsSpec& bounds) {
  return run_forward(x, bounds, nullptr, Variant::stable);
}

TransformResult forward_with_fixed(const UnconstrainedVector& x,
                                   const BoundsSpec& bounds,
                                   const FixedValueSpec& fixed) {
  return run_forward(x, bounds, &fixed, Variant::direct);
}

UnconstrainedVector inverse(const CholFactor& Lf, const BoundsSpec& bounds) {
  Lf.validate();
  const int n = Lf.dim();
  if (n != bounds.dim())
    throw DimensionMismatch("factor dimension " + std::to_string(n) +
                            " does not match bounds dimension " +
                            std::to_string(bounds.dim()));
  const Eigen::MatrixXd& L = Lf.matrix();
  UnconstrainedVector y(tri_size(n));
  int next = 0;

  auto invert_entry = [&](double value, double lb, double ub, int r, int c) {
    try {
      return lb_ub_inverse(value, lb, ub);
    } catch (const OutOfBounds&) {
      throw OutOfBounds("entry " + entry_label(r + 1, c + 1) + " = " +
                            std::to_string(value) + " not strictly inside " +
                            interval_str(lb, ub),
                        r + 1, c + 1);
    }
  };

  for (int r = 1; r < n; ++r)
    y[next++] = invert_entry(L(r, 0), bounds.lower(r + 1, 1),
                             bounds.upper(r + 1, 1), r, 0);
  for (int r = 2; r < n; ++r) {
    double stick = std::sqrt(1.0 - L(r, 0) * L(r, 0));
    for (int c = 1; c < r; ++c) {
      Interval iv;
      try {
        iv = entry_bounds_impl(L, r, c, bounds.lower(r + 1, c + 1),
                               bounds.upper(r + 1, c + 1), stick);
      } catch (const DegenerateInterval& e) {
        // An empty interval means the entry cannot satisfy its bound.
        throw OutOfBounds("entry " + entry_label(r + 1, c + 1) +
                              " incompatible with empty interval " +
                              interval_str(e.lb(), e.ub()),
                          r + 1, c + 1);
      }
      y[next++] = invert_entry(L(r, c), iv.lb, iv.ub, r, c);
      stick = updated_stick(stick, L(r, c), r, c);
    }
  }
  return y;
}

Eigen::MatrixXd to_correlation(const CholFactor& L) {
  L.validate();
  const Eigen::MatrixXd& m = L.matrix();
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(m.rows(), m.rows());
  corr.selfadjointView<Eigen::Lower>().rankUpdate(m);
  corr = corr.selfadjointView<Eigen::Lower>();
  return corr;
}

ProbeResult probe_bounds(const BoundsSpec& bounds, const FixedValueSpec& fixed,
                         double min_width) {
  const int n = bounds.dim();
  fixed.validate_for(n);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  L(0, 0) = 1.0;

  auto report = [](int r, int c, double lb, double ub) {
    return ProbeResult{false, r + 1, c + 1, lb, ub};
  };

  for (int r = 1; r < n; ++r) {
    if (const Pin* p = fixed.find(r + 1, 1)) {
      L(r, 0) = p->value;
    } else {
      const double a = bounds.lower(r + 1, 1);
      const double b = bounds.upper(r + 1, 1);
      if (!(b - a > min_width)) return report(r, 0, a, b);
      L(r, 0) = 0.5 * (a + b);
    }
  }
  const double d2 = 1.0 - L(1, 0) * L(1, 0);
  if (!(d2 > 0.0)) return report(1, 0, L(1, 0), L(1, 0));
  L(1, 1) = std::sqrt(d2);

  for (int r = 2; r < n; ++r) {
    double stick = std::sqrt(1.0 - L(r, 0) * L(r, 0));
    if (!(stick > 0.0)) return report(r, 0, L(r, 0), L(r, 0));
    for (int c = 1; c < r; ++c) {
      const double z = L.row(r).head(c).dot(L.row(c).head(c));
      if (const Pin* p = fixed.find(r + 1, c + 1)) {
        const double v = (p->value - z) / L(c, c);
        if (!std::isfinite(v) || !(std::abs(v) < stick))
          return report(r, c, -stick, stick);
        L(r, c) = v;
      } else {
        const double ljj = L(c, c);
        const double lb = std::max(-stick, (bounds.lower(r + 1, c + 1) - z) / ljj);
        const double ub = std::min(stick, (bounds.upper(r + 1, c + 1) - z) / ljj);
        if (!(ub - lb > min_width)) return report(r, c, lb, ub);
        L(r, c) = 0.5 * (lb + ub);
      }
      const double ratio = L(r, c) / stick;
      const double shrink = 1.0 - ratio * ratio;
      if (!(shrink > 0.0)) return report(r, c, -stick, stick);
      stick *= std::sqrt(shrink);
    }
  }
  return {};
}

}  // namespace corrchol

#include "corrchol/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

namespace corrchol {

void SamplerConfig::validate() const {
  if (warmup < 0) throw Error("warmup must be >= 0");
  if (samples < 1) throw Error("samples must be >= 1");
  if (thin < 1) throw Error("thin must be >= 1");
  if (!(initial_scale > 0.0) || !std::isfinite(initial_scale))
    throw Error("initial_scale must be positive");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw Error("target_accept must lie in (0, 1)");
  if (fixed) {
    fixed->validate_for(bounds.dim());
    if (fixed->size() >= tri_size(bounds.dim()))
      throw Error("sampling needs at least one free correlation");
  }
}

ChainOutput run_chain(const SamplerConfig& config) {
  config.validate();
  const int n = config.bounds.dim();
  const FixedValueSpec* fixed = config.fixed ? &*config.fixed : nullptr;
  const int k = tri_size(n) - (fixed ? fixed->size() : 0);

  UnconstrainedVector x = UnconstrainedVector::Zero(k);
  double lp;
  try {
    lp = log_posterior(x, config.bounds, config.eta, fixed);
  } catch (const EntryError& e) {
    throw InfeasibleAtInit("bounds infeasible at midpoint initialization: " +
                               std::string(e.what()),
                           e.row(), e.col());
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double log_scale = std::log(config.initial_scale);
  ChainOutput out;
  out.seed = config.seed;
  out.draws.reserve(config.samples);

  long accepts = 0;
  long post_iters = 0;
  const long total =
      config.warmup + static_cast<long>(config.samples) * config.thin;
  UnconstrainedVector proposal(k);

  for (long iter = 1; iter <= total; ++iter) {
    const double scale = std::exp(log_scale);
    for (int d = 0; d < k; ++d) proposal[d] = x[d] + scale * normal(rng);

    double lp_prop = -std::numeric_limits<double>::infinity();
    bool feasible = true;
    try {
      lp_prop = log_posterior(proposal, config.bounds, config.eta, fixed);
    } catch (const DegenerateInterval&) {
      feasible = false;  // proposal left the feasible set: reject
    } catch (const InfeasiblePin&) {
      feasible = false;
    } catch (const NonFinite&) {
      feasible = false;
    }

    const double alpha =
        feasible ? std::min(1.0, std::exp(lp_prop - lp)) : 0.0;
    const bool accepted = unif(rng) < alpha;
    if (accepted) {
      x = proposal;
      lp = lp_prop;
    }

    if (iter <= config.warmup) {
      log_scale += (alpha - config.target_accept) /
                   std::pow(static_cast<double>(iter), 0.6);
    } else {
      ++post_iters;
      if (accepted) ++accepts;
      if ((iter - config.warmup) % config.thin == 0) {
        TransformResult tr = fixed
                                 ? forward_with_fixed(x, config.bounds, *fixed)
                                 : forward(x, config.bounds);
        Eigen::MatrixXd corr = to_correlation(tr.factor);
        out.draws.push_back(Draw{x, std::move(tr.factor), std::move(corr), lp});
      }
    }

    if (config.trace) {
      *config.trace << "iter=" << iter << " lp=" << lp << " alpha=" << alpha
                    << " accepted=" << accepted << " scale=" << scale << '\n';
    }
  }

  out.accept_rate =
      post_iters > 0 ? static_cast<double>(accepts) / post_iters : 0.0;
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

ChainSummary summarize(const ChainOutput& chain) {
  if (chain.draws.size() < 2)
    throw EmptyChain("need at least two draws, got " +
                     std::to_string(chain.draws.size()));
  const int n = chain.draws.front().factor.dim();
  const std::size_t count = chain.draws.size();

  ChainSummary summary;
  summary.accept_rate = chain.accept_rate;
  std::vector<double> values(count);
  for (const auto& [r, c] : column_major_order(n)) {
    for (std::size_t d = 0; d < count; ++d)
      values[d] = chain.draws[d].correlation(r, c);
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / count;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (count - 1));
    std::sort(values.begin(), values.end());
    summary.rows.push_back(SummaryRow{r + 1, c + 1, mean, sd,
                                      quantile_sorted(values, 0.05),
                                      quantile_sorted(values, 0.95)});
  }
  return summary;
}

}  // namespace corrchol

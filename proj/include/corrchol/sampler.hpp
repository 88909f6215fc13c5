#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "corrchol/density.hpp"
#include "corrchol/types.hpp"

namespace corrchol {

/// Configuration of one adaptive random-walk Metropolis chain over the
/// unconstrained vector. The proposal is isotropic Gaussian; its scale is
/// adapted toward target_accept during warmup and frozen afterwards.
struct SamplerConfig {
  BoundsSpec bounds;
  LkjShape eta{};
  std::optional<FixedValueSpec> fixed{};
  int warmup = 1000;
  int samples = 1000;
  int thin = 1;  // keep every thin-th post-warmup iteration
  std::uint64_t seed = 0;
  double initial_scale = 0.5;
  double target_accept = 0.4;
  std::ostream* trace = nullptr;  // per-iteration trace sink, may be null

  int dim() const noexcept { return bounds.dim(); }
  void validate() const;
};

struct Draw {
  UnconstrainedVector x;
  CholFactor factor;
  Eigen::MatrixXd correlation;
  double log_posterior = 0.0;
};

struct ChainOutput {
  std::vector<Draw> draws;
  double accept_rate = 0.0;
  std::uint64_t seed = 0;
};

/// Runs one chain from the midpoint initialization x = 0. Deterministic
/// given the seed. Proposals that land on infeasible bounds are rejected;
/// infeasibility at the initial point is a hard InfeasibleAtInit error.
ChainOutput run_chain(const SamplerConfig& config);

/// Per-correlation summary, entries in column-major strict-lower order.
struct SummaryRow {
  int i = 0;  // 1-based row
  int j = 0;  // 1-based column
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};

struct ChainSummary {
  std::vector<SummaryRow> rows;
  double accept_rate = 0.0;
};

/// Throws EmptyChain unless the chain holds at least two draws.
ChainSummary summarize(const ChainOutput& chain);

}  // namespace corrchol

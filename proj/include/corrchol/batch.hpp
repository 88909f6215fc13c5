#pragma once

#include <cstdint>
#include <vector>

#include "corrchol/sampler.hpp"
#include "corrchol/transform.hpp"
#include "corrchol/types.hpp"

// Data-parallel kernels over independent work items: many transforms, many
// rejection candidates, many chains. Each kernel has a serial twin used as
// the reference in tests; results are identical bit for bit — the transforms
// are pure functions, and the sampling kernels give every work item its own
// random stream derived from (seed, index).
namespace corrchol::batch {

enum class Execution { serial, openmp };

/// Transforms a batch of unconstrained vectors. Errors carry the index of
/// the first offending input.
std::vector<TransformResult> forward_many(
    const std::vector<UnconstrainedVector>& xs, const BoundsSpec& bounds,
    bool stable = false, Execution exec = Execution::openmp);

/// Inverts a batch of factors.
std::vector<UnconstrainedVector> inverse_many(
    const std::vector<CholFactor>& factors, const BoundsSpec& bounds,
    Execution exec = Execution::openmp);

/// Block-parallel rejection sampler; agrees element-for-element with
/// oracle::rejection_sample_reference for the same (seed, count).
std::vector<Eigen::MatrixXd> rejection_sample(int n, const BoundsSpec& bounds,
                                              int count, std::uint64_t seed,
                                              Execution exec = Execution::openmp);

/// Runs several independent chains. Chain 0 uses config.seed verbatim;
/// chain c > 0 uses a seed derived from (config.seed, c). Per-iteration
/// tracing is disabled when more than one chain runs.
std::vector<ChainOutput> run_chains(const SamplerConfig& config, int chains,
                                    Execution exec = Execution::openmp);

}  // namespace corrchol::batch

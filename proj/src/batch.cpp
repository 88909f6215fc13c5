#include "corrchol/batch.hpp"

#include <exception>
#include <optional>
#include <string>
#include <utility>

#include "corrchol/oracle.hpp"

namespace corrchol::batch {

namespace {

// Runs fn(i) for i in [0, count), serial or OpenMP. The lowest-index
// exception wins so failures are independent of the schedule.
template <typename Fn>
void parallel_for(int count, Execution exec, Fn&& fn) {
  if (exec == Execution::serial) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  int error_index = count;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(corrchol_batch_error)
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<TransformResult> forward_many(
    const std::vector<UnconstrainedVector>& xs, const BoundsSpec& bounds,
    bool stable, Execution exec) {
  const int count = static_cast<int>(xs.size());
  std::vector<std::optional<TransformResult>> slots(count);
  parallel_for(count, exec, [&](int i) {
    slots[i] = stable ? forward_stable(xs[i], bounds) : forward(xs[i], bounds);
  });
  std::vector<TransformResult> out;
  out.reserve(count);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

std::vector<UnconstrainedVector> inverse_many(
    const std::vector<CholFactor>& factors, const BoundsSpec& bounds,
    Execution exec) {
  const int count = static_cast<int>(factors.size());
  std::vector<UnconstrainedVector> out(count);
  parallel_for(count, exec,
               [&](int i) { out[i] = inverse(factors[i], bounds); });
  return out;
}

std::vector<Eigen::MatrixXd> rejection_sample(int n, const BoundsSpec& bounds,
                                              int count, std::uint64_t seed,
                                              Execution exec) {
  if (exec == Execution::serial)
    return oracle::rejection_sample_reference(n, bounds, count, seed);

  if (n > 4)
    throw DimensionMismatch(
        "rejection reference is desk-scale only: n <= 4, got " +
        std::to_string(n));
  if (n != bounds.dim())
    throw DimensionMismatch("bounds dimension does not match n");

  constexpr std::uint64_t kProbeBatch = 20000;
  constexpr int kBlock = 4096;
  std::vector<Eigen::MatrixXd> draws;
  draws.reserve(count);
  std::vector<std::optional<Eigen::MatrixXd>> block(kBlock);
  std::uint64_t attempts = 0;

  while (static_cast<int>(draws.size()) < count) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < kBlock; ++k)
      block[k] = oracle::rejection_candidate(n, bounds, seed, attempts + k);
    // Candidates append in index order: output matches the serial twin.
    for (int k = 0;
         k < kBlock && static_cast<int>(draws.size()) < count; ++k) {
      ++attempts;
      if (block[k]) draws.push_back(std::move(*block[k]));
      if (attempts == kProbeBatch &&
          static_cast<double>(draws.size()) / attempts < 1e-4)
        throw AcceptanceTooLow("acceptance below 1e-4 over the first " +
                               std::to_string(kProbeBatch) + " attempts");
    }
  }
  return draws;
}

std::vector<ChainOutput> run_chains(const SamplerConfig& config, int chains,
                                    Execution exec) {
  if (chains < 1) throw Error("chains must be >= 1");
  std::vector<SamplerConfig> configs;
  configs.reserve(chains);
  for (int c = 0; c < chains; ++c) {
    SamplerConfig cc = config;
    if (c > 0) cc.seed = mix_seed(config.seed, static_cast<std::uint64_t>(c));
    if (chains > 1) cc.trace = nullptr;
    configs.push_back(std::move(cc));
  }
  std::vector<std::optional<ChainOutput>> slots(chains);
  parallel_for(chains, exec, [&](int c) { slots[c] = run_chain(configs[c]); });
  std::vector<ChainOutput> out;
  out.reserve(chains);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace corrchol::batch

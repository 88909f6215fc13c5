// Serial vs OpenMP timing for the batch kernels. Each kernel's parallel
// result is checked against its serial twin before the numbers print.

#include <CLI11.hpp>

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "corrchol/batch.hpp"
#include "corrchol/oracle.hpp"

using namespace corrchol;
using batch::Execution;

namespace {

// One warmup call, then the minimum of three timed runs.
double time_ms(const std::function<void()>& fn) {
  fn();
  double best = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    if (rep == 0 || ms < best) best = ms;
  }
  return best;
}

void print_row(const std::string& kernel, long items, double serial_ms,
               double openmp_ms, bool identical) {
  std::printf("%-18s %10ld %12.1f %12.1f %9.2fx %10s\n", kernel.c_str(), items,
              serial_ms, openmp_ms, serial_ms / openmp_ms,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP benchmark of the batch kernels"};
  double scale = 1.0;
  app.add_option("--scale", scale, "workload multiplier (default 1)");
  CLI11_PARSE(app, argc, argv);

  std::printf("threads: %d\n\n", omp_get_max_threads());
  std::printf("%-18s %10s %12s %12s %10s %10s\n", "kernel", "items",
              "serial ms", "openmp ms", "speedup", "check");

  {
    const int count = static_cast<int>(20000 * scale);
    const int n = 8;
    const BoundsSpec bounds(n, -1.0, 1.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    std::vector<UnconstrainedVector> xs(count);
    for (auto& x : xs) {
      x.resize(tri_size(n));
      for (int k = 0; k < x.size(); ++k) x[k] = unif(rng);
    }
    std::vector<TransformResult> serial, parallel;
    const double serial_ms = time_ms(
        [&] { serial = batch::forward_many(xs, bounds, false, Execution::serial); });
    const double openmp_ms = time_ms([&] {
      parallel = batch::forward_many(xs, bounds, false, Execution::openmp);
    });
    bool identical = serial.size() == parallel.size();
    for (std::size_t k = 0; identical && k < serial.size(); ++k)
      identical = (serial[k].factor.matrix() - parallel[k].factor.matrix())
                      .cwiseAbs()
                      .maxCoeff() == 0.0;
    print_row("forward_many", count, serial_ms, openmp_ms, identical);
  }

  {
    const int count = static_cast<int>(20000 * scale);
    const BoundsSpec bounds(3, -1.0, 1.0);
    std::vector<Eigen::MatrixXd> serial, parallel;
    const double serial_ms = time_ms([&] {
      serial = batch::rejection_sample(3, bounds, count, 2, Execution::serial);
    });
    const double openmp_ms = time_ms([&] {
      parallel = batch::rejection_sample(3, bounds, count, 2, Execution::openmp);
    });
    bool identical = serial.size() == parallel.size();
    for (std::size_t k = 0; identical && k < serial.size(); ++k)
      identical = (serial[k] - parallel[k]).cwiseAbs().maxCoeff() == 0.0;
    print_row("rejection_sample", count, serial_ms, openmp_ms, identical);
  }

  {
    const int chains = 4;
    SamplerConfig config{.bounds = BoundsSpec(4, -1.0, 1.0)};
    config.warmup = 1000;
    config.samples = static_cast<int>(20000 * scale);
    config.seed = 3;
    std::vector<ChainOutput> serial, parallel;
    const double serial_ms =
        time_ms([&] { serial = batch::run_chains(config, chains, Execution::serial); });
    const double openmp_ms = time_ms(
        [&] { parallel = batch::run_chains(config, chains, Execution::openmp); });
    bool identical = true;
    for (int c = 0; c < chains && identical; ++c)
      identical = (serial[c].draws.back().x - parallel[c].draws.back().x)
                      .cwiseAbs()
                      .maxCoeff() == 0.0;
    print_row("run_chains", chains * static_cast<long>(config.samples),
              serial_ms, openmp_ms, identical);
  }

  return 0;
}

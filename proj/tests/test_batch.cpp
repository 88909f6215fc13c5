#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <random>
#include <vector>

#include "corrchol/batch.hpp"
#include "corrchol/oracle.hpp"

using namespace corrchol;
using batch::Execution;

namespace {

std::vector<UnconstrainedVector> random_batch(int count, int len,
                                              unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  std::vector<UnconstrainedVector> xs(count);
  for (auto& x : xs) {
    x.resize(len);
    for (int k = 0; k < len; ++k) x[k] = unif(rng);
  }
  return xs;
}

}  // namespace

TEST_CASE("parallel forward_many matches its serial twin bitwise") {
  const BoundsSpec bounds(6, -1.0, 1.0);
  const auto xs = random_batch(500, tri_size(6), 1);
  for (bool stable : {false, true}) {
    const auto serial = batch::forward_many(xs, bounds, stable, Execution::serial);
    const auto parallel =
        batch::forward_many(xs, bounds, stable, Execution::openmp);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t k = 0; k < serial.size(); ++k) {
      CHECK((serial[k].factor.matrix() - parallel[k].factor.matrix())
                .cwiseAbs()
                .maxCoeff() == 0.0);
      CHECK(serial[k].log_abs_det_jacobian == parallel[k].log_abs_det_jacobian);
    }
  }
}

TEST_CASE("forward_many reports the lowest-index failure") {
  const BoundsSpec bounds(3, -1.0, 0.0);
  auto xs = random_batch(16, 3, 2);
  for (auto& x : xs) x = UnconstrainedVector::Zero(3);
  UnconstrainedVector bad(3);
  bad << -0.881374, -0.881374, 0.0;
  xs[3] = bad;
  xs[7] = UnconstrainedVector::Zero(2);  // wrong length, would throw too
  for (Execution exec : {Execution::serial, Execution::openmp}) {
    try {
      batch::forward_many(xs, bounds, false, exec);
      FAIL("expected DegenerateInterval");
    } catch (const DegenerateInterval& e) {
      CHECK(e.row() == 3);
      CHECK(e.col() == 2);
    }
  }
}

TEST_CASE("parallel inverse_many round-trips the batch") {
  const BoundsSpec bounds(5, -1.0, 1.0);
  const auto xs = random_batch(200, tri_size(5), 3);
  const auto fwd = batch::forward_many(xs, bounds);
  std::vector<CholFactor> factors;
  factors.reserve(fwd.size());
  for (const auto& r : fwd) factors.push_back(r.factor);

  const auto serial = batch::inverse_many(factors, bounds, Execution::serial);
  const auto parallel = batch::inverse_many(factors, bounds, Execution::openmp);
  for (std::size_t k = 0; k < serial.size(); ++k) {
    CHECK((serial[k] - parallel[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((serial[k] - xs[k]).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("parallel rejection sampling equals the serial oracle") {
  const BoundsSpec bounds(3, -1.0, 1.0);
  const auto serial = oracle::rejection_sample_reference(3, bounds, 2000, 99);
  const auto parallel =
      batch::rejection_sample(3, bounds, 2000, 99, Execution::openmp);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t k = 0; k < serial.size(); ++k)
    CHECK((serial[k] - parallel[k]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parallel chains match serial chains draw for draw") {
  SamplerConfig config{.bounds = BoundsSpec(3, 0.0, 1.0)};
  config.warmup = 200;
  config.samples = 300;
  config.seed = 31;

  const auto serial = batch::run_chains(config, 4, Execution::serial);
  const auto parallel = batch::run_chains(config, 4, Execution::openmp);
  REQUIRE(serial.size() == 4);
  REQUIRE(parallel.size() == 4);
  for (int c = 0; c < 4; ++c) {
    CHECK(serial[c].seed == parallel[c].seed);
    REQUIRE(serial[c].draws.size() == parallel[c].draws.size());
    for (std::size_t d = 0; d < serial[c].draws.size(); ++d)
      CHECK((serial[c].draws[d].x - parallel[c].draws[d].x)
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }

  // chain 0 is the plain single-chain run
  const ChainOutput single = run_chain(config);
  CHECK(serial[0].seed == single.seed);
  CHECK((serial[0].draws.back().x - single.draws.back().x)
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // distinct derived seeds give distinct chains
  CHECK(serial[0].seed != serial[1].seed);
  CHECK((serial[0].draws.back().x - serial[1].draws.back().x)
            .cwiseAbs()
            .maxCoeff() != 0.0);
}

TEST_CASE("execution twins agree regardless of thread count") {
  const BoundsSpec bounds(4, -0.5, 1.0);
  const auto xs = random_batch(64, tri_size(4), 5);
  std::vector<UnconstrainedVector> feasible;
  for (const auto& x : xs) {
    try {
      forward(x, bounds);
      feasible.push_back(x);
    } catch (const DegenerateInterval&) {
    }
  }
  REQUIRE(feasible.size() > 10);
  const auto reference =
      batch::forward_many(feasible, bounds, false, Execution::serial);
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3}) {
    omp_set_num_threads(threads);
    const auto run =
        batch::forward_many(feasible, bounds, false, Execution::openmp);
    for (std::size_t k = 0; k < run.size(); ++k)
      CHECK((run[k].factor.matrix() - reference[k].factor.matrix())
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
  omp_set_num_threads(saved);
}

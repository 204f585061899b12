#include <doctest.h>

#include <cmath>
#include <vector>

#include "lmdplab/errors.hpp"
#include "lmdplab/function_class.hpp"
#include "lmdplab/instances.hpp"
#include "lmdplab/latent_mdp.hpp"
#include "test_util.hpp"

using namespace lmdplab;

namespace {

// num_functions x domain table wrapper for hand-built classes.
FunctionClassF table_class(int num_functions, std::size_t domain, std::vector<double> table,
                           double bound) {
  FunctionClassF f;
  f.num_functions = num_functions;
  f.domain = domain;
  f.value_bound = bound;
  f.table = std::move(table);
  f.validate();
  return f;
}

}  // namespace

TEST_CASE("function class validation catches malformed tables") {
  CHECK_THROWS_AS(table_class(0, 2, {}, 1.0), ValidationError);
  CHECK_THROWS_AS(table_class(2, 0, {}, 1.0), ValidationError);
  CHECK_THROWS_AS(table_class(2, 2, {0.0, 0.0, 0.0}, 1.0), ValidationError);   // wrong size
  CHECK_THROWS_AS(table_class(1, 2, {0.0, 5.0}, 1.0), ValidationError);         // exceeds bound
}

TEST_CASE("orthogonal bump class has dimension M-1 under both counters") {
  // f0 = 0 and f_k = 1{x == k}; each non-zero function is witnessed exactly
  // once, after which every pair involving it is resolved.
  const FunctionClassF f = table_class(4, 4,
                                       {0.0, 0.0, 0.0, 0.0,   // f0
                                        0.0, 1.0, 0.0, 0.0,   // f1
                                        0.0, 0.0, 1.0, 0.0,   // f2
                                        0.0, 0.0, 0.0, 1.0},  // f3
                                       1.0);
  CHECK(eluder_dimension_greedy(f, 0.5) == 3);
  CHECK(eluder_dimension_exhaustive(f, 0.5) == 3);
  // Coarser resolution than the bumps: nothing is distinguishable.
  CHECK(eluder_dimension_greedy(f, 1.5) == 0);
  CHECK(eluder_dimension_exhaustive(f, 1.5) == 0);
}

TEST_CASE("greedy eluder never exceeds the exhaustive optimum") {
  for (std::uint64_t seed : {3ull, 4ull, 5ull}) {
    const LatentMdp lm = testutil::random_latent(3, 2, 2, 50, seed);
    const FunctionClassF f = build_function_class(lm);
    REQUIRE(f.domain == static_cast<std::size_t>(12));  // S*A*M
    for (double eps : {0.5, 0.1, 0.02}) {
      const int greedy = eluder_dimension_greedy(f, eps);
      const int best = eluder_dimension_exhaustive(f, eps);
      CHECK(greedy <= best);
      CHECK(best <= static_cast<int>(f.domain));
    }
  }
}

TEST_CASE("eluder counters reject bad arguments") {
  const FunctionClassF f = table_class(2, 2, {0.0, 0.0, 1.0, 1.0}, 1.0);
  CHECK_THROWS_AS(eluder_dimension_greedy(f, 0.0), ValidationError);
  CHECK_THROWS_AS(eluder_dimension_exhaustive(f, -1.0), ValidationError);
  const LatentMdp big = testutil::random_latent(2, 4, 2, 20, 6);
  const FunctionClassF fb = build_function_class(big);
  REQUIRE(fb.domain == static_cast<std::size_t>(16));
  CHECK_THROWS_AS(eluder_dimension_exhaustive(fb, 0.1), ValidationError);
}

TEST_CASE("greedy covering counts sup-norm balls") {
  // Scalar functions 0, 0.05, 1.0, 1.04 with radius 0.1 need two centers.
  const FunctionClassF f = table_class(4, 1, {0.0, 0.05, 1.0, 1.04}, 2.0);
  CHECK(covering_number_greedy(f, 0.1) == 2);
  CHECK(covering_number_greedy(f, 0.001) == 4);
  CHECK(covering_number_greedy(f, 10.0) == 1);
  CHECK_THROWS_AS(covering_number_greedy(f, 0.0), ValidationError);
}

TEST_CASE("prediction table matches closed-form biases") {
  // Single-member chain: gain 0.6, bias (0, 2.0), diameter 5. The table
  // holds the expected next bias for each (state, action).
  const LatentMdp lm = make_uniform_latent({make_two_state(0.2, 0.1, 100)});
  const FunctionClassF f = build_function_class(lm);
  CHECK(f.num_functions == 1);
  REQUIRE(f.domain == static_cast<std::size_t>(4));
  CHECK(f.value_bound == doctest::Approx(5.0).epsilon(1e-7));
  CHECK(f.at(0, 0) == doctest::Approx(0.2 * 2.0).epsilon(1e-6));  // (s=0, a=0)
  CHECK(f.at(0, 1) == doctest::Approx(0.3 * 2.0).epsilon(1e-6));  // (s=0, a=1)
  CHECK(f.at(0, 2) == doctest::Approx(0.8 * 2.0).epsilon(1e-6));  // (s=1, a=0)
  CHECK(f.at(0, 3) == doctest::Approx(0.8 * 2.0).epsilon(1e-6));  // (s=1, a=1)
}

TEST_CASE("prediction table disagrees only at the informative cell") {
  const LatentMdp lm = testutil::probe_pair(100);
  const FunctionClassF f = build_function_class(lm);
  CHECK(f.num_functions == 2);
  REQUIRE(f.domain == static_cast<std::size_t>(8));  // (s, a, bias) triples
  // Member 0's bias is (0, 1.25); the kernels agree everywhere except
  // (state 1, action 0), where the expected biases are 1.0 vs 0.6875.
  const std::size_t x = (1 * 2 + 0) * 2 + 0;  // (s=1, a=0, bias of member 0)
  CHECK(f.at(0, x) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.at(1, x) == doctest::Approx(0.6875).epsilon(1e-6));
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const std::size_t idx = static_cast<std::size_t>((s * 2 + a) * 2 + b);
        if (s == 1 && a == 0) continue;
        CHECK(f.at(0, idx) == doctest::Approx(f.at(1, idx)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("function class requires communicating members") {
  const LatentMdp gated = make_prop1(2, 10);
  CHECK_THROWS_AS(build_function_class(gated), std::runtime_error);
}

TEST_CASE("log-log fit recovers an exact power law") {
  const std::vector<double> horizons = {128, 256, 512, 1024, 2048};
  std::vector<double> gaps;
  for (double h : horizons) gaps.push_back(3.0 * std::sqrt(h));
  const SlopeFit fit = fit_loglog_slope(horizons, gaps);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(fit.stderr_slope == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(fit.points == 5);
}

TEST_CASE("log-log fit reports uncertainty off the line") {
  const std::vector<double> horizons = {100, 200, 400, 800};
  const std::vector<double> gaps = {10.0, 13.0, 21.0, 27.0};
  const SlopeFit fit = fit_loglog_slope(horizons, gaps);
  CHECK(fit.stderr_slope > 0.0);
  CHECK(fit.slope > 0.0);
  CHECK(fit.slope < 1.0);
}

TEST_CASE("log-log fit rejects malformed inputs") {
  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0, -1.0}), ValidationError);
  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(fit_loglog_slope({4.0, 4.0}, {1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(fit_loglog_slope({-1.0, 2.0}, {1.0, 2.0}), ValidationError);
}

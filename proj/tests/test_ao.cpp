#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "berlab/ao.hpp"
#include "berlab/bound_engine.hpp"
#include "berlab/errors.hpp"
#include "berlab/scalar_math.hpp"

using berlab::ao_objective;
using berlab::AoSample;
using berlab::BudgetError;
using berlab::draw_ao_sample;
using berlab::ModelParams;
using berlab::order_stat_concentration;
using berlab::OrderStatReport;
using berlab::replica_ber;
using berlab::shell_bound;
using berlab::shell_floor_check;
using berlab::ShellFloorReport;

TEST_CASE("ao sample: norm concentration, determinism, decorrelation") {
  const ModelParams params(1.0, 0.1);
  const AoSample a = draw_ao_sample(params, 4000, 11, 0);
  CHECK(a.n == 4000);
  CHECK(a.m == 4000);
  CHECK(a.g_norm >= 0.95);
  CHECK(a.g_norm <= 1.05);
  const AoSample b = draw_ao_sample(params, 4000, 11, 0);
  CHECK(a.g_norm == b.g_norm);
  REQUIRE(a.h_sorted_prefix_sums.size() == b.h_sorted_prefix_sums.size());
  for (std::size_t i = 0; i < a.h_sorted_prefix_sums.size(); ++i)
    CHECK(a.h_sorted_prefix_sums[i] == b.h_sorted_prefix_sums[i]);
  const AoSample c = draw_ao_sample(params, 4000, 11, 1);
  CHECK(c.g_norm != a.g_norm);
}

TEST_CASE("ao sample: prefix sums are concave and peak where entries cross 0") {
  const AoSample s = draw_ao_sample(ModelParams(1.5, 0.2), 2000, 23, 4);
  REQUIRE(s.h_sorted_prefix_sums.size() == 2000u);
  // Differences recover the sorted entries, which must descend.
  double prev_diff = s.h_sorted_prefix_sums[0];
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < s.h_sorted_prefix_sums.size(); ++k) {
    const double diff =
        s.h_sorted_prefix_sums[k] - s.h_sorted_prefix_sums[k - 1];
    CHECK(diff <= prev_diff + 1e-12);
    prev_diff = diff;
    if (s.h_sorted_prefix_sums[k] > s.h_sorted_prefix_sums[argmax]) argmax = k;
  }
  // The running sum peaks where the sorted entries change sign: about half
  // the entries of a centered sample are positive.
  CHECK(argmax > 800u);
  CHECK(argmax < 1200u);
}

TEST_CASE("ao sample: full prefix sum has mean zero across trials") {
  const ModelParams params(1.0, 0.1);
  const int trials = 150;
  const int n = 2000;
  double acc = 0.0;
  for (int t = 0; t < trials; ++t) {
    const AoSample s = draw_ao_sample(params, n, 37, t);
    acc += s.h_sorted_prefix_sums.back();
  }
  const double mean = acc / trials;
  // Each full sum has standard deviation 2/sqrt(n).
  const double se = 2.0 / std::sqrt(double(n)) / std::sqrt(double(trials));
  CHECK(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("ao objective: empty top set, monotonicity, domain errors") {
  const AoSample s = draw_ao_sample(ModelParams(1.0, 0.1), 500, 3, 0);
  // alpha small enough that round(alpha^2*n/4) = 0: the objective is the
  // norm term alone, exactly.
  const double alpha = 0.04;  // alpha^2*n/4 = 0.2 -> k=0
  CHECK(ao_objective(alpha, s, 0.1) ==
        std::sqrt(alpha * alpha + 0.1) * s.g_norm);
  CHECK(ao_objective(0.5, s, 0.2) > ao_objective(0.5, s, 0.1));
  CHECK_THROWS_AS((void)ao_objective(0.0, s, 0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)ao_objective(-0.3, s, 0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)ao_objective(1.0001, s, 0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)ao_objective(0.5, s, -1.0), std::invalid_argument);
}

TEST_CASE("ao objective: exact sphere-support grid points select shell k") {
  // Where alpha^2*n/4 is an integer k, the radius-to-support map is exact:
  // the objective subtracts precisely the k-term prefix.
  const int n = 100;
  const AoSample s = draw_ao_sample(ModelParams(1.2, 0.3), n, 9, 2);
  for (int k : {1, 4, 9, 16, 25}) {
    const double alpha = 2.0 * std::sqrt(double(k) / double(n));
    const double expect = std::sqrt(alpha * alpha + 0.3) * s.g_norm -
                          s.h_sorted_prefix_sums[std::size_t(k - 1)];
    CHECK(ao_objective(alpha, s, 0.3) == expect);
  }
}

TEST_CASE("ao objective: pointwise concentration on the shell cost floor") {
  const ModelParams params(1.0, 0.1);
  const int samples = 100;
  const int n = 4000;
  std::vector<AoSample> pool;
  pool.reserve(samples);
  for (int t = 0; t < samples; ++t)
    pool.push_back(draw_ao_sample(params, n, 101, t));
  for (double alpha : {0.2, 0.4, 0.6, 0.8}) {
    double acc = 0.0;
    for (const AoSample& s : pool) acc += ao_objective(alpha, s, params.sigma2);
    const double mean = acc / samples;
    const double target = shell_bound(alpha * alpha / 4.0, params);
    CHECK(std::abs(mean - target) <= 0.02 * std::abs(target));
  }
}

TEST_CASE("ao objective: minimum over alpha tracks the floor minimum") {
  const ModelParams params(1.0, 0.1);
  const int samples = 100;
  const int n = 4000;
  std::vector<AoSample> pool;
  pool.reserve(samples);
  for (int t = 0; t < samples; ++t)
    pool.push_back(draw_ao_sample(params, n, 55, t));
  double best_mean = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 50; ++i) {
    const double alpha = 0.02 * i;
    double acc = 0.0;
    for (const AoSample& s : pool) acc += ao_objective(alpha, s, params.sigma2);
    best_mean = std::min(best_mean, acc / samples);
  }
  const double floor_min = shell_bound(replica_ber(params), params);
  CHECK(std::abs(best_mean - floor_min) <= 0.02 * std::abs(floor_min));
}

TEST_CASE("order statistics: top-quarter mean meets the analytic value") {
  const OrderStatReport rep = order_stat_concentration(0.25, 4000, 200, 7);
  CHECK(rep.k == 1000);
  CHECK(rep.analytic ==
        doctest::Approx(berlab::phi(berlab::q_inv(0.25))).epsilon(1e-12));
  CHECK(std::abs(rep.mean - rep.analytic) <= 3.0 * rep.stderr_);
  CHECK(rep.stderr_ > 0.0);
}

TEST_CASE("order statistics: full-sum limit vanishes") {
  // theta close to 1 selects every entry; the scaled full sum is centered
  // at zero and the analytic value is itself nearly zero.
  const OrderStatReport rep = order_stat_concentration(0.9999, 500, 200, 13);
  CHECK(rep.k == 500);
  CHECK(rep.analytic < 0.005);
  CHECK(std::abs(rep.mean) <= 3.0 * rep.stderr_ + rep.analytic);
}

TEST_CASE("order statistics: standard error shrinks like 1/sqrt(trials)") {
  const OrderStatReport few = order_stat_concentration(0.25, 800, 50, 19);
  const OrderStatReport many = order_stat_concentration(0.25, 800, 800, 19);
  const double ratio = many.stderr_ / few.stderr_;
  CHECK(ratio > 0.15);
  CHECK(ratio < 0.40);
}

TEST_CASE("order statistics: parameter validation") {
  CHECK_THROWS_AS((void)order_stat_concentration(0.0, 100, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)order_stat_concentration(1.0, 100, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)order_stat_concentration(1e-4, 100, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)order_stat_concentration(0.5, 100, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("shell floor diagnostic: generous slack sees no violations") {
  const ShellFloorReport rep =
      shell_floor_check(ModelParams(1.0, 0.1), 16, 0.1, 0.05, 0.5, 50, 21);
  CHECK(rep.trials == 50);
  CHECK(rep.k_lo >= 1);
  CHECK(rep.k_hi == 4);
  CHECK(rep.violation_fraction == 0.0);
  CHECK(std::isfinite(rep.mean_gap));
  CHECK(rep.analytic_floor > 0.0);
}

TEST_CASE("shell floor diagnostic: violations shrink with problem size") {
  const ModelParams params(1.0, 0.1);
  const ShellFloorReport small =
      shell_floor_check(params, 12, 0.1, 0.05, 0.1, 200, 33);
  const ShellFloorReport large =
      shell_floor_check(params, 20, 0.1, 0.05, 0.1, 200, 33);
  CHECK(large.violation_fraction <= small.violation_fraction);
}

TEST_CASE("shell floor diagnostic: parameter errors") {
  const ModelParams params(1.0, 0.1);
  CHECK_THROWS_AS(
      (void)shell_floor_check(params, 21, 0.1, 0.05, 0.1, 10, 1), BudgetError);
  CHECK_THROWS_AS(
      (void)shell_floor_check(params, 16, 0.9, 0.2, 0.1, 10, 1),
      std::invalid_argument);
  // alpha window misses every integer shell: for n=13 the range
  // [0.995, 1] needs k=4 but floor(13/4) = 3.
  CHECK_THROWS_AS(
      (void)shell_floor_check(params, 13, 0.99, 0.005, 0.1, 10, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)shell_floor_check(params, 16, 0.1, 0.05, 0.1, 0, 1),
      std::invalid_argument);
}

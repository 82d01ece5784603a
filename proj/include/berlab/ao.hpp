#pragma once
#include <cstdint>
#include <vector>

#include "berlab/model.hpp"

namespace berlab {

// Sufficient statistics of one auxiliary-comparison draw: the row-space
// Gaussian enters only through its norm, the column-space Gaussian only
// through descending-sorted prefix sums, so the raw vectors are not kept.
// Entry k-1 of h_sorted_prefix_sums holds (2/sqrt(n)) times the sum of the
// k largest entries (variance 1/n each).
struct AoSample {
  int n = 0;
  int m = 0;
  double g_norm = 0.0;
  std::vector<double> h_sorted_prefix_sums;  // length n
};

// Deterministic in (params, n, seed, trial); the two Gaussian blocks use
// separate streams so neither perturbs the other.
AoSample draw_ao_sample(const ModelParams& params, int n, std::uint64_t seed,
                        std::uint64_t trial);

// sqrt(alpha^2 + sigma2) * g_norm minus the prefix sum over the top
// round(alpha^2*n/4) entries (ties to even). alpha outside (0, 1] throws
// std::invalid_argument.
double ao_objective(double alpha, const AoSample& sample, double sigma2);

struct OrderStatReport {
  double mean = 0.0;     // Monte Carlo mean of (1/n) * sum of top-k entries
  double stderr_ = 0.0;  // sample standard error of that mean
  double analytic = 0.0; // phi(q_inv(theta)), the n -> infinity value
  int trials = 0;
  int k = 0;             // round(theta*n)
};

// Concentration experiment for the normalized top-fraction partial sum of n
// sorted standard normals. Requires theta in (0,1) with round(theta*n) >= 1
// and trials >= 1; throws std::invalid_argument otherwise.
OrderStatReport order_stat_concentration(double theta, int n, int trials,
                                         std::uint64_t seed);

struct ShellFloorReport {
  int trials = 0;
  int k_lo = 0;                    // first shell with 2*sqrt(k/n) >= alpha0+eps
  int k_hi = 0;                    // last shell with 2*sqrt(k/n) <= 1
  double analytic_floor = 0.0;     // min of the shell cost bound over the range
  double eta = 0.0;
  double violation_fraction = 0.0; // trials with empirical min < floor - eta
  double mean_gap = 0.0;           // mean of empirical min - analytic floor
};

// Finite-size diagnostic: per trial, the exact minimum shell cost over
// Hamming distances k with alpha(k) = 2*sqrt(k/n) in [alpha0+eps, 1] is
// compared against the analytic cost floor minus the slack eta. Violations
// are expected occasionally at small n; the report carries their fraction
// and the mean gap rather than asserting. n above the exhaustive budget
// throws BudgetError; an empty shell range throws std::invalid_argument.
ShellFloorReport shell_floor_check(const ModelParams& params, int n,
                                   double alpha0, double eps, double eta,
                                   int trials, std::uint64_t seed);

}  // namespace berlab

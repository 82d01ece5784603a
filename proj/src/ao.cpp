#include "berlab/ao.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "berlab/bound_engine.hpp"
#include "berlab/detectors.hpp"
#include "berlab/errors.hpp"
#include "berlab/rng.hpp"
#include "berlab/scalar_math.hpp"

namespace berlab {
namespace {

// Neumaier compensated accumulator; keeps aggregated means independent of
// magnitude ordering.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

int round_ties_even(double v) { return static_cast<int>(std::nearbyint(v)); }

}  // namespace

AoSample draw_ao_sample(const ModelParams& params, int n, std::uint64_t seed,
                        std::uint64_t trial) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  AoSample s;
  s.n = n;
  s.m = rows_for(params.delta, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  CounterRng grow(seed, trial, stream_tag(Stream::kAoNorm));
  CompensatedSum sq;
  for (int i = 0; i < s.m; ++i) {
    const double g = scale * grow.normal(static_cast<std::uint64_t>(i));
    sq.add(g * g);
  }
  s.g_norm = std::sqrt(sq.value());

  CounterRng hcol(seed, trial, stream_tag(Stream::kAoOrder));
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    h[static_cast<std::size_t>(i)] =
        scale * hcol.normal(static_cast<std::uint64_t>(i));
  std::sort(h.begin(), h.end(), std::greater<double>());

  s.h_sorted_prefix_sums.resize(static_cast<std::size_t>(n));
  CompensatedSum run;
  for (int k = 0; k < n; ++k) {
    run.add(h[static_cast<std::size_t>(k)]);
    s.h_sorted_prefix_sums[static_cast<std::size_t>(k)] =
        2.0 * scale * run.value();
  }
  return s;
}

double ao_objective(double alpha, const AoSample& sample, double sigma2) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(sigma2 >= 0.0))
    throw std::invalid_argument("sigma2 must be nonnegative");
  const int k =
      round_ties_even(alpha * alpha * static_cast<double>(sample.n) / 4.0);
  const double top =
      k > 0 ? sample.h_sorted_prefix_sums[static_cast<std::size_t>(k - 1)]
            : 0.0;
  return std::sqrt(alpha * alpha + sigma2) * sample.g_norm - top;
}

OrderStatReport order_stat_concentration(double theta, int n, int trials,
                                         std::uint64_t seed) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::invalid_argument("theta must lie in (0, 1)");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int k = round_ties_even(theta * static_cast<double>(n));
  if (k < 1)
    throw std::invalid_argument("theta*n rounds to zero; no entries selected");

  OrderStatReport rep;
  rep.trials = trials;
  rep.k = std::min(k, n);
  rep.analytic = phi(q_inv(theta));

  std::vector<double> stat(static_cast<std::size_t>(trials));
  std::vector<double> draw(static_cast<std::size_t>(n));
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t),
                   stream_tag(Stream::kOrderStat));
    for (int i = 0; i < n; ++i)
      draw[static_cast<std::size_t>(i)] =
          rng.normal(static_cast<std::uint64_t>(i));
    std::sort(draw.begin(), draw.end(), std::greater<double>());
    CompensatedSum top;
    for (int i = 0; i < rep.k; ++i) top.add(draw[static_cast<std::size_t>(i)]);
    stat[static_cast<std::size_t>(t)] = top.value() / static_cast<double>(n);
  }

  CompensatedSum mean_acc;
  for (double v : stat) mean_acc.add(v);
  rep.mean = mean_acc.value() / static_cast<double>(trials);
  if (trials > 1) {
    CompensatedSum var_acc;
    for (double v : stat) var_acc.add((v - rep.mean) * (v - rep.mean));
    rep.stderr_ = std::sqrt(var_acc.value() /
                            static_cast<double>(trials - 1)) /
                  std::sqrt(static_cast<double>(trials));
  }
  return rep;
}

ShellFloorReport shell_floor_check(const ModelParams& params, int n,
                                   double alpha0, double eps, double eta,
                                   int trials, std::uint64_t seed) {
  if (n < 1 || n > 20)
    throw BudgetError("exhaustive shell search limited to n <= 20");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(alpha0 >= 0.0) || !(eps >= 0.0) || !(eta >= 0.0))
    throw std::invalid_argument("alpha0, eps, eta must be nonnegative");
  const double a_lo = alpha0 + eps;
  if (a_lo > 1.0)
    throw std::invalid_argument("alpha0 + eps exceeds 1; shell range is empty");

  ShellFloorReport rep;
  rep.trials = trials;
  rep.eta = eta;
  const double nn = static_cast<double>(n);
  rep.k_lo = static_cast<int>(std::ceil(a_lo * a_lo * nn / 4.0 - 1e-9));
  rep.k_lo = std::max(rep.k_lo, 0);
  rep.k_hi = static_cast<int>(std::floor(nn / 4.0 + 1e-9));
  if (rep.k_lo > rep.k_hi)
    throw std::invalid_argument("no shell has 2*sqrt(k/n) in the alpha range");

  // Continuous floor over the alpha range, theta = alpha^2/4.
  const double theta_lo = std::max(a_lo * a_lo / 4.0, 1e-12);
  const double theta_hi = 0.25;
  double floor_min = std::numeric_limits<double>::infinity();
  const int grid = 4000;
  for (int i = 0; i <= grid; ++i) {
    const double theta =
        theta_lo + (theta_hi - theta_lo) * static_cast<double>(i) /
                       static_cast<double>(grid);
    floor_min = std::min(floor_min, shell_bound(theta, params));
  }
  rep.analytic_floor = floor_min;

  int violations = 0;
  CompensatedSum gap;
  for (int t = 0; t < trials; ++t) {
    const Instance inst =
        gen_instance(params, n, seed, static_cast<std::uint64_t>(t));
    const std::vector<double> curve = shell_min_curve(inst);
    double emp = std::numeric_limits<double>::infinity();
    for (int k = rep.k_lo; k <= rep.k_hi; ++k)
      emp = std::min(emp, curve[static_cast<std::size_t>(k)]);
    if (emp < floor_min - eta) ++violations;
    gap.add(emp - floor_min);
  }
  rep.violation_fraction =
      static_cast<double>(violations) / static_cast<double>(trials);
  rep.mean_gap = gap.value() / static_cast<double>(trials);
  return rep;
}

}  // namespace berlab

#include "berlab/monte_carlo.hpp"

#include <cmath>
#include <stdexcept>

#include "berlab/detectors.hpp"
#include "berlab/rng.hpp"

namespace berlab {
namespace {

// 97.5th standard-normal percentile, the 95% two-sided critical value.
constexpr double kZ95 = 1.959963984540054;

void wilson_interval(std::uint64_t errors, std::uint64_t total, double* lo,
                     double* hi) {
  const double nn = static_cast<double>(total);
  const double p = static_cast<double>(errors) / nn;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Exact endpoints at the boundary counts; center-half leaves rounding dust
  // above zero otherwise, breaking lo <= p.
  *lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
  *hi = errors == total ? 1.0 : std::min(1.0, center + half);
}

// Isolated-bit trial without materializing the m*n channel: regenerates the
// sign of bit 0, column 0, and the noise vector from the same counter
// positions gen_instance uses, and accumulates the matched-filter statistic
// in the same index order as mf_genie_detect. Bitwise identical to running
// the full instance.
bool genie_trial_correct(const ModelParams& params, int n, std::uint64_t seed,
                         std::uint64_t trial) {
  const int m = rows_for(params.delta, n);
  const double sigma = std::sqrt(params.sigma2);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CounterRng signs(seed, trial, stream_tag(Stream::kSignBits));
  CounterRng chan(seed, trial, stream_tag(Stream::kChannel));
  CounterRng noise(seed, trial, stream_tag(Stream::kNoise));
  const double x0j = (signs.bits(0) >> 63) ? -1.0 : 1.0;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const double a =
        scale * chan.normal(static_cast<std::uint64_t>(i) *
                            static_cast<std::uint64_t>(n));
    const double z = noise.normal(static_cast<std::uint64_t>(i));
    s += a * (x0j * a + sigma * z);
  }
  const double decided = s >= 0.0 ? 1.0 : -1.0;
  return decided == x0j;
}

}  // namespace

std::string detector_name(Detector d) {
  switch (d) {
    case Detector::kMap:
      return "MAP";
    case Detector::kBro:
      return "BRO";
    case Detector::kMfGenie:
      return "MF_GENIE";
  }
  throw std::invalid_argument("unknown detector value");
}

Detector detector_from_name(const std::string& name) {
  if (name == "MAP") return Detector::kMap;
  if (name == "BRO") return Detector::kBro;
  if (name == "MF_GENIE") return Detector::kMfGenie;
  throw std::invalid_argument("unknown detector '" + name +
                              "' (expected MAP, BRO, or MF_GENIE)");
}

MonteCarloReport monte_carlo_ber(Detector detector, const ModelParams& params,
                                 int n, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  MonteCarloReport rep;
  rep.detector = detector;
  rep.params = params;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  for (int t = 0; t < trials; ++t) {
    const auto trial = static_cast<std::uint64_t>(t);
    if (detector == Detector::kMfGenie) {
      rep.bit_errors += genie_trial_correct(params, n, seed, trial) ? 0 : 1;
      rep.bits_total += 1;
      continue;
    }
    const Instance inst = gen_instance(params, n, seed, trial);
    const DetectionResult det = detector == Detector::kMap
                                    ? map_detect(inst)
                                    : box_relax_detect(inst).detection;
    rep.bit_errors += static_cast<std::uint64_t>(det.errors);
    rep.bits_total += static_cast<std::uint64_t>(n);
  }
  rep.ber_hat =
      static_cast<double>(rep.bit_errors) / static_cast<double>(rep.bits_total);
  wilson_interval(rep.bit_errors, rep.bits_total, &rep.ci_lo, &rep.ci_hi);
  return rep;
}

}  // namespace berlab

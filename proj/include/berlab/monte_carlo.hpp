#pragma once
#include <cstdint>
#include <string>

#include "berlab/model.hpp"

namespace berlab {

enum class Detector { kMap, kBro, kMfGenie };

// Canonical detector labels used in CSV output and CLI arguments.
std::string detector_name(Detector d);
Detector detector_from_name(const std::string& name);

struct MonteCarloReport {
  Detector detector = Detector::kMap;
  ModelParams params{1.0, 1.0};
  int n = 0;
  int trials = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;  // trials*n, or trials for the genie bit
  double ber_hat = 0.0;          // bit_errors / bits_total exactly
  double ci_lo = 0.0;            // Wilson 95% score interval
  double ci_hi = 0.0;
  std::uint64_t seed = 0;
};

// Runs `trials` deterministic instances (trial indices 0..trials-1) of the
// chosen detector and pools exact integer bit-error counts. The genie
// detector isolates bit 0 and regenerates only that column's entries, which
// reproduces the full-instance arithmetic exactly. trials < 1 throws
// std::invalid_argument; per-trial budget errors propagate.
MonteCarloReport monte_carlo_ber(Detector detector, const ModelParams& params,
                                 int n, int trials, std::uint64_t seed);

}  // namespace berlab

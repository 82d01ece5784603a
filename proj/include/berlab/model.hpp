#pragma once
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "berlab/errors.hpp"

namespace berlab {

// Problem scale and noise level. delta is the ratio of observation rows to
// unknowns; sigma2 the noise variance, so snr() = 1/sigma2.
struct ModelParams {
  double delta;
  double sigma2;

  ModelParams(double delta_, double sigma2_);
  static ModelParams from_snr_db(double delta_, double snr_db_);

  double snr() const { return 1.0 / sigma2; }
  double snr_db() const;
};

// Rows for a given unknown count: round(delta*n), ties to even.
// Throws std::invalid_argument when the result would be < 1.
int rows_for(double delta, int n);

// One sampled problem: y = channel*x0 + sigma*noise with channel entries
// N(0, 1/n), x0 uniform over {-1,+1}^n, noise standard normal. Immutable
// after construction.
struct Instance {
  int n = 0;
  int m = 0;
  double sigma2 = 0.0;
  Eigen::MatrixXd channel;  // m x n
  Eigen::VectorXd x0;       // entries exactly +-1
  Eigen::VectorXd noise;    // length m
  Eigen::VectorXd y;        // length m, assembled once at generation
};

// Deterministic in (params, n, seed, trial_index); distinct trial indices give
// unrelated streams with no state carry-over. Entry layout is fixed: channel
// entry (i,j) consumes counter i*n+j of its stream, noise entry i counter i,
// sign j counter j, so any sub-block can be regenerated in isolation.
Instance gen_instance(const ModelParams& params, int n, std::uint64_t seed,
                      std::uint64_t trial_index);

// Hard-decision comparison against the transmitted signs.
struct DetectionResult {
  Eigen::VectorXd x_hat;
  int errors = 0;
  double ber = 0.0;        // errors / n exactly
  double objective = 0.0;  // ||y - channel*x_hat||, filled by detectors
};

// Counts disagreeing coordinates. Inputs must be same-length sign vectors;
// mismatched lengths throw std::invalid_argument.
DetectionResult ber_of(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x0);

// JSON replay format: an object with scalar fields n, m, sigma2 and flat
// arrays channel (row-major, length m*n), x0, noise, y. Numbers are written
// with enough digits to round-trip doubles exactly.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

}  // namespace berlab

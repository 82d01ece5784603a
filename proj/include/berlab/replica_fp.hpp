#pragma once
#include "berlab/model.hpp"
#include "berlab/scalar_math.hpp"

namespace berlab {

// Order parameters of the replica saddle-point system for the soft detector
// family; the hard-decision detector is the sharp limit inverse_temp -> inf.
// The local field seen by one coordinate is field_mean + sqrt(field_var)*Z.
struct SaddleState {
  double overlap = 0.0;       // in [-1, 1]; error rate is (1 - overlap)/2
  double self_overlap = 0.0;  // in [0, 1]
  double field_mean = 0.0;    // nonnegative
  double field_var = 0.0;     // nonnegative
  double inverse_temp = 1.0;  // positive sharpness knob
  bool clamped = false;       // a variance radicand was clipped at zero

  double ber() const { return 0.5 * (1.0 - overlap); }
};

// Closure-consistent starting point: overlap 0, self_overlap 1/2, field
// moments recomputed from those.
SaddleState default_saddle_init(const ModelParams& params, double inverse_temp);

// Quadrature sized for the sharpness level: a plain Hermite-type rule while
// the field stays soft, a panelled rule once the tanh transition narrows
// beyond what global polynomials resolve.
QuadratureRule saddle_rule(const ModelParams& params, double inverse_temp);

// One full sweep: overlap and self_overlap from Gaussian expectations of
// tanh and tanh^2 at the current field, then field_mean and field_var from
// the closure formulas at the updated error rate. A transiently negative
// variance radicand is clipped at zero and flagged. Non-finite intermediates
// throw NumericalError; expectation results outside their ranges by more
// than 1e-9 do too.
SaddleState fp_step(const SaddleState& state, const ModelParams& params,
                    const QuadratureRule& rule);

struct SolveOptions {
  double damping = 0.5;  // in (0, 1]
  int max_iters = 2000;
  const QuadratureRule* rule = nullptr;  // defaults to saddle_rule
  const SaddleState* init = nullptr;     // defaults to default_saddle_init
};

struct SolveReport {
  SaddleState state;
  int iters = 0;
  bool converged = false;
  bool diverged = false;     // non-finite update, last finite state kept
  bool clamped_any = false;  // some iterate clipped its radicand
};

// Damped Picard iteration x <- (1-damping)*x + damping*fp_step(x) until the
// scale-aware max-norm change (absolute on the overlaps, relative on the
// field moments) drops to 1e-10. Non-convergence and divergence are reported
// in the result, never masked.
SolveReport solve_fp(const ModelParams& params, double inverse_temp,
                     const SolveOptions& opts = {});

// Residual of the sharp-limit reduction at a candidate error rate: with
// c = sqrt((sigma2 + 4*ber)/delta), returns |ber - q_tail(1/c)|. Zero exactly
// at the fixed point of the reduced equation, so replica_ber drives it below
// 1e-10. ber outside (0,1) throws std::invalid_argument.
double sharp_limit_residual(double ber, const ModelParams& params);

}  // namespace berlab

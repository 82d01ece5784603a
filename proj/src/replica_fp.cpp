#include "berlab/replica_fp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace berlab {

namespace {

void check_inverse_temp(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw std::invalid_argument("replica_fp: inverse_temp must be positive");
  }
}

// Field moments from the closure formulas at a given error rate and
// self-overlap; the variance radicand can dip below zero on transient
// iterates and is clipped.
void close_fields(SaddleState& s, const ModelParams& p) {
  const double b = s.inverse_temp;
  const double den = 1.0 + b * (1.0 - s.self_overlap);
  const double radicand = p.sigma2 + 4.0 * s.ber() + s.self_overlap - 1.0;
  double rad = radicand;
  if (rad < 0.0) {
    rad = 0.0;
    s.clamped = true;
  }
  s.field_mean = p.delta * b / den;
  s.field_var = p.delta * b * b * rad / (den * den);
  if (!std::isfinite(s.field_mean) || !std::isfinite(s.field_var)) {
    throw NumericalError("replica_fp: non-finite field moments");
  }
}

}  // namespace

SaddleState default_saddle_init(const ModelParams& params,
                                double inverse_temp) {
  check_inverse_temp(inverse_temp);
  SaddleState s;
  s.overlap = 0.0;
  s.self_overlap = 0.5;
  s.inverse_temp = inverse_temp;
  close_fields(s, params);
  s.clamped = false;
  return s;
}

QuadratureRule saddle_rule(const ModelParams& params, double inverse_temp) {
  check_inverse_temp(inverse_temp);
  if (inverse_temp <= 2.0) {
    return gauss_hermite_rule(61);
  }
  const int panels = std::max(
      64, static_cast<int>(12.0 * std::sqrt(params.delta) *
                           std::min(inverse_temp, 200.0)));
  return composite_normal_rule(9.0, panels, 16);
}

SaddleState fp_step(const SaddleState& state, const ModelParams& params,
                    const QuadratureRule& rule) {
  check_inverse_temp(state.inverse_temp);
  const double mean = state.field_mean;
  const double sd = std::sqrt(state.field_var);

  // tanh and 1 - tanh^2 in one pass; accumulating the sech^2 mass instead of
  // tanh^2 keeps precision when the field is strong and self_overlap -> 1.
  double t_acc = 0.0;
  double s_acc = 0.0;
  double w_acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = mean + sd * rule.nodes[i];
    const double t = std::tanh(x);
    t_acc += rule.weights[i] * t;
    s_acc += rule.weights[i] * (1.0 - t * t);
    w_acc += rule.weights[i];
  }
  if (!std::isfinite(t_acc) || !std::isfinite(s_acc) || w_acc <= 0.0) {
    throw NumericalError("replica_fp: non-finite expectation");
  }
  t_acc /= w_acc;
  s_acc /= w_acc;
  if (std::abs(t_acc) > 1.0 + 1e-9 || s_acc < -1e-9 || s_acc > 1.0 + 1e-9) {
    throw NumericalError("replica_fp: expectation outside its range");
  }

  SaddleState next = state;
  next.clamped = false;
  next.overlap = std::clamp(t_acc, -1.0, 1.0);
  next.self_overlap = std::clamp(1.0 - s_acc, 0.0, 1.0);
  close_fields(next, params);
  return next;
}

SolveReport solve_fp(const ModelParams& params, double inverse_temp,
                     const SolveOptions& opts) {
  check_inverse_temp(inverse_temp);
  if (!(opts.damping > 0.0) || opts.damping > 1.0) {
    throw std::invalid_argument("solve_fp: damping must lie in (0, 1]");
  }
  if (opts.max_iters < 1) {
    throw std::invalid_argument("solve_fp: max_iters must be >= 1");
  }
  QuadratureRule local;
  const QuadratureRule* rule = opts.rule;
  if (rule == nullptr) {
    local = saddle_rule(params, inverse_temp);
    rule = &local;
  }

  SolveReport report;
  if (opts.init != nullptr) {
    report.state = *opts.init;
    report.state.inverse_temp = inverse_temp;
  } else {
    report.state = default_saddle_init(params, inverse_temp);
  }
  const double d = opts.damping;
  for (int it = 1; it <= opts.max_iters; ++it) {
    report.iters = it;
    SaddleState stepped;
    try {
      stepped = fp_step(report.state, params, *rule);
    } catch (const NumericalError&) {
      report.diverged = true;
      return report;
    }
    report.clamped_any = report.clamped_any || stepped.clamped;

    SaddleState mixed = stepped;
    mixed.overlap = (1.0 - d) * report.state.overlap + d * stepped.overlap;
    mixed.self_overlap =
        (1.0 - d) * report.state.self_overlap + d * stepped.self_overlap;
    mixed.field_mean =
        (1.0 - d) * report.state.field_mean + d * stepped.field_mean;
    mixed.field_var =
        (1.0 - d) * report.state.field_var + d * stepped.field_var;

    const double change = std::max(
        {std::abs(mixed.overlap - report.state.overlap),
         std::abs(mixed.self_overlap - report.state.self_overlap),
         std::abs(mixed.field_mean - report.state.field_mean) /
             (1.0 + std::abs(report.state.field_mean)),
         std::abs(mixed.field_var - report.state.field_var) /
             (1.0 + std::abs(report.state.field_var))});
    report.state = mixed;
    if (change <= 1e-10) {
      report.converged = true;
      return report;
    }
  }
  return report;
}

double sharp_limit_residual(double ber, const ModelParams& params) {
  if (!(ber > 0.0) || !(ber < 1.0)) {
    throw std::invalid_argument("sharp_limit_residual: ber must lie in (0,1)");
  }
  const double c = std::sqrt((params.sigma2 + 4.0 * ber) / params.delta);
  return std::abs(ber - q_tail(1.0 / c));
}

}  // namespace berlab

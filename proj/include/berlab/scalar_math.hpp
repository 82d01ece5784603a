#pragma once
#include <cmath>
#include <cstddef>
#include <vector>

#include "berlab/errors.hpp"

namespace berlab {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2*pi)
inline constexpr double kInvSqrt2 = 0.7071067811865476;
inline constexpr double kSqrt2Pi = 2.5066282746310002;

// Standard normal density. Underflows to 0 for |x| beyond ~38.6.
double phi(double x);

// Upper tail P(Z >= x) of the standard normal, via the scaled complementary
// error function. Relative accuracy is a few ulp for |x| <= 8 and the result
// stays nonzero down to the subnormal range (q_tail(38) ~ 1.1e-316).
double q_tail(double x);

// Inverse of q_tail on (0,1). Bracketing around a rational first guess, then
// safeguarded Newton with phi as the derivative. Forward residual satisfies
// |q_tail(q_inv(p)) - p| <= 1e-12 * max(p, 1-p). Accuracy in x is ~1e-13 for
// p <= 0.5; for p > 0.5 it is limited by how finely doubles near 1 can encode
// p, an inherent floor of about 0.5*ulp(1)/phi(x) (~1e-8 at x = -6).
double q_inv(double p);

// Nodes and weights for E[f(Z)], Z standard normal. Weights are positive and
// sum to 1 within 1e-12; nodes are strictly increasing.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Hermite-type rule re-weighted against the normal density (Golub-Welsch on the
// probabilists' recurrence). Exact for polynomials up to degree 2*order-1.
QuadratureRule gauss_hermite_rule(int order);

// Piecewise Gauss-Legendre on [-half_range, half_range] with the normal density
// folded into the weights. Resolves integrands with features far narrower than
// a global Hermite rule can; half_range >= 8 keeps the discarded tail mass
// below 1e-15.
QuadratureRule composite_normal_rule(double half_range, int panels,
                                     int points_per_panel);

template <class F>
double gauss_expectation(F&& f, const QuadratureRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw EvalError("gauss_expectation: integrand non-finite at node");
    }
    acc += rule.weights[i] * v;
  }
  return acc;
}

}  // namespace berlab

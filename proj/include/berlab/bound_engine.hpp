#pragma once
#include <string>
#include <vector>

#include "berlab/model.hpp"

namespace berlab {

// Shape of the shell-cost landscape: one interior critical point, or a
// local-max / local-min triple at low noise and small delta.
enum class Regime { kUniqueCritical, kThreeCritical };

// Stable names used in CSV/JSON output.
std::string regime_name(Regime r);

// Asymptotic floor of the normalized regression objective restricted to sign
// vectors disagreeing with the truth on a theta fraction of coordinates:
// sqrt(delta)*sqrt(4*theta+sigma2) - 2*phi(q_inv(theta)) on theta in (0,1).
// The theta->0 limit is sigma*sqrt(delta). Outside (0,1) throws
// std::invalid_argument; evaluations clamp theta to [1e-15, 1-1e-15].
double shell_bound(double theta, const ModelParams& params);

// d/dtheta of shell_bound: 2*sqrt(delta)/sqrt(4*theta+sigma2) - 2*q_inv(theta).
double shell_bound_slope(double theta, const ModelParams& params);

// shell_bound(q_tail(tau)) - sigma*sqrt(delta), arranged so the small-tail
// cancellation never happens; usable far beyond where theta is resolvable.
double shell_excess_tau(double tau, const ModelParams& params);

// u^2*(4*q_tail(u)+sigma2). Its crossings of delta at u > 0 mark the critical
// points of shell_bound through theta = q_tail(u).
double crit_locus(double u, double sigma2);

// 4*q_tail(u) - 2*u*phi(u); d/du crit_locus = 2u*(crit_slope_factor + sigma2).
double crit_slope_factor(double u);

// 2*u^3*phi(u); equals crit_locus at the stationary points of crit_locus, so
// its global maximum (at u = sqrt(3)) caps the reachable local-max height.
double crit_hump_height(double u);

// All critical points of shell_bound, ascending, each in (0, 1/2); length is
// 1 or 3. Sign-change scan on crit_locus - delta over u in (0, U_max] at step
// 1e-4 with U_max = max(10, 2*sqrt(delta/sigma2)), bisection-refined to
// |crit_locus - delta| <= 1e-12. An even crossing count means the hump is
// tangent to delta and throws DegenerateTangencyError.
std::vector<double> critical_points(const ModelParams& params);

// Closed-form regime test: kThreeCritical iff sigma2 < -crit_slope_factor(
// sqrt(3)) and delta lies strictly between the local-min and local-max values
// of crit_locus. Agrees with critical_points().size() away from tangency.
Regime classify_regime(const ModelParams& params);

// Predicted error fraction: the critical point minimizing shell_bound. In the
// unique regime this is the only solution of theta = q_tail(sqrt(delta /
// (sigma2 + 4*theta))).
double replica_ber(const ModelParams& params);

// Largest root in (0,1) of shell_bound(theta) = sigma*sqrt(delta), by
// descending scan (step 1e-5 from 1 - 1e-9) plus bisection to 1e-12. When the
// root sits below the scan floor the search continues in the quantile
// coordinate on shell_excess_tau up to sqrt(delta)/sigma + 1, which provably
// brackets it. Uniqueness of the root is verified in the unique regime; a
// missing sign change throws InfeasibleError.
double ber_upper_theta(const ModelParams& params);

// The same bound in quantile coordinates: smallest real root of
// sqrt(delta*snr)*(sqrt(1+4*snr*q_tail(tau)) - 1) = 2*snr*phi(tau), by
// ascending scan on [-10, 10] at step 1e-4 (widened once to [-20, 20]) plus
// bisection. Satisfies q_tail(result) = ber_upper_theta within 1e-8.
double ber_upper_tau(const ModelParams& params);

// Genie lower bound q_tail(sqrt(delta/sigma2)).
double matched_filter_bound(const ModelParams& params);

struct BoundSummary {
  ModelParams params;
  double theta0;
  double tau0;
  double replica;
  std::vector<double> critical_thetas;
  Regime regime;
  double mfb;
};

BoundSummary summarize_bounds(const ModelParams& params);

// One sweep row; on per-point failure ok is false, message carries the reason
// and the numeric columns are NaN.
struct CurveRow {
  double snr_db;
  double mfb;
  double replica;
  double theta0;
  Regime regime;
  bool ok;
  std::string message;
};

// Evaluates the summary columns over an SNR grid; per-point errors flag the
// row instead of aborting the sweep. Empty grids throw std::invalid_argument.
std::vector<CurveRow> ber_curves(double delta,
                                 const std::vector<double>& snr_db_grid);

}  // namespace berlab

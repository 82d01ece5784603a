#include "berlab/bound_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "berlab/scalar_math.hpp"

namespace berlab {

namespace {

constexpr double kThetaClip = 1e-15;
constexpr double kRootTol = 1e-12;

double clip_theta(double theta) {
  return std::min(std::max(theta, kThetaClip), 1.0 - kThetaClip);
}

void check_theta_domain(double theta) {
  if (!(theta > 0.0) || !(theta < 1.0)) {
    throw std::invalid_argument("shell bound: theta must lie in (0,1)");
  }
}

// shell_bound(theta) - sigma*sqrt(delta), with the difference of square roots
// rewritten so small theta never cancels.
double excess_theta(double theta, const ModelParams& p) {
  const double t = clip_theta(theta);
  const double sigma = std::sqrt(p.sigma2);
  const double lead =
      4.0 * std::sqrt(p.delta) * t / (std::sqrt(4.0 * t + p.sigma2) + sigma);
  return lead - 2.0 * phi(q_inv(t));
}

}  // namespace

std::string regime_name(Regime r) {
  return r == Regime::kUniqueCritical ? "UniqueCritical" : "ThreeCritical";
}

double shell_bound(double theta, const ModelParams& params) {
  check_theta_domain(theta);
  const double t = clip_theta(theta);
  return std::sqrt(params.delta) * std::sqrt(4.0 * t + params.sigma2) -
         2.0 * phi(q_inv(t));
}

double shell_bound_slope(double theta, const ModelParams& params) {
  check_theta_domain(theta);
  const double t = clip_theta(theta);
  return 2.0 * std::sqrt(params.delta) / std::sqrt(4.0 * t + params.sigma2) -
         2.0 * q_inv(t);
}

double shell_excess_tau(double tau, const ModelParams& params) {
  if (!std::isfinite(tau)) {
    throw std::invalid_argument("shell_excess_tau: tau must be finite");
  }
  const double sigma = std::sqrt(params.sigma2);
  const double qt = q_tail(tau);
  const double lead = 4.0 * std::sqrt(params.delta) * qt /
                      (std::sqrt(params.sigma2 + 4.0 * qt) + sigma);
  return lead - 2.0 * phi(tau);
}

double crit_locus(double u, double sigma2) {
  if (!std::isfinite(u) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("crit_locus: non-finite input");
  }
  return u * u * (4.0 * q_tail(u) + sigma2);
}

double crit_slope_factor(double u) {
  if (!std::isfinite(u)) {
    throw std::invalid_argument("crit_slope_factor: non-finite input");
  }
  return 4.0 * q_tail(u) - 2.0 * u * phi(u);
}

double crit_hump_height(double u) {
  if (!std::isfinite(u)) {
    throw std::invalid_argument("crit_hump_height: non-finite input");
  }
  return 2.0 * u * u * u * phi(u);
}

std::vector<double> critical_points(const ModelParams& params) {
  const double delta = params.delta;
  const double sigma2 = params.sigma2;
  const double u_max = std::max(10.0, 2.0 * std::sqrt(delta / sigma2));
  const double step = 1e-4;
  const auto resid = [&](double u) { return crit_locus(u, sigma2) - delta; };

  std::vector<std::pair<double, double>> brackets;
  double u_prev = step;
  double f_prev = resid(u_prev);
  const long steps = static_cast<long>(u_max / step);
  for (long k = 2; k <= steps; ++k) {
    const double u = static_cast<double>(k) * step;
    const double f = resid(u);
    if ((f_prev < 0.0 && f >= 0.0) || (f_prev > 0.0 && f <= 0.0)) {
      brackets.emplace_back(u_prev, u);
    }
    u_prev = u;
    f_prev = f;
  }

  if (brackets.size() != 1 && brackets.size() != 3) {
    if (brackets.size() % 2 == 0) {
      throw DegenerateTangencyError(
          "critical_points: even crossing count, hump tangent to delta");
    }
    throw NumericalError("critical_points: unexpected crossing count");
  }

  std::vector<double> roots_u;
  for (const auto& [lo0, hi0] : brackets) {
    double lo = lo0, hi = hi0;
    double f_lo = resid(lo);
    double mid = 0.5 * (lo + hi);
    bool ok = false;
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (lo + hi);
      const double f_mid = resid(mid);
      if (std::abs(f_mid) <= kRootTol) {
        ok = true;
        break;
      }
      if ((f_lo < 0.0) == (f_mid < 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    if (!ok) {
      throw NumericalError("critical_points: bisection stalled");
    }
    roots_u.push_back(mid);
  }

  std::vector<double> thetas;
  for (auto it = roots_u.rbegin(); it != roots_u.rend(); ++it) {
    thetas.push_back(q_tail(*it));
  }
  return thetas;
}

namespace {

// Root of crit_slope_factor(u) + sigma2 on a bracket where the endpoint signs
// differ; the factor is strictly monotone on each side of sqrt(3).
double slope_factor_root(double lo, double hi, double sigma2) {
  double f_lo = crit_slope_factor(lo) + sigma2;
  const double f_hi = crit_slope_factor(hi) + sigma2;
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw NumericalError("classify_regime: bracketing failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = crit_slope_factor(mid) + sigma2;
    if ((f_lo < 0.0) == (f_mid < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-14 * (1.0 + mid)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Regime classify_regime(const ModelParams& params) {
  const double sqrt3 = std::sqrt(3.0);
  const double g_min = crit_slope_factor(sqrt3);
  if (params.sigma2 >= -g_min) {
    return Regime::kUniqueCritical;
  }
  const double u_a = slope_factor_root(1e-8, sqrt3, params.sigma2);
  const double u_b = slope_factor_root(sqrt3, 40.0, params.sigma2);
  const double local_max = crit_locus(u_a, params.sigma2);
  const double local_min = crit_locus(u_b, params.sigma2);
  if (local_min < params.delta && params.delta < local_max) {
    return Regime::kThreeCritical;
  }
  return Regime::kUniqueCritical;
}

double replica_ber(const ModelParams& params) {
  const std::vector<double> pts = critical_points(params);
  double best = pts.front();
  double best_val = shell_bound(best, params);
  for (double t : pts) {
    const double v = shell_bound(t, params);
    if (v < best_val) {
      best = t;
      best_val = v;
    }
  }
  return best;
}

namespace {

double bisect_excess_theta(double lo, double hi, const ModelParams& p) {
  double f_lo = excess_theta(lo, p);
  while (hi - lo > kRootTol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = excess_theta(mid, p);
    if ((f_lo < 0.0) == (f_mid < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double bisect_excess_tau(double lo, double hi, const ModelParams& p) {
  double f_lo = shell_excess_tau(lo, p);
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = shell_excess_tau(mid, p);
    if ((f_lo < 0.0) == (f_mid < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double ber_upper_theta(const ModelParams& params) {
  const double top = 1.0 - 1e-9;
  const double step = 1e-5;
  const double floor_theta = 1e-5;

  int crossings = 0;
  double root = std::numeric_limits<double>::quiet_NaN();

  double t_prev = top;
  double f_prev = excess_theta(t_prev, params);
  const long steps = static_cast<long>((top - floor_theta) / step);
  for (long k = 1; k <= steps; ++k) {
    const double t = top - static_cast<double>(k) * step;
    const double f = excess_theta(t, params);
    if ((f_prev > 0.0 && f <= 0.0) || (f_prev < 0.0 && f >= 0.0)) {
      ++crossings;
      if (crossings == 1) {
        root = bisect_excess_theta(t, t_prev, params);
      }
    }
    t_prev = t;
    f_prev = f;
  }

  if (crossings == 0) {
    // The root sits below the theta grid; continue descending in theta by
    // ascending in the quantile coordinate, starting at the last grid point
    // so the two windows share an endpoint. q_tail(sqrt(delta)/sigma) is the
    // genie bound and cannot exceed the root, so the window covers it.
    const double tau_lo = q_inv(t_prev);
    const double tau_hi = std::sqrt(params.delta / params.sigma2) + 1.0;
    if (tau_hi > tau_lo) {
      const double tau_step = 1e-4;
      double p_prev = tau_lo;
      double g_prev = f_prev;
      const long tsteps = static_cast<long>((tau_hi - tau_lo) / tau_step);
      for (long k = 1; k <= tsteps + 1; ++k) {
        const double tau = tau_lo + static_cast<double>(k) * tau_step;
        const double g = shell_excess_tau(tau, params);
        if ((g_prev > 0.0 && g <= 0.0) || (g_prev < 0.0 && g >= 0.0)) {
          ++crossings;
          if (crossings == 1) {
            root = q_tail(bisect_excess_tau(p_prev, tau, params));
          }
        }
        p_prev = tau;
        g_prev = g;
      }
    }
  }

  if (crossings == 0) {
    throw InfeasibleError("ber_upper_theta: no sign change in scan range");
  }
  if (classify_regime(params) == Regime::kUniqueCritical && crossings != 1) {
    throw NumericalError(
        "ber_upper_theta: multiple roots in the unique regime");
  }
  return root;
}

namespace {

// Quantile-coordinate equation residual, with sqrt(1+z)-1 expanded to avoid
// cancellation at small z.
double tau_residual(double tau, const ModelParams& p) {
  const double snr = 1.0 / p.sigma2;
  const double z = 4.0 * snr * q_tail(tau);
  return std::sqrt(p.delta * snr) * z / (std::sqrt(1.0 + z) + 1.0) -
         2.0 * snr * phi(tau);
}

double tau_scan(double lo, double hi, const ModelParams& p) {
  const double step = 1e-4;
  double t_prev = lo;
  double f_prev = tau_residual(t_prev, p);
  const long steps = static_cast<long>((hi - lo) / step);
  for (long k = 1; k <= steps; ++k) {
    const double t = lo + static_cast<double>(k) * step;
    const double f = tau_residual(t, p);
    if ((f_prev > 0.0 && f <= 0.0) || (f_prev < 0.0 && f >= 0.0)) {
      double a = t_prev, b = t;
      double f_a = f_prev;
      while (b - a > kRootTol) {
        const double mid = 0.5 * (a + b);
        const double f_mid = tau_residual(mid, p);
        if ((f_a < 0.0) == (f_mid < 0.0)) {
          a = mid;
          f_a = f_mid;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    t_prev = t;
    f_prev = f;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double ber_upper_tau(const ModelParams& params) {
  double root = tau_scan(-10.0, 10.0, params);
  if (std::isnan(root)) {
    // The root never exceeds the genie-bound quantile sqrt(delta/sigma2).
    const double hi =
        std::max(20.0, std::sqrt(params.delta / params.sigma2) + 2.0);
    root = tau_scan(-20.0, hi, params);
    if (std::isnan(root)) {
      throw InfeasibleError("ber_upper_tau: no sign change in [-20, " +
                            std::to_string(hi) + "]");
    }
  }
  return root;
}

double matched_filter_bound(const ModelParams& params) {
  return q_tail(std::sqrt(params.delta / params.sigma2));
}

BoundSummary summarize_bounds(const ModelParams& params) {
  BoundSummary s{params,
                 ber_upper_theta(params),
                 ber_upper_tau(params),
                 replica_ber(params),
                 critical_points(params),
                 classify_regime(params),
                 matched_filter_bound(params)};
  return s;
}

std::vector<CurveRow> ber_curves(double delta,
                                 const std::vector<double>& snr_db_grid) {
  if (snr_db_grid.empty()) {
    throw std::invalid_argument("ber_curves: empty snr grid");
  }
  std::vector<CurveRow> rows;
  rows.reserve(snr_db_grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double db : snr_db_grid) {
    CurveRow row{db, nan, nan, nan, Regime::kUniqueCritical, true, ""};
    try {
      const ModelParams p = ModelParams::from_snr_db(delta, db);
      row.regime = classify_regime(p);
      row.mfb = matched_filter_bound(p);
      row.replica = replica_ber(p);
      row.theta0 = ber_upper_theta(p);
    } catch (const std::exception& e) {
      row.ok = false;
      row.message = e.what();
      rows.push_back(row);
      continue;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace berlab

// Acceptance gate: one self-contained check per shipped guarantee, each
// printed as a single PASS/FAIL line with its elapsed time against the
// stated budget. Exit status is the number of failed checks. Every check
// recomputes its reference values from scratch; nothing is shared with the
// unit suite except the library under test.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "berlab/ao.hpp"
#include "berlab/bound_engine.hpp"
#include "berlab/detectors.hpp"
#include "berlab/model.hpp"
#include "berlab/monte_carlo.hpp"
#include "berlab/replica_fp.hpp"
#include "berlab/scalar_math.hpp"

using namespace berlab;

namespace {

using Check = std::function<bool(std::string&)>;

struct Criterion {
  const char* name;
  double budget_s;
  Check run;
};

char buf_storage[512];

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf_storage, sizeof(buf_storage), f, ap);
  va_end(ap);
  return buf_storage;
}

// ---- 1: locus constants ----------------------------------------------------
bool check_locus_constants(std::string& d) {
  const double g3 = crit_slope_factor(std::sqrt(3.0));
  double best_u = 0.0, best_h = -1.0;
  for (double u = 1e-6; u <= 5.0; u += 1e-6) {
    const double h = crit_hump_height(u);
    if (h > best_h) {
      best_h = h;
      best_u = u;
    }
  }
  d = fmt("slope factor %.6f, hump max %.6f at u=%.6f", g3, best_h, best_u);
  return std::abs(g3 - (-0.14183)) <= 1e-4 &&
         std::abs(best_h - 0.925082) <= 1e-5 &&
         std::abs(best_u - std::sqrt(3.0)) <= 1e-3;
}

// ---- 2: critical-point counts ---------------------------------------------
// Independent count: dense 1e-6 scan of u^2*(4Q(u)+sigma2) - delta on (0, 6].
// Past u=6 the slope factor exceeds -1e-7, so with sigma2 >= 1e-4 the locus
// rises monotonically and contributes exactly one more crossing iff it is
// still below delta at u=6.
int scan_crossings(double delta, double sigma2) {
  const double s2 = std::sqrt(2.0);
  auto f = [&](double u) {
    return u * u * (2.0 * std::erfc(u / s2) + sigma2) - delta;
  };
  int count = 0;
  double prev = f(1e-6);
  for (double u = 2e-6; u <= 6.0; u += 1e-6) {
    const double cur = f(u);
    if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) ++count;
    prev = cur;
  }
  if (prev < 0.0) ++count;
  return count;
}

bool check_critical_counts(std::string& d) {
  std::vector<std::tuple<double, double, int>> points;
  for (double delta : {0.93, 1.0, 1.5, 3.0})
    for (double sigma2 : {1e-4, 1e-3, 1e-2, 1e-1, 1.0})
      points.emplace_back(delta, sigma2, 1);
  for (double delta : {0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
    points.emplace_back(delta, 0.15, 1);
  points.emplace_back(0.6, 0.01, 3);

  for (const auto& [delta, sigma2, expected] : points) {
    const int lib =
        static_cast<int>(critical_points(ModelParams(delta, sigma2)).size());
    const int scan = scan_crossings(delta, sigma2);
    if (lib != expected || scan != expected) {
      d = fmt("delta=%g sigma2=%g: lib=%d scan=%d expected=%d", delta, sigma2,
              lib, scan, expected);
      return false;
    }
  }
  d = fmt("%zu points, library and scan agree", points.size());
  return true;
}

// ---- 3: quantile-root consistency -----------------------------------------
bool check_quantile_consistency(std::string& d) {
  double worst = 0.0;
  for (double delta : {0.8, 1.0, 1.2, 1.5, 2.0, 2.5, 3.0, 4.0})
    for (double db : {2.0, 6.0, 10.0, 14.0, 18.0}) {
      const ModelParams p = ModelParams::from_snr_db(delta, db);
      const double dev = std::abs(q_tail(ber_upper_tau(p)) - ber_upper_theta(p));
      worst = std::max(worst, dev);
    }
  d = fmt("40 points, max |Q(tau0) - theta0| = %.2e", worst);
  return worst <= 1e-8;
}

// ---- 4: stationarity of the predicted rate --------------------------------
bool check_stationarity(std::string& d) {
  const std::vector<std::pair<double, double>> pts = {
      {0.8, 0.2}, {0.93, 0.16}, {1.0, 0.1},  {1.1, 0.05}, {1.2, 0.3},
      {1.5, 0.5}, {2.0, 0.1},   {2.5, 0.4},  {3.0, 0.8},  {3.5, 0.25}};
  double worst_slope = 0.0, worst_arg = 0.0;
  for (const auto& [delta, sigma2] : pts) {
    const ModelParams p(delta, sigma2);
    if (classify_regime(p) != Regime::kUniqueCritical) {
      d = fmt("delta=%g sigma2=%g not in the unique regime", delta, sigma2);
      return false;
    }
    const double star = replica_ber(p);
    worst_slope = std::max(worst_slope, std::abs(shell_bound_slope(star, p)));

    double best_t = 1e-6, best_v = shell_bound(1e-6, p);
    for (double t = 2e-6; t <= 0.5; t += 1e-6) {
      const double v = shell_bound(t, p);
      if (v < best_v) {
        best_v = v;
        best_t = t;
      }
    }
    worst_arg = std::max(worst_arg, std::abs(best_t - star));
  }
  d = fmt("10 points, max |slope| = %.2e, max argmin dev = %.2e", worst_slope,
          worst_arg);
  return worst_slope <= 1e-9 && worst_arg <= 1e-5;
}

// ---- 5: soft-limit consistency --------------------------------------------
bool check_soft_limit(std::string& d) {
  const ModelParams p(2.0, 0.1);
  const double star = replica_ber(p);
  const double resid = sharp_limit_residual(star, p);
  if (resid > 1e-10) {
    d = fmt("sharp-limit residual %.2e", resid);
    return false;
  }
  double prev = 2.0;
  double at100 = 0.0;
  for (double b : {10.0, 30.0, 100.0}) {
    const SolveReport rep = solve_fp(p, b);
    if (!rep.converged || rep.diverged) {
      d = fmt("solver failed at sharpness %g", b);
      return false;
    }
    const double ber = rep.state.ber();
    if (ber >= prev || ber < star - 1e-12) {
      d = fmt("non-monotone approach at sharpness %g: %.6g", b, ber);
      return false;
    }
    prev = ber;
    if (b == 100.0) at100 = ber;
  }
  d = fmt("residual %.1e, rate at sharpness 100 = %.3g vs limit %.3g", resid,
          at100, star);
  return std::abs(at100 - star) <= 0.1;
}

// ---- 6: genie-bound reproduction ------------------------------------------
bool check_genie_bound(std::string& d) {
  std::string parts;
  for (double db : {4.0, 8.0}) {
    const ModelParams p = ModelParams::from_snr_db(1.0, db);
    const double target = q_tail(std::sqrt(p.delta * p.snr()));
    const double se = std::sqrt(target * (1.0 - target) / 1e5);
    const MonteCarloReport r =
        monte_carlo_ber(Detector::kMfGenie, p, 1000, 100000, 101);
    const double dev = (r.ber_hat - target) / se;
    parts += fmt("%gdB %+.2fse ", db, dev);
    if (std::abs(dev) > 3.0) {
      d = parts + "exceeds 3se";
      return false;
    }
  }
  d = parts;
  return true;
}

// ---- 7: exhaustive-search brackets ----------------------------------------
bool check_search_brackets(std::string& d) {
  std::string parts;
  for (double db : {8.0, 12.0}) {
    const ModelParams p = ModelParams::from_snr_db(1.0, db);
    const BoundSummary s = summarize_bounds(p);
    const MonteCarloReport r = monte_carlo_ber(Detector::kMap, p, 16, 2000, 811);
    const double se =
        std::sqrt(r.ber_hat * (1.0 - r.ber_hat) / double(r.bits_total));
    const double lo = s.mfb - 3.0 * se;
    const double hi = s.theta0 + 3.0 * se + 0.02;
    parts += fmt("%gdB ber=%.4g in [%.3g, %.3g] ", db, r.ber_hat, lo, hi);
    if (r.ber_hat < lo || r.ber_hat > hi) {
      d = parts + "outside bracket";
      return false;
    }
  }
  const ModelParams p12 = ModelParams::from_snr_db(1.0, 12.0);
  const MonteCarloReport small = monte_carlo_ber(Detector::kMap, p12, 12, 2000, 811);
  const MonteCarloReport large = monte_carlo_ber(Detector::kMap, p12, 20, 2000, 811);
  const double se12 = std::sqrt(small.ber_hat * (1.0 - small.ber_hat) /
                                double(small.bits_total));
  parts += fmt("| trend %.4g <= %.4g + 2se", large.ber_hat, small.ber_hat);
  d = parts;
  return large.ber_hat <= small.ber_hat + 2.0 * se12;
}

// ---- 8: auxiliary concentration -------------------------------------------
bool check_auxiliary_concentration(std::string& d) {
  const ModelParams p(1.0, 0.1);
  std::vector<AoSample> samples;
  samples.reserve(100);
  for (int t = 0; t < 100; ++t) samples.push_back(draw_ao_sample(p, 4000, 808, t));

  double worst_rel = 0.0;
  for (double alpha : {0.2, 0.4, 0.6, 0.8}) {
    double sum = 0.0;
    for (const AoSample& s : samples) sum += ao_objective(alpha, s, p.sigma2);
    const double mean = sum / 100.0;
    const double ref = shell_bound(alpha * alpha / 4.0, p);
    worst_rel = std::max(worst_rel, std::abs(mean - ref) / std::abs(ref));
  }
  const OrderStatReport o = order_stat_concentration(0.25, 4000, 200, 808);
  const double os_dev = std::abs(o.mean - o.analytic) / o.stderr_;
  d = fmt("max rel dev %.3f%%, order-stat dev %.2f stderr", 100.0 * worst_rel,
          os_dev);
  return worst_rel <= 0.02 && os_dev <= 3.0;
}

// ---- 9: shell floor coverage ----------------------------------------------
bool check_shell_floor(std::string& d) {
  const ModelParams p(1.0, 0.1);
  std::string parts;
  bool ok = true;
  for (int n = 16; n <= 20; ++n) {
    int good = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const Instance inst = gen_instance(p, n, 555, trial);
      const std::vector<double> curve = shell_min_curve(inst);
      bool above = true;
      for (int k = 1; 2 * k <= n; ++k)
        if (curve[k] < shell_bound(double(k) / n, p) - 0.15) above = false;
      good += above;
    }
    parts += fmt("n=%d:%d%% ", n, good);
    ok = ok && good >= 90;
  }
  d = parts + "(floor - 0.15, shells up to n/2)";
  return ok;
}

// ---- 10: curve shape and relaxation crossover ------------------------------
bool check_curve_shape(std::string& d) {
  std::vector<double> grid;
  for (double db = 0.0; db <= 16.0 + 1e-9; db += 0.25) grid.push_back(db);
  const std::vector<CurveRow> rows = ber_curves(1.0, grid);

  for (const CurveRow& r : rows) {
    if (!r.ok) {
      d = fmt("row %gdB failed: %s", r.snr_db, r.message.c_str());
      return false;
    }
    const double slack1 = 1e-12 * (1.0 + r.theta0);
    const double slack2 = 1e-12 * (1.0 + r.replica);
    if (r.theta0 < r.replica - slack1 || r.replica < r.mfb - slack2) {
      d = fmt("ordering violated at %gdB", r.snr_db);
      return false;
    }
  }

  // Kink location: sharpest bend of log10(theta0) against dB.
  std::vector<double> curvature;
  for (size_t i = 1; i + 1 < rows.size(); ++i) {
    const double a = std::log10(rows[i - 1].theta0);
    const double b = std::log10(rows[i].theta0);
    const double c = std::log10(rows[i + 1].theta0);
    curvature.push_back(std::abs(a - 2.0 * b + c));
  }
  const size_t peak =
      std::max_element(curvature.begin(), curvature.end()) - curvature.begin();
  const double peak_db = rows[peak + 1].snr_db;
  std::vector<double> sorted = curvature;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (peak_db < 6.0 || peak_db > 10.0 || curvature[peak] < 5.0 * median) {
    d = fmt("kink at %gdB, peak %.3f vs median %.3f", peak_db, curvature[peak],
            median);
    return false;
  }

  std::string parts = fmt("ordered, kink at %gdB | ", peak_db);
  const double theta_low =
      ber_upper_theta(ModelParams::from_snr_db(1.0, 2.0));
  const double theta_high =
      ber_upper_theta(ModelParams::from_snr_db(1.0, 14.0));
  const MonteCarloReport b2 = monte_carlo_ber(
      Detector::kBro, ModelParams::from_snr_db(1.0, 2.0), 128, 2000, 1401);
  const MonteCarloReport b14 = monte_carlo_ber(
      Detector::kBro, ModelParams::from_snr_db(1.0, 14.0), 128, 2000, 1401);
  parts += fmt("relaxation %.3g < %.3g at 2dB, %.3g > %.3g at 14dB", b2.ber_hat,
               theta_low, b14.ber_hat, theta_high);
  d = parts;
  return b2.ber_hat < theta_low && b14.ber_hat > theta_high;
}

// ---- 11: low-noise ratios ---------------------------------------------------
bool check_low_noise_ratios(std::string& d) {
  const double delta = 1.2;
  double prev1 = 1e300, prev2 = 1e300, r1 = 0.0, r2 = 0.0;
  for (double sigma2 : {1e-2, std::pow(10.0, -2.5), 1e-3}) {
    const ModelParams p(delta, sigma2);
    const double root = std::sqrt(delta) / std::sqrt(sigma2);
    r1 = replica_ber(p) / q_tail(root);
    r2 = ber_upper_theta(p) / q_tail(root - 0.05);
    if (r1 > prev1 + 1e-6 || r2 > prev2 + 1e-6) {
      d = fmt("ratio increased at sigma2=%g: %.6g %.6g", sigma2, r1, r2);
      return false;
    }
    prev1 = r1;
    prev2 = r2;
  }
  d = fmt("final ratios %.4f and %.4f, both <= 1.1", r1, r2);
  return r1 <= 1.1 && r2 <= 1.1;
}

// ---- 12: detector oracle equivalence ---------------------------------------
bool check_detector_oracles(std::string& d) {
  const double deltas[] = {0.75, 1.0, 1.5};
  const double dbs[] = {2.0, 6.0, 10.0};
  double worst_kkt = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 9;
    const ModelParams p =
        ModelParams::from_snr_db(deltas[t % 3], dbs[(t / 3) % 3]);
    const Instance inst = gen_instance(p, n, 1212, t);

    // Fresh 2^n enumeration, ties to the smaller index.
    Eigen::VectorXd best_x;
    double best_sq = 1e300;
    for (std::uint64_t s = 0; s < (std::uint64_t(1) << n); ++s) {
      Eigen::VectorXd x(n);
      for (int j = 0; j < n; ++j) x[j] = (s >> j) & 1 ? -1.0 : 1.0;
      const double sq = (inst.y - inst.channel * x).squaredNorm();
      if (sq < best_sq) {
        best_sq = sq;
        best_x = x;
      }
    }
    const DetectionResult map = map_detect(inst);
    if (map.x_hat != best_x ||
        map.objective != (inst.y - inst.channel * best_x).norm()) {
      d = fmt("enumeration mismatch at trial %d (n=%d)", t, n);
      return false;
    }

    const BoxRelaxResult bro = box_relax_detect(inst);
    if (!bro.converged) {
      d = fmt("relaxation did not converge at trial %d", t);
      return false;
    }
    const Eigen::VectorXd g =
        inst.channel.transpose() * (inst.channel * bro.relaxed - inst.y);
    for (int j = 0; j < n; ++j) {
      double viol;
      if (bro.relaxed[j] >= 1.0 - 1e-9)
        viol = std::max(g[j], 0.0);
      else if (bro.relaxed[j] <= -1.0 + 1e-9)
        viol = std::max(-g[j], 0.0);
      else
        viol = std::abs(g[j]);
      worst_kkt = std::max(worst_kkt, viol);
    }
  }
  d = fmt("200 instances exact, max stationarity violation %.2e", worst_kkt);
  return worst_kkt <= 1e-8;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"locus constants", 1.0, check_locus_constants},
      {"critical-point counts", 10.0, check_critical_counts},
      {"quantile-root consistency", 5.0, check_quantile_consistency},
      {"stationarity of predicted rate", 30.0, check_stationarity},
      {"soft-limit consistency", 30.0, check_soft_limit},
      {"genie-bound reproduction", 60.0, check_genie_bound},
      {"exhaustive-search brackets", 900.0, check_search_brackets},
      {"auxiliary concentration", 60.0, check_auxiliary_concentration},
      {"shell floor coverage", 600.0, check_shell_floor},
      {"curve shape and crossover", 1200.0, check_curve_shape},
      {"low-noise ratios", 5.0, check_low_noise_ratios},
      {"detector oracle equivalence", 60.0, check_detector_oracles},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    std::string detail;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = fmt("exception: %s", e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_budget = elapsed < c.budget_s;
    const bool pass = ok && in_budget;
    failures += !pass;
    std::printf("[%2zu] %-32s %s  %5.1fs (budget %.0fs)  %s%s\n", i + 1, c.name,
                pass ? "PASS" : "FAIL", elapsed, c.budget_s, detail.c_str(),
                !in_budget ? " [over budget]" : "");
    std::fflush(stdout);
  }
  return failures;
}

// Python bindings: the analytic bound engine, the exact small-n detectors,
// the Monte Carlo harness, and the auxiliary-comparison sampler, exposed
// with numpy interop for the Eigen types. Error mapping follows the CLI:
// domain and budget problems arrive as ValueError, numerical machinery
// failures as berlab.NumericalError.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "berlab/ao.hpp"
#include "berlab/bound_engine.hpp"
#include "berlab/detectors.hpp"
#include "berlab/errors.hpp"
#include "berlab/model.hpp"
#include "berlab/monte_carlo.hpp"
#include "berlab/replica_fp.hpp"
#include "berlab/scalar_math.hpp"

namespace py = pybind11;
using namespace berlab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "BER bounds and detector simulations for BPSK lattice models";
  m.attr("__version__") = "0.1.0";

  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);

  // ---- scalars ----
  m.def("q_tail", &q_tail, py::arg("x"),
        "Standard normal upper tail probability");
  m.def("q_inv", &q_inv, py::arg("p"),
        "Inverse of q_tail on (0, 1)");
  m.def("phi", &phi, py::arg("x"), "Standard normal density");

  // ---- model ----
  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<double, double>(), py::arg("delta"), py::arg("sigma2"))
      .def_static("from_snr_db", &ModelParams::from_snr_db, py::arg("delta"),
                  py::arg("snr_db"))
      .def_readonly("delta", &ModelParams::delta)
      .def_readonly("sigma2", &ModelParams::sigma2)
      .def("snr", &ModelParams::snr)
      .def("snr_db", &ModelParams::snr_db)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(delta=" + std::to_string(p.delta) +
               ", sigma2=" + std::to_string(p.sigma2) + ")";
      });

  py::class_<Instance>(m, "Instance")
      .def_readonly("n", &Instance::n)
      .def_readonly("m", &Instance::m)
      .def_readonly("sigma2", &Instance::sigma2)
      .def_readonly("channel", &Instance::channel)
      .def_readonly("x0", &Instance::x0)
      .def_readonly("noise", &Instance::noise)
      .def_readonly("y", &Instance::y);

  m.def("rows_for", &rows_for, py::arg("delta"), py::arg("n"));
  m.def("gen_instance", &gen_instance, py::arg("params"), py::arg("n"),
        py::arg("seed"), py::arg("trial_index") = 0,
        "Deterministic sampled problem y = channel*x0 + sigma*noise");
  m.def("instance_to_json", &instance_to_json, py::arg("instance"));
  m.def("instance_from_json", &instance_from_json, py::arg("text"));

  // ---- bound engine ----
  py::enum_<Regime>(m, "Regime")
      .value("UNIQUE_CRITICAL", Regime::kUniqueCritical)
      .value("THREE_CRITICAL", Regime::kThreeCritical);

  m.def("shell_bound", &shell_bound, py::arg("theta"), py::arg("params"),
        "Asymptotic floor of the normalized shell cost at error fraction "
        "theta");
  m.def("shell_bound_slope", &shell_bound_slope, py::arg("theta"),
        py::arg("params"));
  m.def("shell_excess_tau", &shell_excess_tau, py::arg("tau"),
        py::arg("params"));
  m.def("crit_locus", &crit_locus, py::arg("u"), py::arg("sigma2"));
  m.def("crit_slope_factor", &crit_slope_factor, py::arg("u"));
  m.def("crit_hump_height", &crit_hump_height, py::arg("u"));
  m.def("critical_points", &critical_points, py::arg("params"));
  m.def("classify_regime", &classify_regime, py::arg("params"));
  m.def("regime_name", &regime_name, py::arg("regime"));
  m.def("replica_ber", &replica_ber, py::arg("params"),
        "Predicted error fraction: the cost-minimizing critical point");
  m.def("ber_upper_theta", &ber_upper_theta, py::arg("params"),
        "Largest root of shell_bound(theta) = sigma*sqrt(delta)");
  m.def("ber_upper_tau", &ber_upper_tau, py::arg("params"));
  m.def("matched_filter_bound", &matched_filter_bound, py::arg("params"));

  py::class_<BoundSummary>(m, "BoundSummary")
      .def_readonly("params", &BoundSummary::params)
      .def_readonly("theta0", &BoundSummary::theta0)
      .def_readonly("tau0", &BoundSummary::tau0)
      .def_readonly("replica", &BoundSummary::replica)
      .def_readonly("critical_thetas", &BoundSummary::critical_thetas)
      .def_readonly("regime", &BoundSummary::regime)
      .def_readonly("mfb", &BoundSummary::mfb);
  m.def("summarize_bounds", &summarize_bounds, py::arg("params"));

  py::class_<CurveRow>(m, "CurveRow")
      .def_readonly("snr_db", &CurveRow::snr_db)
      .def_readonly("mfb", &CurveRow::mfb)
      .def_readonly("replica", &CurveRow::replica)
      .def_readonly("theta0", &CurveRow::theta0)
      .def_readonly("regime", &CurveRow::regime)
      .def_readonly("ok", &CurveRow::ok)
      .def_readonly("message", &CurveRow::message);
  m.def("ber_curves", &ber_curves, py::arg("delta"), py::arg("snr_db_grid"));

  // ---- replica fixed point ----
  py::class_<SaddleState>(m, "SaddleState")
      .def_readonly("overlap", &SaddleState::overlap)
      .def_readonly("self_overlap", &SaddleState::self_overlap)
      .def_readonly("field_mean", &SaddleState::field_mean)
      .def_readonly("field_var", &SaddleState::field_var)
      .def_readonly("inverse_temp", &SaddleState::inverse_temp)
      .def_readonly("clamped", &SaddleState::clamped)
      .def("ber", &SaddleState::ber);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("state", &SolveReport::state)
      .def_readonly("iters", &SolveReport::iters)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("diverged", &SolveReport::diverged)
      .def_readonly("clamped_any", &SolveReport::clamped_any);

  m.def(
      "solve_fp",
      [](const ModelParams& params, double inverse_temp, double damping,
         int max_iters) {
        SolveOptions opts;
        opts.damping = damping;
        opts.max_iters = max_iters;
        return solve_fp(params, inverse_temp, opts);
      },
      py::arg("params"), py::arg("inverse_temp"), py::arg("damping") = 0.5,
      py::arg("max_iters") = 2000,
      "Damped iteration on the saddle-point closure at finite sharpness");
  m.def("sharp_limit_residual", &sharp_limit_residual, py::arg("ber"),
        py::arg("params"));

  // ---- detectors ----
  py::class_<DetectionResult>(m, "DetectionResult")
      .def_readonly("x_hat", &DetectionResult::x_hat)
      .def_readonly("errors", &DetectionResult::errors)
      .def_readonly("ber", &DetectionResult::ber)
      .def_readonly("objective", &DetectionResult::objective);

  py::class_<BoxRelaxResult>(m, "BoxRelaxResult")
      .def_readonly("detection", &BoxRelaxResult::detection)
      .def_readonly("relaxed", &BoxRelaxResult::relaxed)
      .def_readonly("relaxed_objective", &BoxRelaxResult::relaxed_objective)
      .def_readonly("converged", &BoxRelaxResult::converged)
      .def_readonly("iters", &BoxRelaxResult::iters);

  py::class_<MfGenieResult>(m, "MfGenieResult")
      .def_readonly("correct", &MfGenieResult::correct)
      .def_readonly("statistic", &MfGenieResult::statistic);

  m.def("map_detect", &map_detect, py::arg("instance"),
        "Exact sign-vector maximum-likelihood decision (n capped at 24)");
  m.def("box_relax_detect", &box_relax_detect, py::arg("instance"),
        "Projected-gradient solve over the solid cube, then thresholding");
  m.def("mf_genie_detect", &mf_genie_detect, py::arg("instance"),
        py::arg("bit_index"));
  m.def("shell_min_cost", &shell_min_cost, py::arg("instance"), py::arg("k"));
  m.def("shell_min_curve", &shell_min_curve, py::arg("instance"));

  // ---- Monte Carlo ----
  py::enum_<Detector>(m, "Detector")
      .value("MAP", Detector::kMap)
      .value("BRO", Detector::kBro)
      .value("MF_GENIE", Detector::kMfGenie);
  m.def("detector_name", &detector_name, py::arg("detector"));

  py::class_<MonteCarloReport>(m, "MonteCarloReport")
      .def_readonly("detector", &MonteCarloReport::detector)
      .def_readonly("params", &MonteCarloReport::params)
      .def_readonly("n", &MonteCarloReport::n)
      .def_readonly("trials", &MonteCarloReport::trials)
      .def_readonly("bit_errors", &MonteCarloReport::bit_errors)
      .def_readonly("bits_total", &MonteCarloReport::bits_total)
      .def_readonly("ber_hat", &MonteCarloReport::ber_hat)
      .def_readonly("ci_lo", &MonteCarloReport::ci_lo)
      .def_readonly("ci_hi", &MonteCarloReport::ci_hi)
      .def_readonly("seed", &MonteCarloReport::seed)
      .def("__repr__", [](const MonteCarloReport& r) {
        return "MonteCarloReport(" + detector_name(r.detector) +
               ", n=" + std::to_string(r.n) +
               ", trials=" + std::to_string(r.trials) +
               ", ber_hat=" + std::to_string(r.ber_hat) + ")";
      });

  m.def("monte_carlo_ber", &monte_carlo_ber, py::arg("detector"),
        py::arg("params"), py::arg("n"), py::arg("trials"), py::arg("seed"),
        "Pooled bit-error rate with a Wilson 95% interval");
  m.def(
      "monte_carlo_ber",
      [](const std::string& detector, const ModelParams& params, int n,
         int trials, std::uint64_t seed) {
        return monte_carlo_ber(detector_from_name(detector), params, n, trials,
                               seed);
      },
      py::arg("detector"), py::arg("params"), py::arg("n"), py::arg("trials"),
      py::arg("seed"));

  // ---- auxiliary comparison ----
  py::class_<AoSample>(m, "AoSample")
      .def_readonly("n", &AoSample::n)
      .def_readonly("m", &AoSample::m)
      .def_readonly("g_norm", &AoSample::g_norm)
      .def_readonly("h_sorted_prefix_sums", &AoSample::h_sorted_prefix_sums);

  py::class_<OrderStatReport>(m, "OrderStatReport")
      .def_readonly("mean", &OrderStatReport::mean)
      .def_readonly("stderr", &OrderStatReport::stderr_)
      .def_readonly("analytic", &OrderStatReport::analytic)
      .def_readonly("trials", &OrderStatReport::trials)
      .def_readonly("k", &OrderStatReport::k);

  py::class_<ShellFloorReport>(m, "ShellFloorReport")
      .def_readonly("trials", &ShellFloorReport::trials)
      .def_readonly("k_lo", &ShellFloorReport::k_lo)
      .def_readonly("k_hi", &ShellFloorReport::k_hi)
      .def_readonly("analytic_floor", &ShellFloorReport::analytic_floor)
      .def_readonly("eta", &ShellFloorReport::eta)
      .def_readonly("violation_fraction", &ShellFloorReport::violation_fraction)
      .def_readonly("mean_gap", &ShellFloorReport::mean_gap);

  m.def("draw_ao_sample", &draw_ao_sample, py::arg("params"), py::arg("n"),
        py::arg("seed"), py::arg("trial") = 0);
  m.def("ao_objective", &ao_objective, py::arg("alpha"), py::arg("sample"),
        py::arg("sigma2"));
  m.def("order_stat_concentration", &order_stat_concentration,
        py::arg("theta"), py::arg("n"), py::arg("trials"), py::arg("seed"));
  m.def("shell_floor_check", &shell_floor_check, py::arg("params"),
        py::arg("n"), py::arg("alpha0"), py::arg("eps"), py::arg("eta"),
        py::arg("trials"), py::arg("seed"));
}

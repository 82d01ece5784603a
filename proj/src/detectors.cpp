#include "berlab/detectors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

#include "berlab/errors.hpp"

namespace berlab {
namespace {

constexpr int kEnumMaxBits = 24;
constexpr int kShellMaxBits = 20;

// Visits every length-n sign codeword once. The codeword with mask g has
// x_j = -1 exactly where bit j of g is set; successive visits differ in one
// coordinate, so the residual moves by +-2 columns. visit(g, flipped_bit,
// squared_residual) sees the fresh squared norm each step; flipped_bit is -1
// on the initial all-plus codeword.
template <typename Visitor>
void sweep_codewords(const Instance& inst, Visitor&& visit) {
  const int n = inst.n;
  Eigen::VectorXd r = inst.y - inst.channel.rowwise().sum();
  visit(std::uint32_t{0}, -1, r.squaredNorm());
  std::uint32_t g = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int j = std::countr_zero(i);
    g ^= std::uint32_t{1} << j;
    const bool now_minus = (g >> j) & 1u;
    r.noalias() += (now_minus ? 2.0 : -2.0) * inst.channel.col(j);
    visit(g, j, r.squaredNorm());
  }
}

Eigen::VectorXd codeword_vector(std::uint32_t g, int n) {
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j) x[j] = ((g >> j) & 1u) ? -1.0 : 1.0;
  return x;
}

// Minimal-change order on k-subsets of {0..n-1}: consecutive subsets swap a
// single element. Built from the classic recursion S(n,k) = S(n-1,k) then
// S(n-1,k-1) reversed with n-1 appended; the junction is itself a single
// swap. Returns the transition list (out, in) starting from {0..k-1}.
std::vector<std::pair<int, int>> revolving_door_transitions(int n, int k) {
  if (k == 0 || k == n) return {};
  std::vector<std::pair<int, int>> head = revolving_door_transitions(n - 1, k);
  std::vector<std::pair<int, int>> tail =
      revolving_door_transitions(n - 1, k - 1);
  std::vector<std::pair<int, int>> out;
  out.reserve(head.size() + 1 + tail.size());
  out.insert(out.end(), head.begin(), head.end());
  out.emplace_back(k >= 2 ? k - 2 : n - 2, n - 1);
  for (auto it = tail.rbegin(); it != tail.rend(); ++it)
    out.emplace_back(it->second, it->first);
  return out;
}

void check_shell_budget(const Instance& inst) {
  if (inst.n > kShellMaxBits)
    throw BudgetError("shell enumeration limited to n <= " +
                      std::to_string(kShellMaxBits) + ", got n = " +
                      std::to_string(inst.n));
}

}  // namespace

DetectionResult map_detect(const Instance& inst) {
  if (inst.n > kEnumMaxBits)
    throw BudgetError("exhaustive search limited to n <= " +
                      std::to_string(kEnumMaxBits) + ", got n = " +
                      std::to_string(inst.n));
  std::uint32_t best_g = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  sweep_codewords(inst, [&](std::uint32_t g, int, double sq) {
    if (sq < best_cost || (sq == best_cost && g < best_g)) {
      best_cost = sq;
      best_g = g;
    }
  });
  // Recompute the winner's residual from scratch so the reported objective
  // carries no accumulated update error.
  const Eigen::VectorXd x_hat = codeword_vector(best_g, inst.n);
  DetectionResult out = ber_of(x_hat, inst.x0);
  out.objective = (inst.y - inst.channel * x_hat).norm();
  return out;
}

BoxRelaxResult box_relax_detect(const Instance& inst) {
  const int n = inst.n;
  const Eigen::MatrixXd gram = inst.channel.transpose() * inst.channel;
  const Eigen::VectorXd lin = inst.channel.transpose() * inst.y;

  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
  double lmax = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd w = gram.selfadjointView<Eigen::Lower>() * v;
    const double lam = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) break;  // channel is identically zero; any step works
    v = w / nw;
    if (it > 0 && std::abs(lam - lmax) <= 1e-10 * std::abs(lam)) {
      lmax = lam;
      break;
    }
    lmax = lam;
  }
  const double step = lmax > 0.0 ? 1.0 / lmax : 1.0;

  BoxRelaxResult res;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad(n);
  const int max_iters = 100000;
  int it = 0;
  for (; it < max_iters; ++it) {
    grad.noalias() = gram.selfadjointView<Eigen::Lower>() * x;
    grad -= lin;
    double viol_sq = 0.0;
    for (int j = 0; j < n; ++j) {
      double vj;
      if (x[j] >= 1.0)
        vj = std::max(grad[j], 0.0);
      else if (x[j] <= -1.0)
        vj = std::max(-grad[j], 0.0);
      else
        vj = std::abs(grad[j]);
      viol_sq += vj * vj;
    }
    if (std::sqrt(viol_sq) <= 1e-10) {
      res.converged = true;
      break;
    }
    x = (x - step * grad).cwiseMax(-1.0).cwiseMin(1.0);
  }
  res.iters = it;
  res.relaxed = x;
  res.relaxed_objective = (inst.y - inst.channel * x).norm();
  Eigen::VectorXd x_hat(n);
  for (int j = 0; j < n; ++j) x_hat[j] = x[j] >= 0.0 ? 1.0 : -1.0;
  res.detection = ber_of(x_hat, inst.x0);
  res.detection.objective = (inst.y - inst.channel * x_hat).norm();
  return res;
}

MfGenieResult mf_genie_detect(const Instance& inst, int bit_index) {
  if (bit_index < 0 || bit_index >= inst.n)
    throw std::invalid_argument("bit_index out of range");
  const double sigma = std::sqrt(inst.sigma2);
  const double x0j = inst.x0[bit_index];
  // Index-ordered accumulation; the reduced-resampling path in the Monte
  // Carlo driver reproduces this arithmetic bit for bit.
  double s = 0.0;
  for (int i = 0; i < inst.m; ++i) {
    const double a = inst.channel(i, bit_index);
    s += a * (x0j * a + sigma * inst.noise[i]);
  }
  MfGenieResult res;
  res.statistic = s;
  const double decided = s >= 0.0 ? 1.0 : -1.0;
  res.correct = decided == x0j;
  return res;
}

double shell_min_cost(const Instance& inst, int k) {
  check_shell_budget(inst);
  if (k < 0 || k > inst.n)
    throw std::invalid_argument("shell distance must lie in [0, n]");
  // Residual against the flipped-on-S codeword: sigma*z + sum_{i in S} twice
  // the truth-aligned column.
  Eigen::MatrixXd flip_cols = inst.channel;
  for (int j = 0; j < inst.n; ++j) flip_cols.col(j) *= 2.0 * inst.x0[j];
  Eigen::VectorXd r = inst.y - inst.channel * inst.x0;
  for (int j = 0; j < k; ++j) r += flip_cols.col(j);
  double best = r.squaredNorm();
  for (const auto& [out, in] : revolving_door_transitions(inst.n, k)) {
    r -= flip_cols.col(out);
    r += flip_cols.col(in);
    best = std::min(best, r.squaredNorm());
  }
  return std::sqrt(best) / std::sqrt(double(inst.n));
}

std::vector<double> shell_min_curve(const Instance& inst) {
  check_shell_budget(inst);
  const int n = inst.n;
  // Reorient so the all-plus codeword is the truth; distance is then the
  // popcount of the sweep mask.
  Instance aligned = inst;
  for (int j = 0; j < n; ++j)
    if (inst.x0[j] < 0.0) aligned.channel.col(j) *= -1.0;
  aligned.x0 = Eigen::VectorXd::Ones(n);
  std::vector<double> best(std::size_t(n) + 1,
                           std::numeric_limits<double>::infinity());
  sweep_codewords(aligned, [&](std::uint32_t g, int, double sq) {
    const int k = std::popcount(g);
    best[std::size_t(k)] = std::min(best[std::size_t(k)], sq);
  });
  const double root_n = std::sqrt(double(n));
  for (double& b : best) b = std::sqrt(b) / root_n;
  return best;
}

}  // namespace berlab

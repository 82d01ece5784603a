#include "berlab/scalar_math.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace berlab {

double phi(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("phi: non-finite argument");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double q_tail(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("q_tail: non-finite argument");
  return 0.5 * std::erfc(x * kInvSqrt2);
}

namespace {

// Lower-tail normal quantile, Acklam's rational approximation.
// Relative error < 1.2e-9 over (0, 0.5]; used only as a Newton starting point.
double quantile_guess(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("q_inv: p must lie in (0,1)");
  }
  if (p == 0.5) return 0.0;
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;  // pp in (0, 0.5), root is positive
  double x = -quantile_guess(pp);

  // Bracket the root; q_tail is decreasing, so f(lo) > 0 > f(hi).
  double w = 1e-6 * (1.0 + x);
  double lo = x - w;
  double hi = x + w;
  for (int i = 0; i < 64 && q_tail(lo) < pp; ++i) {
    hi = lo;
    w *= 8.0;
    lo = x - w;
  }
  for (int i = 0; i < 64 && q_tail(hi) > pp; ++i) {
    lo = hi;
    w *= 8.0;
    hi = x + w;
  }
  if (x <= lo || x >= hi) x = 0.5 * (lo + hi);

  for (int it = 0; it < 100; ++it) {
    const double f = q_tail(x) - pp;
    if (std::abs(f) <= 1e-14 * pp) break;
    if (f > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double den = phi(x);
    double xn;
    if (den > 0.0) {
      xn = x + f / den;
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    } else {
      xn = 0.5 * (lo + hi);
    }
    const double dx = std::abs(xn - x);
    x = xn;
    if (dx <= 1e-13) break;
  }
  return flip ? -x : x;
}

namespace {

// Nodes and weights from the symmetric tridiagonal Jacobi matrix of an
// orthogonal-polynomial recurrence (Golub-Welsch). total_mass is the integral
// of the weight function; weights come out as total_mass * (first eigenvector
// component)^2.
void golub_welsch(const Eigen::VectorXd& subdiag, double total_mass,
                  std::vector<double>* nodes, std::vector<double>* weights) {
  const int n = static_cast<int>(subdiag.size()) + 1;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag,
                                Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("golub_welsch: eigensolver failed");
  }
  nodes->resize(n);
  weights->resize(n);
  for (int i = 0; i < n; ++i) {
    (*nodes)[i] = solver.eigenvalues()[i];
    const double v0 = solver.eigenvectors()(0, i);
    (*weights)[i] = total_mass * v0 * v0;
  }
}

}  // namespace

QuadratureRule gauss_hermite_rule(int order) {
  if (order < 1 || order > 5000) {
    throw std::invalid_argument("gauss_hermite_rule: order out of range [1, 5000]");
  }
  QuadratureRule rule;
  if (order == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }
  // Probabilists' Hermite recurrence: He_{k+1} = x He_k - k He_{k-1}.
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  golub_welsch(sub, 1.0, &rule.nodes, &rule.weights);
  return rule;
}

QuadratureRule composite_normal_rule(double half_range, int panels,
                                     int points_per_panel) {
  if (!(half_range >= 8.0) || panels < 1 || panels > 1000000 ||
      points_per_panel < 2 || points_per_panel > 64) {
    throw std::invalid_argument("composite_normal_rule: bad configuration");
  }
  // Legendre recurrence on [-1,1]: b_k = k / sqrt(4k^2 - 1), mass 2.
  std::vector<double> leg_nodes, leg_weights;
  Eigen::VectorXd sub(points_per_panel - 1);
  for (int k = 1; k < points_per_panel; ++k) {
    sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  }
  golub_welsch(sub, 2.0, &leg_nodes, &leg_weights);

  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * points_per_panel);
  rule.weights.reserve(static_cast<std::size_t>(panels) * points_per_panel);
  const double width = 2.0 * half_range / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = -half_range + p * width;
    const double mid = a + 0.5 * width;
    for (int i = 0; i < points_per_panel; ++i) {
      const double x = mid + 0.5 * width * leg_nodes[i];
      rule.nodes.push_back(x);
      rule.weights.push_back(0.5 * width * leg_weights[i] * phi(x));
    }
  }
  return rule;
}

}  // namespace berlab

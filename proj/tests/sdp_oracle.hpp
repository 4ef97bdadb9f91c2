#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>

#include "specinf/model.hpp"

namespace testutil {

// Golden-section search for the maximum of a unimodal function on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, double* arg = nullptr,
                         int iters = 120) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters; ++k) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (a + b);
  if (arg) *arg = x;
  return f(x);
}

inline double lambda_max_3x3(const specinf::Matrix& m) {
  Eigen::Matrix3d f = m;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(f, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Optimal trace of max Tr(D) s.t. A + D <= 0 for a 3x3 A. The top-left block is
// parameterized by p = -(A11 + d1), q = -(A22 + d2) with pq > A12^2, so it is
// negative definite; the largest feasible d3 is then found by bisection on
// lambda_max (monotone in d3). The objective is jointly concave in (p, q), so
// nested golden-section search converges to the optimum.
inline double sdp_trace_3x3(const specinf::Matrix& a) {
  const double a12 = a(0, 1);
  const double span = 10.0 * (a.norm() + 1.0);
  auto value = [&](double p, double q) -> double {
    specinf::Matrix m = a;
    m(0, 0) = -p;
    m(1, 1) = -q;
    double hi = 0.0, lo = -1.0;
    m(2, 2) = lo;
    while (lambda_max_3x3(m) > 0.0) {
      lo *= 2.0;
      if (lo < -1e9) return -1e9;
      m(2, 2) = lo;
    }
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      m(2, 2) = mid;
      (lambda_max_3x3(m) > 0.0 ? hi : lo) = mid;
    }
    const double d3 = lo - a(2, 2);
    return (-a(0, 0) - p) + (-a(1, 1) - q) + d3;
  };
  auto outer = [&](double p) {
    const double q_lo = a12 * a12 / p;
    return golden_max([&](double q) { return value(p, q); }, q_lo, q_lo + span, nullptr, 60);
  };
  return golden_max(outer, 0.0, span, nullptr, 60);
}

// -3 min over zero-sum u of lambda_max(A + Diag(u)) for a 3x3 A.
inline double eigmin_trace_3x3(const specinf::Matrix& a) {
  const double span = 10.0 * (a.norm() + 1.0);
  auto g = [&](double u1, double u2) {
    specinf::Matrix m = a;
    m(0, 0) += u1;
    m(1, 1) += u2;
    m(2, 2) -= u1 + u2;
    return Eigen::SelfAdjointEigenSolver<specinf::Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  };
  auto outer = [&](double u1) { return golden_max([&](double u2) { return -g(u1, u2); }, -span, span); };
  return 3.0 * golden_max(outer, -span, span);
}

}  // namespace testutil

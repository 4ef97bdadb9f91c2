#include "specinf/diagshift.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specinf/errors.hpp"
#include "specinf/rng.hpp"

namespace specinf {

namespace {

void require_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("matrix must be square");
  if (!a.allFinite()) throw InvalidArgument("matrix must be finite");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    throw InvalidArgument("matrix must be symmetric");
}

LeadingEigenpair dense_leading(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalFailure("leading eigenpair: solver failed");
  const int last = static_cast<int>(m.rows()) - 1;
  return {solver.eigenvalues()[last], solver.eigenvectors().col(last), 0};
}

}  // namespace

LeadingEigenpair leading_eigenpair(const Matrix& m, const Vector* warm, int max_power_iters) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) throw DimensionMismatch("empty matrix");
  if (n <= 48 || max_power_iters <= 0) return dense_leading(m);

  // Gershgorin: every eigenvalue is >= min_i (m_ii - sum_{j != i} |m_ij|).
  const Vector radii = m.cwiseAbs().rowwise().sum() - m.diagonal().cwiseAbs();
  const double sigma = (m.diagonal() - radii).minCoeff();
  const double scale = std::max(1.0, m.norm());

  Vector v = (warm != nullptr && warm->size() == n && warm->norm() > 0) ? Vector(*warm)
                                                                        : Vector::Ones(n);
  v.normalize();
  Vector mv(n);
  for (int it = 1; it <= max_power_iters; ++it) {
    mv.noalias() = m * v;
    const double rho = v.dot(mv);
    const double residual = (mv - rho * v).norm();
    if (residual <= 1e-10 * scale) return {rho, v, it};
    v = mv - sigma * v;
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    v /= norm;
  }
  LeadingEigenpair dense = dense_leading(m);
  dense.iterations = max_power_iters;
  return dense;
}

double lambda_max(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("lambda_max: solver failed");
  return solver.eigenvalues()[m.rows() - 1];
}

SdpSolution solve_diagonal_shift(const Matrix& a, const SdpOptions& options) {
  require_symmetric(a);
  const int n = static_cast<int>(a.rows());
  if (n == 0) throw DimensionMismatch("empty matrix");
  const double scale = std::max(1.0, a.norm());
  const double improve_tol = options.improvement_tol * scale;

  // Start from the shift that zeroes the diagonal, projected to sum u = 0.
  Vector u = -a.diagonal();
  u.array() -= u.mean();
  Matrix m = a;
  m.diagonal() += u;

  LeadingEigenpair top = leading_eigenpair(m);
  double best = top.value;
  Vector best_u = u;
  // Target-level gap: the step aims at best - delta; delta shrinks when progress stalls.
  double delta = 0.1 * std::max(1.0, std::abs(best));
  const double alpha0 = a.norm() / n;
  double window_start = best;

  SdpSolution sol;
  int it = 0;
  bool converged = false;
  for (it = 1; it <= options.max_iters; ++it) {
    Vector s = top.vector.array().square() - 1.0 / n;
    const double s2 = s.squaredNorm();
    if (s2 <= 1e-28) {
      converged = true;  // v_i^2 = 1/n: zero is a subgradient
      break;
    }
    double step = (top.value - (best - delta)) / s2;
    if (!(step > 0.0) || !std::isfinite(step)) step = std::max(alpha0, 1e-12) / std::sqrt(it);
    u -= step * s;
    u.array() -= u.mean();
    m.diagonal() = a.diagonal() + u;
    top = leading_eigenpair(m, &top.vector);
    if (top.value < best) {
      best = top.value;
      best_u = u;
    }
    if (it % (options.patience / 2 > 0 ? options.patience / 2 : 1) == 0) {
      const double gained = window_start - best;
      if (gained < 0.5 * delta) delta *= 0.5;
      if (it % options.patience == 0 && gained < improve_tol && delta < improve_tol) {
        converged = true;
        break;
      }
      window_start = best;
    }
  }
  sol.iterations = std::min(it, options.max_iters);
  sol.converged = converged;

  Matrix shifted = a;
  shifted.diagonal() += best_u;
  sol.objective = lambda_max(shifted);
  sol.u = best_u;
  sol.d = best_u.array() - sol.objective;
  shifted.diagonal() = a.diagonal() + sol.d;
  double cert = lambda_max(shifted);
  if (cert > 0.0) {
    sol.d.array() -= cert;
    shifted.diagonal() = a.diagonal() + sol.d;
    cert = lambda_max(shifted);
  }
  sol.lambda_max_cert = cert;
  sol.trace = sol.d.sum();
  const double feas_tol = options.feasibility_tol * scale;
  if (!(cert <= feas_tol)) throw NumericalFailure("diagonal shift could not be made feasible");
  return sol;
}

Vector baseline_shift_max_eig(const Matrix& a) {
  require_symmetric(a);
  return Vector::Constant(a.rows(), -lambda_max(a));
}

Vector baseline_shift_diag_dominant(const Matrix& a) {
  require_symmetric(a);
  return -a.cwiseAbs().rowwise().sum();
}

FeasibilityReport verify_feasibility(const Matrix& a, const Vector& d, int samples,
                                     std::uint64_t seed) {
  require_symmetric(a);
  if (d.size() != a.rows()) throw DimensionMismatch("shift length mismatch");
  const int n = static_cast<int>(a.rows());
  const double scale = std::max(1.0, a.norm());
  FeasibilityReport rep;
  Matrix shifted = a;
  shifted.diagonal() += d;
  rep.lambda_max = lambda_max(shifted);
  rep.tolerance = 1e-6 * scale;
  rep.feasible = rep.lambda_max <= rep.tolerance;
  rep.trace = d.sum();
  rep.samples = samples;
  rep.dual_bound = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  Vector x(n);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) x[i] = (rng.next_u64() >> 63) ? 1.0 : -1.0;
    const double dual = -x.dot(a * x);
    rep.dual_bound = std::min(rep.dual_bound, dual);
    if (rep.trace > dual + rep.tolerance) ++rep.dual_violations;
  }
  return rep;
}

}  // namespace specinf

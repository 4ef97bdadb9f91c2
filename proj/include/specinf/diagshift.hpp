#pragma once

#include <cstdint>

#include "specinf/model.hpp"

namespace specinf {

struct LeadingEigenpair {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
};

/// Largest eigenpair of a symmetric matrix. Shifted power iteration on
/// M - sigma I (sigma a Gershgorin lower bound) from `warm` when given; falls
/// back to a dense solve when the Rayleigh residual does not reach 1e-10 scale.
LeadingEigenpair leading_eigenpair(const Matrix& m, const Vector* warm = nullptr,
                                   int max_power_iters = 300);

double lambda_max(const Matrix& m);

struct SdpOptions {
  int max_iters = 2000;
  int patience = 100;                // window for the improvement test
  double improvement_tol = 1e-8;     // relative to max(1, |A|_F)
  double feasibility_tol = 1e-6;     // relative to max(1, |A|_F)
};

/// Solution of max Tr(D) subject to A + D <= 0 (negative semidefinite).
struct SdpSolution {
  Vector d;
  double trace = 0.0;
  double lambda_max_cert = 0.0;  // lambda_max(A + Diag(d))
  int iterations = 0;
  bool converged = false;
  Vector u;                      // best zero-sum iterate
  double objective = 0.0;        // g(u) = lambda_max(A + Diag(u))
};

/// Uses max{Tr D : A + D <= 0} = -n min{lambda_max(A + Diag(u)) : sum u = 0},
/// with d = u* - g(u*) 1, minimized by projected subgradient with Polyak
/// target-level steps. The result is shifted down by max(cert, 0) so it is
/// always feasible.
SdpSolution solve_diagonal_shift(const Matrix& a, const SdpOptions& options = {});

/// d = -lambda_max(A) 1.
Vector baseline_shift_max_eig(const Matrix& a);

/// d_i = -sum_j |A_ij| (including j = i).
Vector baseline_shift_diag_dominant(const Matrix& a);

struct FeasibilityReport {
  double lambda_max = 0.0;
  double tolerance = 0.0;
  bool feasible = false;
  int samples = 0;
  int dual_violations = 0;  // sign vectors with sum(d) > -x^T A x + tolerance
  double dual_bound = 0.0;  // min over samples of -x^T A x
  double trace = 0.0;
};

/// Weak-duality audit: every x x^T with x a sign vector is dual feasible, so
/// sum(d) <= -x^T A x for any feasible d.
FeasibilityReport verify_feasibility(const Matrix& a, const Vector& d, int samples = 1000,
                                     std::uint64_t seed = 0);

}  // namespace specinf

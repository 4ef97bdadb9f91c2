#pragma once

#include "specinf/model.hpp"

namespace specinf {

/// Eigenpairs of a symmetric n x n matrix, sorted by descending signed
/// eigenvalue. Column j of `eigenvectors` pairs with eigenvalues[j].
/// After truncation only the retained pairs are stored, so
/// retained == eigenvalues.size() always; n keeps the ambient dimension.
struct Spectrum {
  int n = 0;
  Vector eigenvalues;
  Matrix eigenvectors;  // n x retained
  int retained = 0;

  double lambda(int j) const { return eigenvalues[j]; }
  auto vector(int j) const { return eigenvectors.col(j); }
};

/// Builds a spectrum from explicit pairs (sorted on entry). Vectors must be n-dimensional.
Spectrum make_spectrum(Vector eigenvalues, Matrix eigenvectors);

/// Full dense decomposition A = sum_j lambda_j v_j v_j^T.
Spectrum eig_sym(const Matrix& a);

/// Keeps the pairs with |lambda_j| > rel_tol * max_k |lambda_k|.
Spectrum truncate_rank(const Spectrum& s, double rel_tol = 1e-9);

/// sum_j lambda_j v_j v_j^T over the stored pairs.
Matrix reconstruct(const Spectrum& s);

}  // namespace specinf

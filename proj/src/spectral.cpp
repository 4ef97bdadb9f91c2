#include "specinf/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "specinf/errors.hpp"

namespace specinf {

namespace {

Spectrum sorted_descending(const Vector& values, const Matrix& vectors, int n) {
  const int m = static_cast<int>(values.size());
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
  Spectrum s;
  s.n = n;
  s.eigenvalues.resize(m);
  s.eigenvectors.resize(n, m);
  for (int j = 0; j < m; ++j) {
    s.eigenvalues[j] = values[order[j]];
    s.eigenvectors.col(j) = vectors.col(order[j]);
  }
  s.retained = m;
  return s;
}

}  // namespace

Spectrum make_spectrum(Vector eigenvalues, Matrix eigenvectors) {
  if (eigenvectors.cols() != eigenvalues.size())
    throw DimensionMismatch("eigenvector count does not match eigenvalue count");
  if (!eigenvalues.allFinite() || !eigenvectors.allFinite())
    throw InvalidArgument("spectrum entries must be finite");
  return sorted_descending(eigenvalues, eigenvectors, static_cast<int>(eigenvectors.rows()));
}

Spectrum eig_sym(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("eig_sym needs a square matrix");
  if (!a.allFinite()) throw InvalidArgument("eig_sym input must be finite");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Spectrum{};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("symmetric eigensolver did not converge");
  }
  Spectrum s = sorted_descending(solver.eigenvalues(), solver.eigenvectors(), n);
  const double scale = std::max(1.0, a.norm());
  const double residual = (a * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal())
                              .colwise()
                              .norm()
                              .maxCoeff();
  if (!(residual <= 1e-8 * scale)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "eigendecomposition residual %.3e exceeds %.3e", residual,
                  1e-8 * scale);
    throw NumericalFailure(buf);
  }
  return s;
}

Spectrum truncate_rank(const Spectrum& s, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("rel_tol must lie in (0, 1)");
  const double top = s.eigenvalues.size() ? s.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  std::vector<int> keep;
  for (int j = 0; j < s.eigenvalues.size(); ++j)
    if (std::abs(s.eigenvalues[j]) > rel_tol * top) keep.push_back(j);
  Spectrum out;
  out.n = s.n;
  out.eigenvalues.resize(static_cast<int>(keep.size()));
  out.eigenvectors.resize(s.n, static_cast<int>(keep.size()));
  for (int k = 0; k < static_cast<int>(keep.size()); ++k) {
    out.eigenvalues[k] = s.eigenvalues[keep[k]];
    out.eigenvectors.col(k) = s.eigenvectors.col(keep[k]);
  }
  out.retained = static_cast<int>(keep.size());
  return out;
}

Matrix reconstruct(const Spectrum& s) {
  return s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
}

}  // namespace specinf

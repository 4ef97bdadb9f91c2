#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "specinf/model.hpp"
#include "specinf/rng.hpp"

namespace testutil {

using specinf::Matrix;
using specinf::Vector;

// Plain enumeration of every state with the energy recomputed from scratch.
inline double brute_log_z(const Vector& theta, const Matrix& a, double offset = 0.0) {
  const int n = static_cast<int>(theta.size());
  std::vector<double> e(std::size_t{1} << n);
  Vector x(n);
  for (std::size_t s = 0; s < e.size(); ++s) {
    for (int i = 0; i < n; ++i) x[i] = (s >> i) & 1 ? 1.0 : -1.0;
    e[s] = theta.dot(x) + x.dot(a * x);
  }
  const double m = *std::max_element(e.begin(), e.end());
  double acc = 0.0;
  for (double v : e) acc += std::exp(v - m);
  return offset + m + std::log(acc);
}

inline double brute_log_z(const specinf::GraphicalModel& m) {
  return brute_log_z(m.theta(), m.coupling(), m.log_offset());
}

inline Matrix random_symmetric(specinf::Rng& rng, int n, double scale) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(-scale, scale);
  return a;
}

inline Vector random_vector(specinf::Rng& rng, int n, double lo, double hi) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

inline specinf::GraphicalModel random_model(specinf::Rng& rng, int n, double scale, bool fields = true) {
  Vector theta = fields ? random_vector(rng, n, -1.0, 1.0) : Vector::Zero(n);
  return specinf::GraphicalModel(theta, random_symmetric(rng, n, scale), rng.uniform(-1.0, 1.0));
}

// r orthonormal columns by Gram-Schmidt on Gaussian draws.
inline Matrix random_orthonormal(specinf::Rng& rng, int n, int r) {
  Matrix q(n, r);
  for (int j = 0; j < r; ++j) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    for (int k = 0; k < j; ++k) v -= q.col(k).dot(v) * q.col(k);
    q.col(j) = v.normalized();
  }
  return q;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testutil

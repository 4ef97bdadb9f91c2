#include <cmath>
#include <string>

#include "specinf/errors.hpp"
#include "specinf/modelio.hpp"
#include "specinf/rng.hpp"

namespace specinf {

Family parse_family(std::string_view name) {
  if (name == "er") return Family::er;
  if (name == "complete") return Family::complete;
  if (name == "complete-bipartite" || name == "bipartite") return Family::complete_bipartite;
  if (name == "grid") return Family::grid;
  if (name == "rank1") return Family::rank1;
  throw InvalidArgument("unknown family '" + std::string(name) + "'");
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::er: return "er";
    case Family::complete: return "complete";
    case Family::complete_bipartite: return "complete-bipartite";
    case Family::grid: return "grid";
    case Family::rank1: return "rank1";
  }
  return "unknown";
}

std::pair<int, int> grid_shape(int n) {
  int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  while ((rows + 1) * (rows + 1) <= n) ++rows;
  while (rows * rows > n) --rows;
  rows = std::max(rows, 1);
  const int cols = (n + rows - 1) / rows;
  return {rows, cols};
}

GraphicalModel generate(const GeneratorSpec& spec) {
  const int n = spec.n;
  if (n < 1) throw InvalidArgument("generator needs n >= 1");
  if (!(spec.s > 0.0) || !std::isfinite(spec.s)) throw InvalidArgument("coupling strength s must be positive");
  if (spec.p && !(*spec.p >= 0.0 && *spec.p <= 1.0)) throw InvalidArgument("edge probability p must lie in [0, 1]");
  if (spec.family == Family::er && !spec.p) throw InvalidArgument("er family needs an edge probability p");
  if (spec.sign && *spec.sign != 1 && *spec.sign != -1) throw InvalidArgument("sign must be +1 or -1");
  if (spec.family == Family::rank1 && n < 2) throw InvalidArgument("rank1 family needs n >= 2");

  Rng rng(spec.seed);
  Vector theta(n);
  for (int i = 0; i < n; ++i) theta[i] = rng.uniform(-1.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  auto couple = [&](int i, int j) {
    const double w = rng.uniform(-spec.s, spec.s);
    a(i, j) = w;
    a(j, i) = w;
  };

  switch (spec.family) {
    case Family::er:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (rng.bernoulli(*spec.p)) couple(i, j);
      break;
    case Family::complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) couple(i, j);
      break;
    case Family::complete_bipartite: {
      const int half = n / 2;
      for (int i = 0; i < half; ++i)
        for (int j = half; j < n; ++j) couple(i, j);
      break;
    }
    case Family::grid: {
      const auto [rows, cols] = grid_shape(n);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          const int v = r * cols + c;
          if (v >= n) continue;
          if (c + 1 < cols && v + 1 < n) couple(v, v + 1);
          if (v + cols < n) couple(v, v + cols);
        }
      break;
    }
    case Family::rank1: {
      Vector v(n);
      for (int i = 0; i < n; ++i) v[i] = rng.normal();
      v.normalize();
      const int sign = spec.sign ? *spec.sign : ((rng.next_u64() >> 63) ? 1 : -1);
      const double l1 = v.cwiseAbs().sum();
      const double offdiag_mass = l1 * l1 - v.squaredNorm();  // sum_{i != j} |v_i v_j|
      const double pairs = spec.normalization == Rank1Normalization::n_plus_one ? n * (n + 1.0) : n * (n - 1.0);
      const double lambda = sign * spec.s * pairs / offdiag_mass;
      a = lambda * v * v.transpose();
      a = 0.5 * (a + a.transpose());
      break;
    }
  }
  return GraphicalModel(std::move(theta), std::move(a));
}

}  // namespace specinf

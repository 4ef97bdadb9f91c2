#include "specinf/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "specinf/errors.hpp"
#include "specinf/logspace.hpp"
#include "specinf/parallel.hpp"

namespace specinf {

GraphicalModel::GraphicalModel(Vector theta, Matrix coupling, double log_offset)
    : theta_(std::move(theta)), log_offset_(log_offset) {
  const auto n = theta_.size();
  if (n == 0) throw InvalidArgument("graphical model needs at least one variable");
  if (coupling.rows() != n || coupling.cols() != n)
    throw DimensionMismatch("coupling matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!theta_.allFinite() || !coupling.allFinite() || !std::isfinite(log_offset))
    throw InvalidArgument("graphical model parameters must be finite");
  asymmetry_ = 0.5 * (coupling - coupling.transpose()).cwiseAbs().maxCoeff();
  coupling_ = 0.5 * (coupling + coupling.transpose());
}

GraphicalModel GraphicalModel::fields_only(Vector theta, double log_offset) {
  const auto n = theta.size();
  return GraphicalModel(std::move(theta), Matrix::Zero(n, n), log_offset);
}

bool GraphicalModel::has_fields() const noexcept { return theta_.cwiseAbs().maxCoeff() > 0.0; }

double energy(const GraphicalModel& model, std::span<const int> x) {
  const int n = model.size();
  if (static_cast<int>(x.size()) != n)
    throw DimensionMismatch("state has " + std::to_string(x.size()) + " entries, model has " +
                            std::to_string(n));
  Vector s(n);
  for (int i = 0; i < n; ++i) {
    if (x[i] != 1 && x[i] != -1)
      throw InvalidArgument("state entry " + std::to_string(i) + " is not a sign");
    s[i] = x[i];
  }
  return model.theta().dot(s) + s.dot(model.coupling() * s);
}

namespace {

// Enumerates the 2^low states of the low bits with the high bits fixed by
// `prefix`, in Gray-code order with O(n) incremental updates.
LogSumExp enumerate_block(const GraphicalModel& model, int low, std::uint64_t prefix) {
  const int n = model.size();
  const Matrix& a = model.coupling();
  const Vector& theta = model.theta();
  Vector x(n);
  for (int i = 0; i < n; ++i)
    x[i] = (i >= low && ((prefix >> (i - low)) & 1u)) ? 1.0 : -1.0;
  Vector field = a * x;
  double e = theta.dot(x) + x.dot(field);

  LogSumExp acc;
  acc.push(e);
  const std::uint64_t states = std::uint64_t{1} << low;
  for (std::uint64_t g = 1; g < states; ++g) {
    const int i = std::countr_zero(g);
    const double s = x[i];
    e += -2.0 * s * theta[i] - 4.0 * s * (field[i] - a(i, i) * s);
    field.noalias() -= (2.0 * s) * a.col(i);
    x[i] = -s;
    acc.push(e);
  }
  return acc;
}

}  // namespace

LogZEstimate exact_log_z(const GraphicalModel& model, const ExactOptions& options) {
  const int n = model.size();
  if (n > options.cap || n > 62)
    throw BudgetExceeded("exact enumeration of " + std::to_string(n) +
                         " variables exceeds the oracle cap of " +
                         std::to_string(std::min(options.cap, 62)));
  // The split depends only on n so the reduction order is fixed.
  const int high = n >= 16 ? 6 : 0;
  const int low = n - high;
  const std::size_t blocks = std::size_t{1} << high;
  std::vector<LogSumExp> partial(blocks);
  parallel_for(blocks, options.threads,
               [&](std::size_t b) { partial[b] = enumerate_block(model, low, b); });
  LogSumExp total;
  for (const auto& p : partial) total.merge(p);

  LogZEstimate est;
  est.method = Method::exact;
  est.log_z = model.log_offset() + total.value();
  est.a_priori_bound = 0.0;
  est.diagnostics.set("states", static_cast<long long>(std::uint64_t{1} << n));
  return est;
}

GraphicalModel shift_diagonal(const GraphicalModel& model, const Vector& d) {
  if (d.size() != model.size())
    throw DimensionMismatch("diagonal shift has " + std::to_string(d.size()) +
                            " entries, model has " + std::to_string(model.size()));
  if (!d.allFinite()) throw InvalidArgument("diagonal shift must be finite");
  Matrix a = model.coupling();
  a.diagonal() += d;
  return GraphicalModel(model.theta(), std::move(a), model.log_offset() - d.sum());
}

GraphicalModel absorb_fields(const GraphicalModel& model) {
  const int n = model.size();
  Matrix a = Matrix::Zero(n + 1, n + 1);
  a.topLeftCorner(n, n) = model.coupling();
  a.col(n).head(n) = 0.5 * model.theta();
  a.row(n).head(n) = 0.5 * model.theta().transpose();
  return GraphicalModel(Vector::Zero(n + 1), std::move(a), model.log_offset() - kLog2);
}

GraphicalModel permute(const GraphicalModel& model, std::span<const int> perm) {
  const int n = model.size();
  if (static_cast<int>(perm.size()) != n) throw DimensionMismatch("permutation length mismatch");
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) throw InvalidArgument("not a permutation");
    seen[p] = true;
  }
  Vector theta(n);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    theta[i] = model.theta()[perm[i]];
    for (int j = 0; j < n; ++j) a(i, j) = model.coupling()(perm[i], perm[j]);
  }
  return GraphicalModel(std::move(theta), std::move(a), model.log_offset());
}

}  // namespace specinf

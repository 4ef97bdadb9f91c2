#include "specinf/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "specinf/errors.hpp"
#include "specinf/logspace.hpp"

namespace specinf {

namespace {

std::int64_t round_even(double v) {
  const double r = std::nearbyint(v);
  if (!std::isfinite(r) || std::abs(r) > 4.0e18)
    throw NumericalFailure("quantized value out of integer range; grid spacing too small");
  return static_cast<std::int64_t>(r);
}

std::string budget_message(const QuantConfig& q, double box, std::size_t budget) {
  double bound = std::pow(2.0, q.r);
  for (double lam : q.lambdas) bound *= std::sqrt(std::abs(lam) * q.n) / q.c + q.n / 2.0 + 1.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "bucket table of %.4g entries exceeds budget %zu (rank %d, c = %.4g; "
                "bucket bound %.4g); increase c or the budget",
                box, budget, q.r, q.c, bound);
  return buf;
}

void check_theta(const Vector& theta, const QuantConfig& q) {
  if (theta.size() != q.n)
    throw DimensionMismatch("theta has " + std::to_string(theta.size()) +
                            " entries, spectrum dimension is " + std::to_string(q.n));
}

}  // namespace

double QuantConfig::box_size() const {
  double box = 1.0;
  for (auto b : bound) box *= static_cast<double>(2 * b + 1);
  return box;
}

QuantConfig quantization_config(const Spectrum& spectrum, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("quantization interval c must be positive");
  if (!spectrum.eigenvalues.allFinite() || !spectrum.eigenvectors.allFinite())
    throw InvalidArgument("spectrum must be finite");
  QuantConfig q;
  q.n = spectrum.n;
  q.c = c;
  std::vector<int> used;
  for (int j = 0; j < spectrum.eigenvalues.size(); ++j)
    if (spectrum.eigenvalues[j] != 0.0) used.push_back(j);
  q.r = static_cast<int>(used.size());
  q.u.resize(q.r, q.n);
  q.uhat.resize(static_cast<std::size_t>(q.r) * q.n);
  for (int jj = 0; jj < q.r; ++jj) {
    const int j = used[jj];
    const double lam = spectrum.eigenvalues[j];
    q.lambdas.push_back(lam);
    q.signs.push_back(lam > 0 ? 1 : -1);
    q.u.row(jj) = std::sqrt(std::abs(lam)) * spectrum.eigenvectors.col(j).transpose();
    for (int i = 0; i < q.n; ++i)
      q.uhat[static_cast<std::size_t>(jj) * q.n + i] = round_even(2.0 * q.u(jj, i) / c);
    const double l1 = q.u.row(jj).cwiseAbs().sum();
    const double b = std::ceil(l1 / c + (q.n + 1) / 2.0);
    if (!(b < 4.0e18)) throw NumericalFailure("bucket bound out of integer range");
    q.bound.push_back(static_cast<std::int64_t>(b));
    q.base.push_back(round_even(-q.u.row(jj).sum() / c));
  }
  return q;
}

BucketTable::BucketTable(std::vector<std::int64_t> bound) : bound_(std::move(bound)) {
  const int r = rank();
  strides_.assign(r, 1);
  std::size_t total = 1;
  for (int j = r - 1; j >= 0; --j) {
    strides_[j] = total;
    total *= static_cast<std::size_t>(2 * bound_[j] + 1);
  }
  values_.assign(total, kNegInf);
}

bool BucketTable::contains(std::span<const std::int64_t> k) const {
  if (static_cast<int>(k.size()) != rank()) return false;
  for (int j = 0; j < rank(); ++j)
    if (k[j] < -bound_[j] || k[j] > bound_[j]) return false;
  return true;
}

std::size_t BucketTable::linear_index(std::span<const std::int64_t> k) const {
  std::size_t idx = 0;
  for (int j = 0; j < rank(); ++j) idx += static_cast<std::size_t>(k[j] + bound_[j]) * strides_[j];
  return idx;
}

std::vector<std::int64_t> BucketTable::bucket(std::size_t linear) const {
  std::vector<std::int64_t> k(rank());
  for (int j = 0; j < rank(); ++j) {
    k[j] = static_cast<std::int64_t>(linear / strides_[j]) - bound_[j];
    linear %= strides_[j];
  }
  return k;
}

double BucketTable::log_t(std::span<const std::int64_t> k) const {
  return contains(k) ? values_[linear_index(k)] : kNegInf;
}

std::size_t BucketTable::reached() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return v != kNegInf; }));
}

BucketTable run_dp(const Vector& theta, const QuantConfig& q, const DpOptions& options) {
  check_theta(theta, q);
  const double box = q.box_size();
  if (box > static_cast<double>(options.bucket_budget))
    throw BudgetExceeded(budget_message(q, box, options.bucket_budget));

  const int r = q.r;
  BucketTable table(q.bound);
  std::vector<double>& cur = table.values();
  cur[table.linear_index(q.base)] = -theta.sum();
  if (r == 0) {
    // Every state lands in the single bucket: log t = sum_i log 2cosh theta_i.
    for (int i = 0; i < q.n; ++i) cur[0] = log_add_exp(cur[0], cur[0] + 2.0 * theta[i]);
    return table;
  }

  // Bounding box of reached buckets, in coordinates offset by +b_j.
  std::vector<std::int64_t> lo(r), hi(r), src_lo(r), dst_lo(r), dst_hi(r), shift(r);
  for (int j = 0; j < r; ++j) lo[j] = hi[j] = q.base[j] + q.bound[j];

  std::vector<double> next;
  std::vector<std::int64_t> idx(r);
  for (int i = 0; i < q.n; ++i) {
    const double w = 2.0 * theta[i];
    bool empty = false;
    std::ptrdiff_t offset = 0;
    for (int j = 0; j < r; ++j) {
      shift[j] = q.increment(j, i);
      const std::int64_t width = 2 * q.bound[j];
      dst_lo[j] = std::max<std::int64_t>(lo[j] + shift[j], 0);
      dst_hi[j] = std::min<std::int64_t>(hi[j] + shift[j], width);
      if (dst_lo[j] > dst_hi[j]) empty = true;
      offset += static_cast<std::ptrdiff_t>(shift[j]) * static_cast<std::ptrdiff_t>(table.stride(j));
    }
    if (empty) continue;  // every shifted bucket falls outside B

    next = cur;
    // Odometer over the destination box; the last axis is contiguous.
    for (int j = 0; j < r; ++j) idx[j] = dst_lo[j];
    const std::int64_t inner = dst_hi[r - 1] - dst_lo[r - 1] + 1;
    while (true) {
      std::size_t base_idx = 0;
      for (int j = 0; j < r; ++j) base_idx += static_cast<std::size_t>(idx[j]) * table.stride(j);
      double* out = next.data() + base_idx;
      const double* own = cur.data() + base_idx;
      const double* src = cur.data() + (static_cast<std::ptrdiff_t>(base_idx) - offset);
      for (std::int64_t t = 0; t < inner; ++t) {
        if (src[t] != kNegInf) out[t] = log_add_exp(own[t], src[t] + w);
      }
      int j = r - 2;
      while (j >= 0) {
        if (++idx[j] <= dst_hi[j]) break;
        idx[j] = dst_lo[j];
        --j;
      }
      if (j < 0) break;
    }
    cur.swap(next);
    for (int j = 0; j < r; ++j) {
      lo[j] = std::min(lo[j], dst_lo[j]);
      hi[j] = std::max(hi[j], dst_hi[j]);
    }
  }
  return table;
}

SparseBucketTable run_dp_sparse(const Vector& theta, const QuantConfig& q, const DpOptions& options) {
  check_theta(theta, q);
  const int r = q.r;
  SparseBucketTable table;
  table.r = r;
  table.keys = q.base;
  table.log_t = {-theta.sum()};

  auto less = [r](const std::int64_t* a, const std::int64_t* b) {
    for (int j = 0; j < r; ++j)
      if (a[j] != b[j]) return a[j] < b[j];
    return false;
  };
  auto in_box = [&](const std::int64_t* k) {
    for (int j = 0; j < r; ++j)
      if (k[j] < -q.bound[j] || k[j] > q.bound[j]) return false;
    return true;
  };

  std::vector<std::int64_t> shifted_keys, merged_keys;
  std::vector<double> shifted_vals, merged_vals;
  for (int i = 0; i < q.n; ++i) {
    const double w = 2.0 * theta[i];
    const std::size_t m = table.entries();
    shifted_keys.clear();
    shifted_vals.clear();
    // A constant shift preserves lexicographic order.
    for (std::size_t e = 0; e < m; ++e) {
      const std::int64_t* k = table.keys.data() + e * r;
      const std::size_t at = shifted_keys.size();
      for (int j = 0; j < r; ++j) shifted_keys.push_back(k[j] + q.increment(j, i));
      if (!in_box(shifted_keys.data() + at)) {
        shifted_keys.resize(at);
        continue;
      }
      shifted_vals.push_back(table.log_t[e] + w);
    }
    merged_keys.clear();
    merged_vals.clear();
    std::size_t a = 0, b = 0;
    const std::size_t nb = shifted_vals.size();
    while (a < m || b < nb) {
      const std::int64_t* ka = a < m ? table.keys.data() + a * r : nullptr;
      const std::int64_t* kb = b < nb ? shifted_keys.data() + b * r : nullptr;
      if (kb == nullptr || (ka != nullptr && less(ka, kb))) {
        merged_keys.insert(merged_keys.end(), ka, ka + r);
        merged_vals.push_back(table.log_t[a++]);
      } else if (ka == nullptr || less(kb, ka)) {
        merged_keys.insert(merged_keys.end(), kb, kb + r);
        merged_vals.push_back(shifted_vals[b++]);
      } else {
        merged_keys.insert(merged_keys.end(), ka, ka + r);
        merged_vals.push_back(log_add_exp(table.log_t[a++], shifted_vals[b++]));
      }
    }
    if (merged_vals.size() > options.bucket_budget) {
      throw BudgetExceeded("sparse " + budget_message(q, static_cast<double>(merged_vals.size()),
                                                      options.bucket_budget));
    }
    table.keys.swap(merged_keys);
    table.log_t.swap(merged_vals);
  }
  return table;
}

double bucket_count_bound(const Spectrum& spectrum, int n, double c) {
  double bound = 1.0;
  for (int j = 0; j < spectrum.eigenvalues.size(); ++j) {
    const double lam = spectrum.eigenvalues[j];
    if (lam == 0.0) continue;
    bound *= 2.0 * (std::sqrt(std::abs(lam) * n) / c + n / 2.0 + 1.0);
  }
  return bound;
}

double theorem_error_bound(const Spectrum& spectrum, int n, double c) {
  int r = 0;
  double root_sum = 0.0;
  for (int j = 0; j < spectrum.eigenvalues.size(); ++j) {
    const double lam = spectrum.eigenvalues[j];
    if (lam == 0.0) continue;
    ++r;
    root_sum += std::sqrt(std::abs(lam));
  }
  const double n1 = n + 1.0;
  return 0.25 * r * c * c * n1 * n1 + c * std::sqrt(static_cast<double>(n)) * n1 * root_sum;
}

double choose_c_for_epsilon(const Spectrum& spectrum, int n, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw InvalidArgument("epsilon must lie in (0, 1/2]");
  int r = 0;
  double root_sum = 0.0;
  for (int j = 0; j < spectrum.eigenvalues.size(); ++j) {
    const double lam = spectrum.eigenvalues[j];
    if (lam == 0.0) continue;
    ++r;
    root_sum += std::sqrt(std::abs(lam));
  }
  if (r == 0) throw InvalidArgument("spectrum has no nonzero eigenvalue; no quantization needed");
  const double n1 = n + 1.0;
  const double first = std::sqrt(epsilon / r) / n1;
  const double second = epsilon / (4.0 * root_sum * std::sqrt(static_cast<double>(n)) * n1);
  return std::min(first, second);
}

LogZEstimate estimate_log_z_lowrank(const Vector& theta, const Spectrum& spectrum, double c,
                                    const DpOptions& options) {
  const QuantConfig q = quantization_config(spectrum, c);
  check_theta(theta, q);
  const double box = q.box_size();
  const double reachable = std::ldexp(1.0, std::min(q.n, 1000));

  TableLayout layout = options.layout;
  if (layout == TableLayout::automatic)
    layout = (box > static_cast<double>(options.bucket_budget) || box > 16.0 * reachable)
                 ? TableLayout::sparse
                 : TableLayout::dense;

  auto weight = [&](std::span<const std::int64_t> k) {
    double s = 0.0;
    for (int j = 0; j < q.r; ++j) {
      const double ck = c * static_cast<double>(k[j]);
      s += q.signs[j] * ck * ck;
    }
    return s;
  };

  LogSumExp acc;
  std::size_t reached = 0;
  if (layout == TableLayout::dense) {
    const BucketTable table = run_dp(theta, q, options);
    const auto& vals = table.values();
    for (std::size_t idx = 0; idx < vals.size(); ++idx) {
      if (vals[idx] == kNegInf) continue;
      ++reached;
      acc.push(vals[idx] + weight(table.bucket(idx)));
    }
  } else {
    const SparseBucketTable table = run_dp_sparse(theta, q, options);
    reached = table.entries();
    for (std::size_t e = 0; e < table.entries(); ++e) acc.push(table.log_t[e] + weight(table.bucket(e)));
  }

  LogZEstimate est;
  est.method = Method::lowrank;
  est.log_z = acc.value();
  est.a_priori_bound = theorem_error_bound(spectrum, q.n, c);
  est.diagnostics.set("rank", q.r);
  est.diagnostics.set("c", c);
  est.diagnostics.set("buckets", box);
  est.diagnostics.set("reached", reached);
  est.diagnostics.set("table", std::string(layout == TableLayout::dense ? "dense" : "sparse"));
  return est;
}

double quantized_reference_log_z(const Vector& theta, const Spectrum& spectrum, double c, int cap) {
  const QuantConfig q = quantization_config(spectrum, c);
  check_theta(theta, q);
  if (q.n > cap || q.n > 30)
    throw BudgetExceeded("direct quantized evaluation of " + std::to_string(q.n) +
                         " variables exceeds cap " + std::to_string(std::min(cap, 30)));
  const int r = q.r;
  const std::size_t states = std::size_t{1} << q.n;
  // State bit i set <=> x_i = +1. The state with highest set bit i lies in
  // S_i \ S_{i-1}; its predecessor x' clears that bit.
  std::vector<std::int64_t> f(states * r);
  std::vector<double> field(states);
  for (int j = 0; j < r; ++j) f[j] = q.base[j];
  field[0] = -theta.sum();
  LogSumExp acc;
  for (std::size_t s = 0; s < states; ++s) {
    if (s > 0) {
      const int i = 63 - __builtin_clzll(static_cast<unsigned long long>(s));
      const std::size_t prev = s & ~(std::size_t{1} << i);
      for (int j = 0; j < r; ++j) f[s * r + j] = f[prev * r + j] + q.increment(j, i);
      field[s] = field[prev] + 2.0 * theta[i];
    }
    double w = field[s];
    for (int j = 0; j < r; ++j) {
      const double ck = c * static_cast<double>(f[s * r + j]);
      w += q.signs[j] * ck * ck;
    }
    acc.push(w);
  }
  return acc.value();
}

}  // namespace specinf

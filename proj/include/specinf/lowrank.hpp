#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "specinf/logz.hpp"
#include "specinf/model.hpp"
#include "specinf/spectral.hpp"

namespace specinf {

/// Quantization of the scaled eigenvectors u_j = sqrt|lambda_j| v_j on a grid of
/// spacing c. Zero eigenvalues are dropped, so r counts nonzero pairs only.
/// All roundings are to the nearest integer with ties to even.
struct QuantConfig {
  int n = 0;
  int r = 0;
  double c = 0.0;
  std::vector<double> lambdas;       // r retained eigenvalues
  Matrix u;                          // r x n, row j is u_j
  std::vector<int> signs;            // sign(lambda_j)
  std::vector<std::int64_t> uhat;    // r x n row-major: round(2 u_ji / c)
  std::vector<std::int64_t> bound;   // b_j = ceil(|u_j|_1 / c + (n + 1) / 2)
  std::vector<std::int64_t> base;    // l_j = round(-sum_i u_ji / c), bucket of (-1, ..., -1)

  std::int64_t increment(int j, int i) const { return uhat[static_cast<std::size_t>(j) * n + i]; }
  /// |B| = prod_j (2 b_j + 1), as a double because it can exceed 2^64.
  double box_size() const;
};

QuantConfig quantization_config(const Spectrum& spectrum, double c);

/// Dense log-domain table log t(k) over B = prod_j {-b_j, ..., b_j}; the last
/// coordinate varies fastest. Empty buckets hold -inf.
class BucketTable {
 public:
  explicit BucketTable(std::vector<std::int64_t> bound);

  int rank() const { return static_cast<int>(bound_.size()); }
  const std::vector<std::int64_t>& bound() const { return bound_; }
  std::size_t size() const { return values_.size(); }
  std::size_t stride(int j) const { return strides_[j]; }

  bool contains(std::span<const std::int64_t> k) const;
  std::size_t linear_index(std::span<const std::int64_t> k) const;
  std::vector<std::int64_t> bucket(std::size_t linear) const;
  /// -inf for k outside B.
  double log_t(std::span<const std::int64_t> k) const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  /// Number of buckets with finite log t.
  std::size_t reached() const;

 private:
  std::vector<std::int64_t> bound_;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
};

/// Reached buckets only, sorted lexicographically by k. Holds the same t(k) as
/// BucketTable and is used when the box B is far larger than 2^n.
struct SparseBucketTable {
  int r = 0;
  std::vector<std::int64_t> keys;  // entries * r
  std::vector<double> log_t;

  std::size_t entries() const { return log_t.size(); }
  std::span<const std::int64_t> bucket(std::size_t e) const {
    return {keys.data() + e * static_cast<std::size_t>(r), static_cast<std::size_t>(r)};
  }
};

enum class TableLayout { automatic, dense, sparse };

struct DpOptions {
  std::size_t bucket_budget = 100'000'000;  // dense cells, or sparse entries
  TableLayout layout = TableLayout::automatic;
};

/// t_i(k) = t_{i-1}(k) + exp(2 theta_i) t_{i-1}(k - uhat_i), seeded with
/// exp(-sum theta) at the base bucket. Throws BudgetExceeded when |B| exceeds
/// the budget; the message quotes the |B| bound.
BucketTable run_dp(const Vector& theta, const QuantConfig& q, const DpOptions& options = {});
SparseBucketTable run_dp_sparse(const Vector& theta, const QuantConfig& q,
                                const DpOptions& options = {});

/// 2^r prod_j (sqrt(|lambda_j| n) / c + n / 2 + 1).
double bucket_count_bound(const Spectrum& spectrum, int n, double c);

/// r c^2 (n + 1)^2 / 4 + c sqrt(n) (n + 1) sum_j sqrt|lambda_j|.
double theorem_error_bound(const Spectrum& spectrum, int n, double c);

/// Largest grid spacing for which the error bound is at most epsilon:
/// min(sqrt(eps / r) / (n + 1), eps / (4 sum_j sqrt|lambda_j| sqrt(n) (n + 1))).
/// Accepts epsilon in (0, 1/2]; throws when the spectrum has no nonzero pair.
double choose_c_for_epsilon(const Spectrum& spectrum, int n, double epsilon);

/// log sum_k t(k) exp(sum_j sign(lambda_j) (c k_j)^2). The caller adds the
/// model's log_offset. Carries the error bound as a_priori_bound.
LogZEstimate estimate_log_z_lowrank(const Vector& theta, const Spectrum& spectrum, double c,
                                    const DpOptions& options = {});

/// Builds f(x) for each of the 2^n states by the recursive definition and sums
/// the quantized weights directly. For checking the DP; n <= cap.
double quantized_reference_log_z(const Vector& theta, const Spectrum& spectrum, double c,
                                 int cap = 20);

}  // namespace specinf

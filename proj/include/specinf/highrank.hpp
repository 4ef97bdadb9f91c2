#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "specinf/baselines.hpp"
#include "specinf/diagshift.hpp"
#include "specinf/logz.hpp"
#include "specinf/lowrank.hpp"
#include "specinf/model.hpp"

namespace specinf {

/// How the quantization interval is picked for a rank-1 subproblem.
struct QuantizationPolicy {
  enum class Kind {
    experimental,  // c = sqrt|lambda| / 1000
    theorem,             // c = choose_c_for_epsilon(rank-1 spectrum, n, epsilon)
    fixed,               // c given
  };
  Kind kind = Kind::experimental;
  double epsilon = 0.1;
  double c = 0.0;

  static QuantizationPolicy experimental() { return {}; }
  static QuantizationPolicy theorem_mode(double eps) { return {Kind::theorem, eps, 0.0}; }
  static QuantizationPolicy fixed_interval(double c) { return {Kind::fixed, 0.0, c}; }

  double interval(double lambda, int n) const;
};

QuantizationPolicy::Kind parse_quantization_kind(std::string_view name);

struct ShiftPolicy {
  enum class Kind { sdp, zero, max_eig, diag_dominant, given };
  Kind kind = Kind::sdp;
  Vector d;  // used by Kind::given; length must match the operating dimension
  SdpOptions sdp;

  static ShiftPolicy given(Vector d) {
    ShiftPolicy p;
    p.kind = Kind::given;
    p.d = std::move(d);
    return p;
  }
};

ShiftPolicy::Kind parse_shift_kind(std::string_view name);
std::string_view to_string(ShiftPolicy::Kind kind);

struct RankOneFactor {
  int index = 0;
  double lambda = 0.0;
  double log_e = 0.0;  // log E_{x~U}[exp(lambda <v, x>^2)]
  double c = 0.0;
  std::size_t buckets = 0;
};

/// log E = estimate_log_z_lowrank(0, (lambda, v), c) - n log 2; exactly 0 for lambda = 0.
RankOneFactor rank_one_log_expectation(double lambda, const Vector& v,
                                       const QuantizationPolicy& policy,
                                       const DpOptions& dp = {});

struct SpectralMfOptions {
  QuantizationPolicy quantization;
  ShiftPolicy shift;
  int threads = 1;
  double rank_tol = 1e-9;
  DpOptions dp;
};

struct SpectralMfReport {
  LogZEstimate estimate;
  int operating_n = 0;  // n + 1 when the fields were absorbed
  Vector d;
  double lambda_max_cert = 0.0;
  std::vector<RankOneFactor> factors;
};

/// Spectral mean field: absorb fields (if any), shift the diagonal, decompose
/// A + Diag(d), and combine the rank-1 expectations:
///   log Z ~ log_offset + n log 2 - sum(d) + sum_j log E_j.
SpectralMfReport run_spectral_mf(const GraphicalModel& model, const SpectralMfOptions& options = {});
LogZEstimate estimate_log_z_spectral_mf(const GraphicalModel& model,
                                        const SpectralMfOptions& options = {});

struct MethodRecord {
  Method method = Method::exact;
  LogZEstimate estimate;
  double runtime_ms = 0.0;
  std::optional<double> error;  // |log Z_hat - log Z| when the oracle ran
};

struct CompareOptions {
  SpectralMfOptions spectral;
  MfOptions mf;
  BpOptions bp;
  ExactOptions exact;
  QuantizationPolicy lowrank = QuantizationPolicy::theorem_mode(0.1);
};

/// Interval for a direct low-rank run on a whole spectrum. The experimental
/// policy is per-eigenvalue and is only accepted at rank 1.
double resolve_lowrank_interval(const Spectrum& spectrum, const QuantizationPolicy& policy);

/// Runs one estimator by tag. lowrank runs on the model's own truncated spectrum.
LogZEstimate run_method(const GraphicalModel& model, Method method, const CompareOptions& options = {});

/// Runs each method with wall-clock timing; with `oracle` the exact value is
/// computed once and each record carries its absolute error.
std::vector<MethodRecord> compare_methods(const GraphicalModel& model, const std::vector<Method>& methods,
                                          bool oracle, const CompareOptions& options = {});

}  // namespace specinf

#include "specinf/highrank.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "specinf/errors.hpp"
#include "specinf/logspace.hpp"
#include "specinf/parallel.hpp"
#include "specinf/spectral.hpp"

namespace specinf {

double QuantizationPolicy::interval(double lambda, int n) const {
  switch (kind) {
    case Kind::experimental:
      return std::sqrt(std::abs(lambda)) / 1000.0;
    case Kind::theorem: {
      Vector lam(1);
      lam[0] = lambda;
      Spectrum s;
      s.n = n;
      s.eigenvalues = lam;
      s.eigenvectors = Matrix::Zero(n, 1);
      s.retained = 1;
      return choose_c_for_epsilon(s, n, epsilon);
    }
    case Kind::fixed:
      if (!(c > 0.0)) throw InvalidArgument("fixed quantization interval must be positive");
      return c;
  }
  throw InvalidArgument("unknown quantization policy");
}

QuantizationPolicy::Kind parse_quantization_kind(std::string_view name) {
  using K = QuantizationPolicy::Kind;
  if (name == "experimental") return K::experimental;
  if (name == "theorem") return K::theorem;
  if (name == "fixed") return K::fixed;
  throw InvalidArgument("unknown c policy '" + std::string(name) + "'");
}

ShiftPolicy::Kind parse_shift_kind(std::string_view name) {
  using K = ShiftPolicy::Kind;
  if (name == "sdp") return K::sdp;
  if (name == "zero") return K::zero;
  if (name == "max-eig") return K::max_eig;
  if (name == "diag-dominant") return K::diag_dominant;
  throw InvalidArgument("unknown shift policy '" + std::string(name) + "'");
}

std::string_view to_string(ShiftPolicy::Kind kind) {
  switch (kind) {
    case ShiftPolicy::Kind::sdp: return "sdp";
    case ShiftPolicy::Kind::zero: return "zero";
    case ShiftPolicy::Kind::max_eig: return "max-eig";
    case ShiftPolicy::Kind::diag_dominant: return "diag-dominant";
    case ShiftPolicy::Kind::given: return "given";
  }
  return "unknown";
}

RankOneFactor rank_one_log_expectation(double lambda, const Vector& v, const QuantizationPolicy& policy,
                                       const DpOptions& dp) {
  if (std::abs(v.norm() - 1.0) > 1e-8) throw InvalidArgument("rank-1 factor needs a unit vector");
  RankOneFactor f;
  f.lambda = lambda;
  if (lambda == 0.0) return f;
  const int n = static_cast<int>(v.size());
  Vector lam(1);
  lam[0] = lambda;
  Matrix vec(n, 1);
  vec.col(0) = v;
  const Spectrum s = make_spectrum(lam, vec);
  f.c = policy.interval(lambda, n);
  const LogZEstimate est = estimate_log_z_lowrank(Vector::Zero(n), s, f.c, dp);
  f.log_e = est.log_z - n * kLog2;
  f.buckets = static_cast<std::size_t>(std::stod(*est.diagnostics.find("buckets")));
  return f;
}

SpectralMfReport run_spectral_mf(const GraphicalModel& model, const SpectralMfOptions& options) {
  const bool absorbed = model.has_fields();
  const GraphicalModel work = absorbed ? absorb_fields(model) : model;
  const int n = work.size();
  const Matrix& a = work.coupling();

  SpectralMfReport rep;
  rep.operating_n = n;
  Diagnostics& diag = rep.estimate.diagnostics;
  diag.set("operating_n", n);
  diag.set("shift", std::string(to_string(options.shift.kind)));

  switch (options.shift.kind) {
    case ShiftPolicy::Kind::sdp: {
      const SdpSolution sol = solve_diagonal_shift(a, options.shift.sdp);
      rep.d = sol.d;
      diag.set("sdp_iterations", sol.iterations);
      diag.set("sdp_converged", sol.converged);
      break;
    }
    case ShiftPolicy::Kind::zero:
      rep.d = Vector::Zero(n);
      break;
    case ShiftPolicy::Kind::max_eig:
      rep.d = baseline_shift_max_eig(a);
      break;
    case ShiftPolicy::Kind::diag_dominant:
      rep.d = baseline_shift_diag_dominant(a);
      break;
    case ShiftPolicy::Kind::given:
      if (options.shift.d.size() != n)
        throw DimensionMismatch("given shift has " + std::to_string(options.shift.d.size()) +
                                " entries, operating dimension is " + std::to_string(n));
      rep.d = options.shift.d;
      break;
  }

  Matrix shifted = a;
  shifted.diagonal() += rep.d;
  const Spectrum full = eig_sym(shifted);
  rep.lambda_max_cert = full.eigenvalues[0];
  const Spectrum kept = truncate_rank(full, options.rank_tol);

  rep.factors.resize(kept.retained);
  parallel_for(static_cast<std::size_t>(kept.retained), options.threads, [&](std::size_t j) {
    const int jj = static_cast<int>(j);
    rep.factors[j] = rank_one_log_expectation(kept.lambda(jj), kept.eigenvectors.col(jj),
                                              options.quantization, options.dp);
    rep.factors[j].index = jj;
  });

  double sum_log_e = 0.0;
  std::size_t buckets = 0;
  for (const auto& f : rep.factors) {
    sum_log_e += f.log_e;
    buckets += f.buckets;
  }
  const double trace = rep.d.sum();
  rep.estimate.method = Method::spectral_mf;
  rep.estimate.log_z = work.log_offset() + n * kLog2 - trace + sum_log_e;
  diag.set("trace_d", trace);
  diag.set("lambda_max_cert", rep.lambda_max_cert);
  diag.set("rank", kept.retained);
  diag.set("buckets", buckets);
  if (!std::isfinite(rep.estimate.log_z)) throw NumericalFailure("spectral mean-field estimate is not finite");
  return rep;
}

LogZEstimate estimate_log_z_spectral_mf(const GraphicalModel& model, const SpectralMfOptions& options) {
  return run_spectral_mf(model, options).estimate;
}

double resolve_lowrank_interval(const Spectrum& spectrum, const QuantizationPolicy& policy) {
  int r = 0;
  double only = 0.0;
  for (int j = 0; j < spectrum.eigenvalues.size(); ++j) {
    if (spectrum.eigenvalues[j] != 0.0) {
      ++r;
      only = spectrum.eigenvalues[j];
    }
  }
  if (r == 0) return policy.kind == QuantizationPolicy::Kind::fixed ? policy.interval(0.0, spectrum.n) : 1.0;
  switch (policy.kind) {
    case QuantizationPolicy::Kind::experimental:
      if (r > 1)
        throw InvalidArgument("the experimental interval sqrt|lambda|/1000 is per eigenvalue; "
                              "rank " + std::to_string(r) + " needs an explicit c");
      return std::sqrt(std::abs(only)) / 1000.0;
    case QuantizationPolicy::Kind::theorem:
      return choose_c_for_epsilon(spectrum, spectrum.n, policy.epsilon);
    case QuantizationPolicy::Kind::fixed:
      return policy.interval(only, spectrum.n);
  }
  throw InvalidArgument("unknown quantization policy");
}

LogZEstimate run_method(const GraphicalModel& model, Method method, const CompareOptions& options) {
  switch (method) {
    case Method::exact:
      return exact_log_z(model, options.exact);
    case Method::lowrank: {
      const Spectrum s = truncate_rank(eig_sym(model.coupling()), options.spectral.rank_tol);
      const double c = resolve_lowrank_interval(s, options.lowrank);
      LogZEstimate est = estimate_log_z_lowrank(model.theta(), s, c, options.spectral.dp);
      est.log_z += model.log_offset();
      return est;
    }
    case Method::spectral_mf:
      return estimate_log_z_spectral_mf(model, options.spectral);
    case Method::mean_field:
      return mean_field_log_z(model, options.mf);
    case Method::bp:
      return loopy_bp_log_z(model, options.bp);
  }
  throw InvalidArgument("unknown method");
}

std::vector<MethodRecord> compare_methods(const GraphicalModel& model, const std::vector<Method>& methods,
                                          bool oracle, const CompareOptions& options) {
  std::optional<double> truth;
  if (oracle) truth = exact_log_z(model, options.exact).log_z;
  std::vector<MethodRecord> out;
  out.reserve(methods.size());
  for (Method m : methods) {
    MethodRecord rec;
    rec.method = m;
    const auto start = std::chrono::steady_clock::now();
    rec.estimate = run_method(model, m, options);
    const auto stop = std::chrono::steady_clock::now();
    rec.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    if (truth) rec.error = std::abs(rec.estimate.log_z - *truth);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace specinf

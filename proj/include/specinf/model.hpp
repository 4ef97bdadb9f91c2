#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

#include "specinf/logz.hpp"

namespace specinf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Pairwise binary model P(x) ∝ exp(<theta, x> + x^T A x) over x in {-1, +1}^n.
///
/// log_offset is an additive constant on log Z, accumulated by the exact
/// conversions below (diagonal shift, field absorption) and by file parsing.
/// The represented log-partition is log_offset + log sum_x exp(energy(x)).
class GraphicalModel {
 public:
  /// Symmetrizes the coupling as (M + M^T) / 2. Throws InvalidArgument on
  /// n = 0 or non-finite input, DimensionMismatch on shape errors.
  GraphicalModel(Vector theta, Matrix coupling, double log_offset = 0.0);

  /// Independent-spin model with zero coupling.
  static GraphicalModel fields_only(Vector theta, double log_offset = 0.0);

  int size() const noexcept { return static_cast<int>(theta_.size()); }
  const Vector& theta() const noexcept { return theta_; }
  const Matrix& coupling() const noexcept { return coupling_; }
  double log_offset() const noexcept { return log_offset_; }
  bool has_fields() const noexcept;

  /// Largest |M_ij - M_ji| / 2 seen at construction.
  double input_asymmetry() const noexcept { return asymmetry_; }
  /// True when symmetrization changed some entry by more than 1e-12.
  bool was_symmetrized() const noexcept { return asymmetry_ > 1e-12; }

 private:
  Vector theta_;
  Matrix coupling_;
  double log_offset_;
  double asymmetry_ = 0.0;
};

/// <theta, x> + x^T A x, excluding log_offset.
double energy(const GraphicalModel& model, std::span<const int> x);

struct ExactOptions {
  int cap = 26;     // largest n accepted
  int threads = 1;  // state-space partitions are reduced in a fixed order
};

/// Brute-force log Z over all 2^n states (Gray-code enumeration).
LogZEstimate exact_log_z(const GraphicalModel& model, const ExactOptions& options = {});

/// Z(theta, A) = exp(-Tr D) Z(theta, A + D): returns the model with coupling
/// A + Diag(d) and log_offset reduced by sum(d).
GraphicalModel shift_diagonal(const GraphicalModel& model, const Vector& d);

/// Folds the fields into an extra spin: A' = [[A, theta/2], [theta^T/2, 0]],
/// theta' = 0, log_offset' = log_offset - log 2.
GraphicalModel absorb_fields(const GraphicalModel& model);

/// Relabels variables: new variable k is old variable perm[k].
GraphicalModel permute(const GraphicalModel& model, std::span<const int> perm);

}  // namespace specinf

#pragma once

#include <array>
#include <utility>
#include <vector>

#include "specinf/logz.hpp"
#include "specinf/model.hpp"

namespace specinf {

// Both baselines work on the pairwise view of the model:
//   x^T A x = Tr(A) + sum_{i<j} J_ij x_i x_j   with J_ij = 2 A_ij,
// so Tr(A) and log_offset are added back to every estimate.

struct MfOptions {
  int iters = 1000;    // sweeps
  double tol = 1e-10;  // on max |delta m|
};

struct MfState {
  Vector m;                          // magnetizations in [-1, 1]
  double free_energy = 0.0;          // lower bound on log Z
  int sweeps = 0;
  bool converged = false;
  std::vector<double> history;       // free energy after each sweep
};

/// Naive mean field by sequential coordinate ascent from m = 0:
/// m_i <- tanh(theta_i + sum_{j != i} J_ij m_j).
MfState mean_field(const GraphicalModel& model, const MfOptions& options = {});
LogZEstimate mean_field_log_z(const GraphicalModel& model, const MfOptions& options = {});

struct BpOptions {
  int iters = 200;
  double damping = 0.5;  // weight on the previous message
  double tol = 1e-10;
};

struct BpState {
  std::vector<std::pair<int, int>> edges;      // i < j with A_ij != 0
  std::vector<double> messages;                // per directed edge: [2e] = i->j, [2e+1] = j->i
  std::vector<std::array<double, 2>> node_beliefs;  // P(x_i = -1), P(x_i = +1)
  std::vector<std::array<double, 4>> edge_beliefs;  // (-,-), (-,+), (+,-), (+,+)
  double bethe_log_z = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped parallel sum-product with messages stored as cavity fields
/// u_{i->j} = atanh(tanh(J_ij) tanh(h_{i\j})), started from zero.
BpState loopy_bp(const GraphicalModel& model, const BpOptions& options = {});
LogZEstimate loopy_bp_log_z(const GraphicalModel& model, const BpOptions& options = {});

}  // namespace specinf

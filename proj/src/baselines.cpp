#include "specinf/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "specinf/logspace.hpp"

namespace specinf {

namespace {

// Binary entropy of P(x = +1) = (1 + m) / 2, in nats.
double spin_entropy(double m) {
  double h = 0.0;
  for (double p : {0.5 * (1.0 + m), 0.5 * (1.0 - m)})
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double mf_free_energy(const GraphicalModel& model, const Matrix& j, const Vector& m) {
  double f = 0.0;
  for (int i = 0; i < m.size(); ++i) f += spin_entropy(m[i]);
  f += model.theta().dot(m) + 0.5 * m.dot(j * m);
  return f + model.coupling().trace() + model.log_offset();
}

// Cavity message for coupling J and cavity field h: atanh(tanh J tanh h),
// written so that it stays finite when both are large.
double cavity_message(double coupling, double field) {
  auto log_cosh = [](double x) { return log_2cosh(x); };
  return 0.5 * (log_cosh(coupling + field) - log_cosh(coupling - field));
}

}  // namespace

MfState mean_field(const GraphicalModel& model, const MfOptions& options) {
  const int n = model.size();
  Matrix j = 2.0 * model.coupling();
  j.diagonal().setZero();
  MfState st;
  st.m = Vector::Zero(n);
  for (int sweep = 1; sweep <= options.iters; ++sweep) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      const double updated = std::tanh(model.theta()[i] + j.col(i).dot(st.m));
      change = std::max(change, std::abs(updated - st.m[i]));
      st.m[i] = updated;
    }
    st.history.push_back(mf_free_energy(model, j, st.m));
    st.sweeps = sweep;
    if (change < options.tol) {
      st.converged = true;
      break;
    }
  }
  st.free_energy = st.history.empty() ? mf_free_energy(model, j, st.m) : st.history.back();
  return st;
}

LogZEstimate mean_field_log_z(const GraphicalModel& model, const MfOptions& options) {
  const MfState st = mean_field(model, options);
  LogZEstimate est;
  est.method = Method::mean_field;
  est.log_z = st.free_energy;
  est.diagnostics.set("sweeps", st.sweeps);
  est.diagnostics.set("converged", st.converged);
  return est;
}

BpState loopy_bp(const GraphicalModel& model, const BpOptions& options) {
  const int n = model.size();
  const Matrix& a = model.coupling();
  BpState st;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k)
      if (a(i, k) != 0.0) st.edges.emplace_back(i, k);
  const std::size_t m = st.edges.size();

  // incoming[i] lists the directed messages arriving at i.
  std::vector<std::vector<std::size_t>> incoming(n);
  for (std::size_t e = 0; e < m; ++e) {
    incoming[st.edges[e].second].push_back(2 * e);     // i -> j arrives at j
    incoming[st.edges[e].first].push_back(2 * e + 1);  // j -> i arrives at i
  }
  auto total_fields = [&](const std::vector<double>& msg) {
    Vector h = model.theta();
    for (int i = 0; i < n; ++i)
      for (std::size_t d : incoming[i]) h[i] += msg[d];
    return h;
  };

  st.messages.assign(2 * m, 0.0);
  std::vector<double> fresh(2 * m);
  for (int it = 1; it <= options.iters; ++it) {
    const Vector h = total_fields(st.messages);
    double change = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      const auto [i, k] = st.edges[e];
      const double coupling = 2.0 * a(i, k);
      fresh[2 * e] = cavity_message(coupling, h[i] - st.messages[2 * e + 1]);
      fresh[2 * e + 1] = cavity_message(coupling, h[k] - st.messages[2 * e]);
    }
    for (std::size_t d = 0; d < 2 * m; ++d) {
      change = std::max(change, std::abs(fresh[d] - st.messages[d]));
      st.messages[d] = options.damping * st.messages[d] + (1.0 - options.damping) * fresh[d];
    }
    st.iterations = it;
    if (change < options.tol) {
      st.converged = true;
      break;
    }
  }
  if (m == 0) st.converged = true;

  // Bethe estimate: sum_edges log Z_ij - sum_i (deg_i - 1) log Z_i.
  const Vector h = total_fields(st.messages);
  double bethe = 0.0;
  st.node_beliefs.resize(n);
  for (int i = 0; i < n; ++i) {
    const double log_zi = log_2cosh(h[i]);
    bethe -= (static_cast<double>(incoming[i].size()) - 1.0) * log_zi;
    const double plus = 0.5 * (1.0 + std::tanh(h[i]));
    st.node_beliefs[i] = {1.0 - plus, plus};
  }
  st.edge_beliefs.resize(m);
  for (std::size_t e = 0; e < m; ++e) {
    const auto [i, k] = st.edges[e];
    const double coupling = 2.0 * a(i, k);
    const double hi = h[i] - st.messages[2 * e + 1];
    const double hk = h[k] - st.messages[2 * e];
    std::array<double, 4> w{};
    int idx = 0;
    for (double xi : {-1.0, 1.0})
      for (double xk : {-1.0, 1.0}) w[idx++] = hi * xi + hk * xk + coupling * xi * xk;
    const double log_zij = log_sum_exp(w);
    bethe += log_zij;
    for (int q = 0; q < 4; ++q) st.edge_beliefs[e][q] = std::exp(w[q] - log_zij);
  }
  st.bethe_log_z = bethe + a.trace() + model.log_offset();
  return st;
}

LogZEstimate loopy_bp_log_z(const GraphicalModel& model, const BpOptions& options) {
  const BpState st = loopy_bp(model, options);
  LogZEstimate est;
  est.method = Method::bp;
  est.log_z = st.bethe_log_z;
  est.diagnostics.set("iterations", st.iterations);
  est.diagnostics.set("converged", st.converged);
  est.diagnostics.set("edges", st.edges.size());
  return est;
}

}  // namespace specinf

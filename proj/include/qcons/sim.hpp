/*
 Copyright 2026 The qcons Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef QCONS_SIM_HPP
#define QCONS_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qcons/codec.hpp"
#include "qcons/error.hpp"
#include "qcons/gains.hpp"
#include "qcons/model.hpp"
#include "qcons/network.hpp"
#include "qcons/quantizer.hpp"

namespace qcons {

struct SimConfig {
  std::shared_ptr<const SystemModel<double>> model;
  Network network;
  GainPlan plan;
  LevelSchedule schedule;
  double p0 = 1.0;
  long horizon = 100;
  Eigen::MatrixXd x0;  ///< N x 2m
  std::uint64_t seed = 0;
  double c_star = 0.0;        ///< declared bound on ||x_j(0)||_inf
  double c_delta_star = 0.0;  ///< declared bound on ||delta_j(0)||_inf
  /// Run even when the schedule misses the level bounds or the plan is not feasible.
  bool allow_override = false;
  bool check_invariants = true;
};

/// x_{ij}(0) uniform on (0, scale * j) for component j = 1..2m.
inline Eigen::MatrixXd random_initial_states(int N, int m, std::mt19937_64& rng, double scale = 1.0) {
  Eigen::MatrixXd x(N, 2 * m);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < 2 * m; ++j) {
      std::uniform_real_distribution<double> unif(0.0, scale * (j + 1));
      x(i, j) = unif(rng);
    }
  }
  return x;
}

/// Per-component infinity norm of the disagreement, one entry per j.
inline Eigen::VectorXd disagreement_norms(const Network& net, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) out(j) = disagreement(net, x.col(j)).cwiseAbs().maxCoeff();
  return out;
}

/// One recorded step. States and controls are those at time t.
struct StepRecord {
  long t = 0;
  Eigen::MatrixXd x;              ///< N x 2m
  Eigen::VectorXd y;              ///< outputs
  std::vector<int> symbols;       ///< 0 at t = 0
  Eigen::VectorXd d;              ///< quantizer inputs
  std::vector<bool> saturated;
  Eigen::VectorXd u;
  Eigen::VectorXd delta_inf;      ///< ||delta_j(t)||_inf, j = 1..2m
  double max_quant_err = 0.0;     ///< ||Delta(t)||_inf
  int saturations = 0;
};

/// Largest residual of each identity the closed loop must satisfy.
struct InvariantResiduals {
  double estimation_error = 0.0;     ///< e_1 - p(t-1) Delta, absolute
  double estimation_error_relative = 0.0;  ///< the same, relative to 1 + |y| + p(t-1)|symbol|
  double high_order_error = 0.0;     ///< full-state error decomposition, relative to 1 + |x|
  double control_law = 0.0;          ///< neighbor-sum u vs Laplacian form
  double consensus_neutrality = 0.0; ///< |psi_1^T u|
  long decoder_mismatches = 0;       ///< decoder estimates differing from the encoder's
};

struct SimTrace {
  std::vector<StepRecord> steps;  ///< t = 0..T-1
  Eigen::MatrixXd final_state;    ///< x(T)
  Eigen::VectorXd final_delta_inf;
  InvariantResiduals residuals;
  long bits_sent = 0;
};

/**
 * u_i = sum_j k_j sum_{v in-neighbors} g_iv (xhat_{vij} - xhat_{ij}).
 *
 * @param own       own[i] = agent i's estimate of itself
 * @param neighbor  neighbor(i, v) = agent i's decoded estimate of agent v (read only where g_iv > 0)
 */
template <typename NeighborFn>
Eigen::VectorXd control_step(const Network& net, const Eigen::VectorXd& k, long t, int m,
                             const std::vector<Eigen::VectorXd>& own, NeighborFn&& neighbor) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(net.N);
  if (t < 2L * m) return u;
  for (int i = 0; i < net.N; ++i) {
    double acc = 0.0;
    for (int v = 0; v < net.N; ++v) {
      const double g = net.weights(i, v);
      if (g == 0.0 || v == i) continue;
      acc += g * k.dot(neighbor(i, v) - own[i]);
    }
    u(i) = acc;
  }
  return u;
}

namespace detail {

inline void validate(const SimConfig& cfg) {
  if (!cfg.model) throw std::invalid_argument("SimConfig: model is missing");
  const int N = cfg.network.N;
  const int n = cfg.model->order();
  if (cfg.x0.rows() != N || cfg.x0.cols() != n) {
    throw std::invalid_argument("SimConfig: initial state must be N x 2m");
  }
  if (cfg.plan.k.size() != n) throw std::invalid_argument("SimConfig: gain vector must have length 2m");
  if (cfg.horizon < 1) throw std::invalid_argument("SimConfig: horizon must be positive");
  if (cfg.schedule.m != cfg.model->m) throw std::invalid_argument("SimConfig: schedule order mismatch");
  if (cfg.c_star > 0.0 || cfg.c_delta_star > 0.0) {
    const double x_norm = cfg.x0.cwiseAbs().maxCoeff();
    const double d_norm = disagreement_norms(cfg.network, cfg.x0).maxCoeff();
    if (x_norm > cfg.c_star) {
      throw std::invalid_argument("initial state exceeds the declared bound C* (" + std::to_string(x_norm) + " > " +
                                  std::to_string(cfg.c_star) + ")");
    }
    if (d_norm > cfg.c_delta_star) {
      throw std::invalid_argument("initial disagreement exceeds the declared bound C_delta* (" +
                                  std::to_string(d_norm) + " > " + std::to_string(cfg.c_delta_star) + ")");
    }
  }
  if (cfg.allow_override) return;
  if (!cfg.schedule.meets_bounds()) {
    throw InfeasibleError("level schedule misses the convergence bound (M_steady = " +
                          std::to_string(cfg.schedule.M_steady) + "); set the override flag to run anyway");
  }
  // A searched plan is feasible by construction; a forced one must at least
  // pass the spectral gate.
  for (const auto& e : cfg.plan.feasibility.entries) {
    const bool spectral = e.id.rfind("spectral_radius", 0) == 0;
    if (!e.pass && (spectral || cfg.plan.searched)) {
      throw InfeasibleError("gain plan fails '" + e.id + "'; set the override flag to run anyway");
    }
  }
}

}  // namespace detail

/**
 * Runs the closed loop for `horizon` steps. Each step: measure, encode,
 * decode on every edge, compute u(t), advance x(t+1) = A x(t) + b u(t).
 *
 * @throws NumericOverflowError if a state becomes non-finite
 */
inline SimTrace run(const SimConfig& cfg) {
  detail::validate(cfg);
  const auto& model = *cfg.model;
  const auto& net = cfg.network;
  const int N = net.N;
  const int m = model.m;
  const int n = model.order();
  const Eigen::VectorXd& k = cfg.plan.k;
  const double gamma = cfg.plan.gamma;

  std::vector<CodecState> encoders;
  encoders.reserve(N);
  for (int i = 0; i < N; ++i) encoders.emplace_back(cfg.model, cfg.p0, gamma);
  // decoders[i * N + v]: agent i's copy of agent v's codec, present for in-neighbors.
  std::vector<std::unique_ptr<CodecState>> decoders(static_cast<std::size_t>(N) * N);
  for (int i = 0; i < N; ++i)
    for (int v = 0; v < N; ++v)
      if (v != i && net.weights(i, v) != 0.0) decoders[i * N + v] = std::make_unique<CodecState>(cfg.model, cfg.p0, gamma);

  SimTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(cfg.horizon));
  Eigen::MatrixXd x = cfg.x0;
  // Histories for the error decomposition: e_1 and u per agent, newest last.
  std::vector<std::vector<double>> e1_hist(N), u_hist(N);

  for (long t = 0; t < cfg.horizon; ++t) {
    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.y = x.col(0);
    rec.symbols.assign(N, 0);
    rec.d = Eigen::VectorXd::Zero(N);
    rec.saturated.assign(N, false);
    rec.delta_inf = disagreement_norms(net, x);

    if (t >= 1) {
      const int M = cfg.schedule.levels_at(t);
      for (int i = 0; i < N; ++i) {
        const double scale = encoders[i].scale(t - 1);
        const auto enc = encoder_step(encoders[i], t, rec.y(i), M);
        rec.symbols[i] = enc.symbol;
        rec.d(i) = enc.d;
        rec.saturated[i] = enc.saturated;
        const double quant_err = static_cast<double>(enc.symbol) - enc.d;
        rec.max_quant_err = std::max(rec.max_quant_err, std::abs(quant_err));
        if (enc.saturated) ++rec.saturations;
        trace.bits_sent += symbol_cost_bits(enc.symbol, M);
        if (cfg.check_invariants) {
          const double e1 = encoders[i].estimate()(0) - rec.y(i);
          e1_hist[i].push_back(e1);
          const double r = std::abs(e1 - scale * quant_err);
          trace.residuals.estimation_error = std::max(trace.residuals.estimation_error, r);
          trace.residuals.estimation_error_relative =
              std::max(trace.residuals.estimation_error_relative,
                       r / (1.0 + std::abs(rec.y(i)) + scale * std::abs(enc.symbol)));
        }
      }
      for (int i = 0; i < N; ++i) {
        for (int v = 0; v < N; ++v) {
          auto& dec = decoders[i * N + v];
          if (!dec) continue;
          decoder_step(*dec, t, rec.symbols[v]);
          if (dec->estimate() != encoders[v].estimate()) ++trace.residuals.decoder_mismatches;
        }
      }
    }

    std::vector<Eigen::VectorXd> own(N);
    for (int i = 0; i < N; ++i) own[i] = encoders[i].estimate();
    rec.u = control_step(net, k, t, m, own, [&](int i, int v) -> const Eigen::VectorXd& {
      return decoders[i * N + v]->estimate();
    });

    if (cfg.check_invariants && t >= 1) {
      auto& res = trace.residuals;
      if (t >= 2L * m) {
        Eigen::MatrixXd xhat(N, n);
        for (int i = 0; i < N; ++i) xhat.row(i) = own[i].transpose();
        Eigen::VectorXd u_lap = Eigen::VectorXd::Zero(N);
        for (int j = 0; j < n; ++j) u_lap -= k(j) * (net.laplacian * xhat.col(j));
        const double scale_u = 1.0 + rec.u.cwiseAbs().maxCoeff();
        res.control_law = std::max(res.control_law, (rec.u - u_lap).cwiseAbs().maxCoeff() / scale_u);
        res.consensus_neutrality = std::max(res.consensus_neutrality, std::abs(net.psi1.dot(rec.u)) / scale_u);
      }
      if (t >= static_cast<long>(n)) {
        for (int i = 0; i < N; ++i) {
          Eigen::VectorXd window(n);
          const auto& eh = e1_hist[i];
          for (int q = 0; q < n; ++q) window(q) = eh[eh.size() - n + q];
          Eigen::VectorXd predicted = model.S * window;
          const auto& uh = u_hist[i];  // u(0..t-1)
          for (int idx = 1; idx <= n - 1; ++idx) predicted -= model.b_tilde[idx - 1] * uh[uh.size() - idx];
          const Eigen::VectorXd actual = own[i] - x.row(i).transpose();
          const double rel = (actual - predicted).cwiseAbs().maxCoeff() / (1.0 + x.row(i).cwiseAbs().maxCoeff());
          res.high_order_error = std::max(res.high_order_error, rel);
        }
      }
    }
    if (cfg.check_invariants)
      for (int i = 0; i < N; ++i) u_hist[i].push_back(rec.u(i));

    // x(t+1) = A x(t) + b u(t), row-wise.
    Eigen::MatrixXd next = x * model.A.transpose();
    next.col(n - 1) += rec.u;
    if (!next.allFinite()) {
      throw NumericOverflowError("state became non-finite at t = " + std::to_string(t + 1));
    }
    x = std::move(next);
    trace.steps.push_back(std::move(rec));
  }
  trace.final_state = x;
  trace.final_delta_inf = disagreement_norms(net, x);
  return trace;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// exp of the least-squares slope of log(err + 1e-300) over the second half.
/// Returns 0 if the error is identically zero there.
inline double fit_rate(std::span<const double> err) {
  if (err.size() < 2) throw std::invalid_argument("fit_rate: need at least two samples");
  const std::size_t start = err.size() / 2;
  const std::size_t count = err.size() - start;
  if (std::all_of(err.begin() + static_cast<std::ptrdiff_t>(start), err.end(), [](double e) { return e == 0.0; })) {
    return 0.0;
  }
  double mean_t = 0.0, mean_y = 0.0;
  for (std::size_t i = start; i < err.size(); ++i) {
    mean_t += static_cast<double>(i);
    mean_y += std::log(err[i] + 1e-300);
  }
  mean_t /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = start; i < err.size(); ++i) {
    const double dt = static_cast<double>(i) - mean_t;
    sxy += dt * (std::log(err[i] + 1e-300) - mean_y);
    sxx += dt * dt;
  }
  return std::exp(sxy / sxx);
}

struct Metrics {
  double fitted_rate = 0.0;
  double gamma = 0.0;
  double max_abs_delta_quant = 0.0;
  long saturation_count = 0;
  double initial_error = 0.0;
  double final_error = 0.0;
  double decay_ratio = 0.0;  ///< final / initial consensus error
};

/// Consensus error per step: max_j ||delta_j(t)||_inf.
inline std::vector<double> consensus_error(const SimTrace& trace) {
  std::vector<double> err;
  err.reserve(trace.steps.size());
  for (const auto& s : trace.steps) err.push_back(s.delta_inf.maxCoeff());
  return err;
}

inline Metrics metrics(const SimTrace& trace, double gamma) {
  if (trace.steps.size() < 100) throw std::invalid_argument("metrics: trace needs at least 100 steps");
  Metrics mt;
  mt.gamma = gamma;
  const auto err = consensus_error(trace);
  mt.fitted_rate = fit_rate(err);
  for (const auto& s : trace.steps) {
    mt.max_abs_delta_quant = std::max(mt.max_abs_delta_quant, s.max_quant_err);
    mt.saturation_count += s.saturations;
  }
  mt.initial_error = err.front();
  mt.final_error = trace.final_delta_inf.maxCoeff();
  mt.decay_ratio = mt.initial_error > 0.0 ? mt.final_error / mt.initial_error : 0.0;
  return mt;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline void write_trace_csv(std::ostream& os, const SimTrace& trace, int N, int m) {
  const int n = 2 * m;
  os << "t";
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= n; ++j) os << ",x_" << i << '_' << j;
  for (int j = 1; j <= n; ++j) os << ",delta_inf_" << j;
  os << ",max_quant_err,saturations";
  for (int i = 1; i <= N; ++i) os << ",u_" << i;
  os << '\n' << std::setprecision(17);
  for (const auto& s : trace.steps) {
    os << s.t;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < n; ++j) os << ',' << s.x(i, j);
    for (int j = 0; j < n; ++j) os << ',' << s.delta_inf(j);
    os << ',' << s.max_quant_err << ',' << s.saturations;
    for (int i = 0; i < N; ++i) os << ',' << s.u(i);
    os << '\n';
  }
}

inline void write_symbol_log(std::ostream& os, const SimTrace& trace) {
  os << "t,agent,symbol,d_value,saturated\n" << std::setprecision(17);
  for (const auto& s : trace.steps) {
    if (s.t == 0) continue;
    for (std::size_t i = 0; i < s.symbols.size(); ++i)
      os << s.t << ',' << i + 1 << ',' << s.symbols[i] << ',' << s.d(static_cast<Eigen::Index>(i)) << ','
         << (s.saturated[i] ? 1 : 0) << '\n';
  }
}

}  // namespace qcons

#endif  // QCONS_SIM_HPP

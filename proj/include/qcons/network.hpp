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
#ifndef QCONS_NETWORK_HPP
#define QCONS_NETWORK_HPP

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <istream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qcons/error.hpp"
#include "qcons/numeric.hpp"

namespace qcons {

/// Eigenvalues closer than this to zero count as the consensus eigenvalue.
inline constexpr double kZeroEigenTol = 1e-8;

/**
 * Weighted communication graph. weights(i, v) = g_iv > 0 means agent i
 * receives from agent v. L = diag(row sums) - G.
 */
struct Network {
  int N = 0;
  Eigen::MatrixXd weights;
  bool directed = false;
  Eigen::MatrixXd laplacian;
  /// Sorted by real part ascending, ties (within 1e-9) by imaginary part.
  std::vector<std::complex<double>> eigenvalues;
  Eigen::VectorXd phi1;  ///< 1_N / sqrt(N)
  Eigen::VectorXd psi1;  ///< left null vector with psi1^T phi1 = 1
  double lambda2_real = 0.0;

  /// In-neighbors of agent i (agents it receives from).
  std::vector<int> in_neighbors(int i) const {
    std::vector<int> out;
    for (int v = 0; v < N; ++v)
      if (v != i && weights(i, v) > 0.0) out.push_back(v);
    return out;
  }
  /// Out-neighbors of agent i (agents receiving from it).
  std::vector<int> out_neighbors(int i) const {
    std::vector<int> out;
    for (int v = 0; v < N; ++v)
      if (v != i && weights(v, i) > 0.0) out.push_back(v);
    return out;
  }
};

namespace detail {

inline void sort_spectrum(std::vector<std::complex<double>>& ev) {
  std::sort(ev.begin(), ev.end(),
            [](const auto& a, const auto& b) { return a.real() < b.real(); });
  // Stable tie-break on the imaginary part inside clusters of equal real part.
  std::size_t start = 0;
  while (start < ev.size()) {
    std::size_t end = start + 1;
    while (end < ev.size() && ev[end].real() - ev[end - 1].real() <= 1e-9) ++end;
    std::sort(ev.begin() + start, ev.begin() + end,
              [](const auto& a, const auto& b) { return a.imag() < b.imag(); });
    start = end;
  }
}

inline Eigen::VectorXd left_null_vector(const Eigen::MatrixXd& L, const Eigen::VectorXd& phi1) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(L.transpose(), true);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i]) < std::abs(es.eigenvalues()[best])) best = i;
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  const double dot = v.dot(phi1);
  if (std::abs(dot) < 1e-300) throw ConsistencyError("left null vector orthogonal to 1_N");
  v /= dot;
  return v;
}

}  // namespace detail

/// Builds the Laplacian, its spectrum and the consensus projector vectors.
inline Network build_network(const Eigen::MatrixXd& weights, bool directed) {
  const auto N = weights.rows();
  if (N < 1 || weights.cols() != N) throw std::invalid_argument("weights must be a nonempty square matrix");
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index v = 0; v < N; ++v) {
      if (weights(i, v) < 0.0 || !std::isfinite(weights(i, v))) {
        throw NegativeWeightError("weight g(" + std::to_string(i + 1) + "," + std::to_string(v + 1) +
                                  ") is negative or not finite");
      }
      if (!directed && std::abs(weights(i, v) - weights(v, i)) > 1e-12) {
        throw AsymmetricWeightsError("undirected network with g(" + std::to_string(i + 1) + "," +
                                     std::to_string(v + 1) + ") != g(" + std::to_string(v + 1) + "," +
                                     std::to_string(i + 1) + ")");
      }
    }
  }

  Network net;
  net.N = static_cast<int>(N);
  net.weights = weights;
  net.weights.diagonal().setZero();
  net.directed = directed;
  net.laplacian = -net.weights;
  net.laplacian.diagonal() = net.weights.rowwise().sum();
  net.phi1 = Eigen::VectorXd::Constant(N, 1.0 / std::sqrt(static_cast<double>(N)));

  if (!directed) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(net.laplacian, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < N; ++i) net.eigenvalues.emplace_back(es.eigenvalues()(i), 0.0);
    net.psi1 = net.phi1;
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(net.laplacian, false);
    for (Eigen::Index i = 0; i < N; ++i) net.eigenvalues.push_back(es.eigenvalues()(i));
    net.psi1 = detail::left_null_vector(net.laplacian, net.phi1);
  }
  detail::sort_spectrum(net.eigenvalues);
  net.lambda2_real = N > 1 ? net.eigenvalues[1].real() : 0.0;
  return net;
}

struct ConnectivityReport {
  bool has_spanning_tree = false;
  bool connected_undirected = false;
};

namespace detail {

/// Nodes reachable from `root` along information flow v -> i (g_iv > 0).
inline std::vector<bool> reachable_from(const Eigen::MatrixXd& w, int root) {
  const int N = static_cast<int>(w.rows());
  std::vector<bool> seen(N, false);
  std::vector<int> stack{root};
  seen[root] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int i = 0; i < N; ++i) {
      if (!seen[i] && w(i, v) > 0.0) {
        seen[i] = true;
        stack.push_back(i);
      }
    }
  }
  return seen;
}

}  // namespace detail

/// Decides spanning-tree existence by reachability and by the multiplicity of
/// the zero eigenvalue; throws ConsistencyError if the two disagree.
inline ConnectivityReport connectivity_check(const Network& net) {
  ConnectivityReport report;
  for (int root = 0; root < net.N && !report.has_spanning_tree; ++root) {
    const auto seen = detail::reachable_from(net.weights, root);
    report.has_spanning_tree = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }

  const auto zeros = std::count_if(net.eigenvalues.begin(), net.eigenvalues.end(),
                                   [](const auto& z) { return std::abs(z) <= kZeroEigenTol; });
  const bool simple_zero = zeros == 1;
  if (simple_zero != report.has_spanning_tree) {
    throw ConsistencyError("spanning-tree reachability (" + std::to_string(report.has_spanning_tree) +
                           ") disagrees with zero-eigenvalue multiplicity " + std::to_string(zeros));
  }

  const Eigen::MatrixXd sym = net.weights + net.weights.transpose();
  const auto seen = detail::reachable_from(sym, 0);
  report.connected_undirected = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  return report;
}

/// (I - phi1 psi1^T) x.
inline Eigen::VectorXd disagreement(const Network& net, const Eigen::VectorXd& x) {
  return x - net.phi1 * net.psi1.dot(x);
}

/// Nonzero Laplacian eigenvalues (all but the first in sorted order).
inline std::vector<std::complex<double>> nonzero_eigenvalues(const Network& net) {
  return {net.eigenvalues.begin() + std::min<std::size_t>(1, net.eigenvalues.size()), net.eigenvalues.end()};
}

/**
 * Orthonormal-or-unit-column eigenvector matrix U_L (first column phi1) of
 * the Laplacian and its inverse; used only for the constants of the
 * epsilon-selection inequalities. For a directed, non-diagonalizable
 * Laplacian `diagonalizable` is false and the returned norms are those of the
 * numerically computed (ill-conditioned) eigenvector matrix.
 */
struct EigenBasisNorms {
  double U_inf = 0.0;
  double U_inv_inf = 0.0;
  double condition = 1.0;
  bool diagonalizable = true;
  /// Size of the largest block of nonzero eigenvalues that may be coupled (1 if diagonalizable).
  int max_block = 1;
};

inline constexpr double kMaxEigenvectorCondition = 1e6;

inline EigenBasisNorms eigen_basis_norms(const Network& net) {
  EigenBasisNorms out;
  const int N = net.N;
  if (!net.directed) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(net.laplacian);
    const Eigen::MatrixXd U = es.eigenvectors();
    out.U_inf = inf_norm(U);
    out.U_inv_inf = inf_norm(U.transpose());
    out.condition = 1.0;
    return out;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(net.laplacian, true);
  Eigen::MatrixXcd U = es.eigenvectors();
  for (int c = 0; c < N; ++c) U.col(c).normalize();
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(U);
  const auto& sv = svd.singularValues();
  out.condition = sv(N - 1) > 0.0 ? sv(0) / sv(N - 1) : std::numeric_limits<double>::infinity();
  out.diagonalizable = out.condition < kMaxEigenvectorCondition;
  out.U_inf = U.cwiseAbs().rowwise().sum().maxCoeff();
  if (std::isfinite(out.condition)) {
    const Eigen::MatrixXcd Uinv = U.inverse();
    out.U_inv_inf = Uinv.cwiseAbs().rowwise().sum().maxCoeff();
  } else {
    out.U_inv_inf = std::numeric_limits<double>::infinity();
  }
  if (!out.diagonalizable) {
    // Upper bound on the Jordan block size: size of the largest eigenvalue cluster.
    const auto nz = nonzero_eigenvalues(net);
    for (std::size_t i = 0; i < nz.size(); ++i) {
      int count = 0;
      for (const auto& z : nz)
        if (std::abs(z - nz[i]) < 1e-6) ++count;
      out.max_block = std::max(out.max_block, count);
    }
  }
  return out;
}

/// For m >= 2: every eigenvalue real, nonzero ones positive, zero simple, Laplacian diagonalizable.
inline void require_real_diagonalizable_spectrum(const Network& net) {
  for (const auto& z : net.eigenvalues) {
    if (std::abs(z.imag()) > 1e-9) {
      throw UnsupportedTopologyError(
          "Laplacian has complex eigenvalues; high-order agents (m >= 2) need a real spectrum "
          "0 < lambda_2 <= ... <= lambda_N");
    }
  }
  if (net.N > 1 && !(net.eigenvalues[1].real() > kZeroEigenTol)) {
    throw UnsupportedTopologyError("zero Laplacian eigenvalue is not simple (no spanning tree)");
  }
  if (net.directed && !eigen_basis_norms(net).diagonalizable) {
    throw UnsupportedTopologyError("Laplacian is not diagonalizable (eigenvector condition >= 1e6)");
  }
}

// ---------------------------------------------------------------------------
// Graph sources
// ---------------------------------------------------------------------------

/**
 * Parses an edge list: one "i j weight" triple per line, 1-indexed, '#'
 * starts a comment. A line "i j w" is the edge (i, j): j receives from i,
 * so g_ji = w (and g_ij = w when undirected). `nodes` = 0 infers N from the
 * largest index.
 */
inline Eigen::MatrixXd parse_edge_list(std::istream& in, bool directed, int nodes = 0) {
  struct Edge {
    int from, to;
    double w;
    int line;
  };
  std::vector<Edge> edges;
  std::string raw;
  int line_no = 0;
  int max_index = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    int i = 0, j = 0;
    double w = 0.0;
    if (!(ls >> i)) continue;  // blank line
    if (!(ls >> j >> w)) throw ConfigError("edge list: expected 'i j weight'", line_no);
    std::string extra;
    if (ls >> extra) throw ConfigError("edge list: trailing token '" + extra + "'", line_no);
    if (i < 1 || j < 1) throw ConfigError("edge list: node indices are 1-based", line_no);
    if (i == j) throw ConfigError("edge list: self-loop", line_no);
    if (w < 0.0) throw NegativeWeightError("edge list line " + std::to_string(line_no) + ": negative weight");
    edges.push_back({i, j, w, line_no});
    max_index = std::max({max_index, i, j});
  }
  const int N = nodes > 0 ? nodes : max_index;
  if (N < 1) throw ConfigError("edge list: no nodes");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(N, N);
  for (const auto& e : edges) {
    if (e.from > N || e.to > N) throw ConfigError("edge list: node index exceeds node count", e.line);
    g(e.to - 1, e.from - 1) = e.w;
    if (!directed) g(e.from - 1, e.to - 1) = e.w;
  }
  return g;
}

/// One Erdos-Renyi draw with 0/1 weights: each ordered (directed) or
/// unordered (undirected) pair becomes an edge with probability p.
inline Eigen::MatrixXd random_graph(int N, double p, bool directed, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    for (int v = directed ? 0 : i + 1; v < N; ++v) {
      if (v == i) continue;
      if (unif(rng) < p) {
        g(i, v) = 1.0;
        if (!directed) g(v, i) = 1.0;
      }
    }
  }
  return g;
}

/// Redraws until the graph has a spanning tree (connected, if undirected)
/// and, when `real_spectrum` is set, a real diagonalizable Laplacian spectrum.
inline Eigen::MatrixXd random_connected_graph(int N, double p, bool directed, std::mt19937_64& rng,
                                              bool real_spectrum = false, int max_attempts = 10000) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Eigen::MatrixXd g = random_graph(N, p, directed, rng);
    const Network net = build_network(g, directed);
    if (!connectivity_check(net).has_spanning_tree) continue;
    if (real_spectrum) {
      try {
        require_real_diagonalizable_spectrum(net);
      } catch (const UnsupportedTopologyError&) {
        continue;
      }
    }
    return g;
  }
  throw std::runtime_error("random_connected_graph: no admissible graph after " +
                           std::to_string(max_attempts) + " draws");
}

}  // namespace qcons

#endif  // QCONS_NETWORK_HPP

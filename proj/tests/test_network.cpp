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
#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "qcons/network.hpp"

namespace {

Eigen::MatrixXd path_graph(int N) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i + 1 < N; ++i) g(i, i + 1) = g(i + 1, i) = 1.0;
  return g;
}

TEST(Network, TwoNodeLaplacian) {
  Eigen::MatrixXd g(2, 2);
  g << 0, 1, 1, 0;
  const auto net = qcons::build_network(g, false);
  EXPECT_NEAR(net.eigenvalues[0].real(), 0.0, 1e-12);
  EXPECT_NEAR(net.eigenvalues[1].real(), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(net.lambda2_real, net.eigenvalues[1].real());
  EXPECT_NEAR(net.psi1.dot(net.phi1), 1.0, 1e-12);
}

TEST(Network, LaplacianRowsSumToZero) {
  std::mt19937_64 rng(3);
  const auto g = qcons::random_graph(7, 0.4, true, rng);
  const auto net = qcons::build_network(g, true);
  EXPECT_LT((net.laplacian * Eigen::VectorXd::Ones(7)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Network, PathGraphSpectrum) {
  const int N = 5;
  const auto net = qcons::build_network(path_graph(N), false);
  for (int k = 0; k < N; ++k) {
    const double expected = 2.0 - 2.0 * std::cos(qcons::kPi * k / N);
    EXPECT_NEAR(net.eigenvalues[k].real(), expected, 1e-12);
    EXPECT_NEAR(net.eigenvalues[k].imag(), 0.0, 1e-12);
  }
}

TEST(Network, RejectsInvalidWeights) {
  Eigen::MatrixXd g = path_graph(3);
  g(0, 1) = -1.0;
  EXPECT_THROW(qcons::build_network(g, true), qcons::NegativeWeightError);
  Eigen::MatrixXd h = path_graph(3);
  h(0, 1) = 2.0;
  EXPECT_THROW(qcons::build_network(h, false), qcons::AsymmetricWeightsError);
}

TEST(Network, DisagreementIsOrthogonalToConsensus) {
  const auto net = qcons::build_network(path_graph(4), false);
  Eigen::VectorXd x(4);
  x << 1, 5, -2, 3;
  const Eigen::VectorXd d = qcons::disagreement(net, x);
  EXPECT_NEAR(d.sum(), 0.0, 1e-12);
  EXPECT_LT(qcons::disagreement(net, Eigen::VectorXd::Constant(4, 2.5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Connectivity, DirectedSpanningTree) {
  // 1 -> 2 -> 3 : node 1 is a root.
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
  g(1, 0) = 1.0;
  g(2, 1) = 1.0;
  const auto net = qcons::build_network(g, true);
  const auto rep = qcons::connectivity_check(net);
  EXPECT_TRUE(rep.has_spanning_tree);
  EXPECT_TRUE(rep.connected_undirected);
  // Left null vector concentrates on the root.
  EXPECT_GT(net.psi1(0), 0.0);
  EXPECT_NEAR(net.psi1(1), 0.0, 1e-9);
}

TEST(Connectivity, DisconnectedGraphHasNoSpanningTree) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
  g(0, 1) = g(1, 0) = 1.0;
  g(2, 3) = g(3, 2) = 1.0;
  const auto net = qcons::build_network(g, false);
  const auto rep = qcons::connectivity_check(net);
  EXPECT_FALSE(rep.has_spanning_tree);
  EXPECT_FALSE(rep.connected_undirected);
}

TEST(Connectivity, TwoRootsHaveNoSpanningTree) {
  // 1 -> 3 <- 2
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
  g(2, 0) = 1.0;
  g(2, 1) = 1.0;
  const auto net = qcons::build_network(g, true);
  EXPECT_FALSE(qcons::connectivity_check(net).has_spanning_tree);
  EXPECT_TRUE(qcons::connectivity_check(net).connected_undirected);
}

TEST(Spectrum, DirectedCycleIsComplexAndRejectedForHighOrder) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
  g(1, 0) = g(2, 1) = g(0, 2) = 1.0;
  const auto net = qcons::build_network(g, true);
  EXPECT_GT(std::abs(net.eigenvalues[1].imag()), 0.1);
  EXPECT_THROW(qcons::require_real_diagonalizable_spectrum(net), qcons::UnsupportedTopologyError);
}

TEST(Spectrum, UndirectedBasisIsOrthonormal) {
  const auto net = qcons::build_network(path_graph(5), false);
  const auto b = qcons::eigen_basis_norms(net);
  EXPECT_TRUE(b.diagonalizable);
  EXPECT_EQ(b.max_block, 1);
  // Orthonormal U: the inverse is the transpose, so its row-sum norm is U's column-sum norm.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(net.laplacian);
  const Eigen::MatrixXd U = es.eigenvectors().cwiseAbs();
  EXPECT_NEAR(b.U_inf, U.rowwise().sum().maxCoeff(), 1e-9);
  EXPECT_NEAR(b.U_inv_inf, U.colwise().sum().maxCoeff(), 1e-9);
}

TEST(EdgeList, ParsesCommentsAndDirection) {
  std::istringstream in("# triangle\n1 2 1.5\n\n2 3 1  # tail comment\n");
  const auto g = qcons::parse_edge_list(in, true);
  ASSERT_EQ(g.rows(), 3);
  EXPECT_EQ(g(1, 0), 1.5);  // node 2 receives from node 1
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(2, 1), 1.0);
}

TEST(EdgeList, UndirectedIsSymmetric) {
  std::istringstream in("1 2 1\n2 3 2\n");
  const auto g = qcons::parse_edge_list(in, false, 4);
  ASSERT_EQ(g.rows(), 4);
  EXPECT_EQ(g(0, 1), g(1, 0));
  EXPECT_EQ(g(2, 1), 2.0);
}

TEST(EdgeList, ReportsLineNumbers) {
  std::istringstream in("1 2 1\n2 x 1\n");
  try {
    qcons::parse_edge_list(in, false);
    FAIL() << "expected ConfigError";
  } catch (const qcons::ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(RandomGraph, SeededAndConnected) {
  std::mt19937_64 a(11), b(11);
  const auto ga = qcons::random_connected_graph(6, 0.5, false, a, true);
  const auto gb = qcons::random_connected_graph(6, 0.5, false, b, true);
  EXPECT_EQ(ga, gb);
  EXPECT_TRUE(qcons::connectivity_check(qcons::build_network(ga, false)).connected_undirected);
}

TEST(RandomGraph, DirectedDrawHasSpanningTree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const auto g = qcons::random_connected_graph(6, 0.4, true, rng);
    EXPECT_TRUE(qcons::connectivity_check(qcons::build_network(g, true)).has_spanning_tree);
  }
}

}  // namespace

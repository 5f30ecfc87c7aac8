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
#ifndef QCONS_CLOSED_LOOP_HPP
#define QCONS_CLOSED_LOOP_HPP

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include "qcons/model.hpp"

namespace qcons {

/// A - lambda K, where K is zero except for its last row, which holds k.
inline Eigen::MatrixXd closed_loop_matrix(const SystemModel<double>& model, const Eigen::VectorXd& k,
                                          double lambda) {
  const int n = model.order();
  if (k.size() != n) throw std::invalid_argument("closed_loop_matrix: gain length must be 2m");
  Eigen::MatrixXd Ai = model.A;
  Ai.row(n - 1) -= lambda * k.transpose();
  return Ai;
}

/// Complex-eigenvalue variant for directed graphs.
inline Eigen::MatrixXcd closed_loop_matrix(const SystemModel<double>& model, const Eigen::VectorXd& k,
                                           std::complex<double> lambda) {
  const int n = model.order();
  if (k.size() != n) throw std::invalid_argument("closed_loop_matrix: gain length must be 2m");
  Eigen::MatrixXcd Ai = model.A.cast<std::complex<double>>();
  Ai.row(n - 1) -= lambda * k.transpose().cast<std::complex<double>>();
  return Ai;
}

/// Spectrum of a closed-loop block.
struct ClosedLoopSpectrum {
  std::vector<std::complex<double>> eigenvalues;
  double radius = 0.0;
  double min_gap = 0.0;  ///< smallest pairwise distance between eigenvalues
  bool ok = true;        ///< false if the eigensolver did not converge
  std::string diagnostic;
};

namespace detail {

inline void finish_spectrum(ClosedLoopSpectrum& out) {
  out.radius = 0.0;
  for (const auto& z : out.eigenvalues) out.radius = std::max(out.radius, std::abs(z));
  out.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < out.eigenvalues.size(); ++a)
    for (std::size_t b = a + 1; b < out.eigenvalues.size(); ++b)
      out.min_gap = std::min(out.min_gap, std::abs(out.eigenvalues[a] - out.eigenvalues[b]));
}

}  // namespace detail

/**
 * Eigenvalues of A - lambda K.
 *
 * The unperturbed A has m-fold eigenvalues, so an O(u) rounding error in a
 * generic eigensolver moves them by O(u^{1/m}). For m >= 2 the solve is done
 * in HighPrecision; m = 1 uses the exact 2x2 quadratic.
 */
inline ClosedLoopSpectrum closed_loop_spectrum(const SystemModel<double>& model, const Eigen::VectorXd& k,
                                               std::complex<double> lambda) {
  ClosedLoopSpectrum out;
  const int n = model.order();
  if (k.size() != n) throw std::invalid_argument("closed_loop_spectrum: gain length must be 2m");
  if (model.m == 1) {
    using C = std::complex<double>;
    const double c = model.A(0, 0);
    const double s = model.A(0, 1);
    const C tr = 2.0 * c - lambda * k(1);
    const C det = C(c * c + s * s) - lambda * (c * k(1) - s * k(0));
    const C disc = std::sqrt(tr * tr - 4.0 * det);
    // Larger-magnitude root first, the other from the product to avoid cancellation.
    const C r1 = (std::abs(tr + disc) >= std::abs(tr - disc)) ? (tr + disc) / 2.0 : (tr - disc) / 2.0;
    const C r2 = std::abs(r1) > 0.0 ? det / r1 : C(0.0);
    out.eigenvalues = {r1, r2};
  } else if (lambda.imag() == 0.0) {
    MatrixX<HighPrecision> Ai = model.A.cast<HighPrecision>();
    for (int col = 0; col < n; ++col) Ai(n - 1, col) -= HighPrecision(lambda.real()) * HighPrecision(k(col));
    Eigen::EigenSolver<MatrixX<HighPrecision>> es(Ai, false);
    if (es.info() != Eigen::Success) {
      out.ok = false;
      out.diagnostic = "eigensolver did not converge";
      return out;
    }
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const auto& z = es.eigenvalues()(i);
      out.eigenvalues.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    }
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(closed_loop_matrix(model, k, lambda), false);
    if (es.info() != Eigen::Success) {
      out.ok = false;
      out.diagnostic = "eigensolver did not converge";
      return out;
    }
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.eigenvalues.push_back(es.eigenvalues()(i));
  }
  detail::finish_spectrum(out);
  return out;
}

/// Spectral radius of A - lambda K; throws ConsistencyError if the eigensolver fails.
inline double spectral_radius(const SystemModel<double>& model, const Eigen::VectorXd& k,
                              std::complex<double> lambda) {
  const auto spec = closed_loop_spectrum(model, k, lambda);
  if (!spec.ok) throw ConsistencyError("spectral_radius: " + spec.diagnostic);
  return spec.radius;
}

}  // namespace qcons

#endif  // QCONS_CLOSED_LOOP_HPP

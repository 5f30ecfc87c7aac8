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
#ifndef QCONS_MODEL_HPP
#define QCONS_MODEL_HPP

#include <Eigen/LU>

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qcons/error.hpp"
#include "qcons/numeric.hpp"

namespace qcons {

/// Smallest |sin(theta)| accepted by build_system.
inline constexpr double kMinAbsSin = 1e-6;

/**
 * @brief Agent dynamics x(t+1) = A x(t) + b u(t), y(t) = x_1(t), and the
 * matrices derived from it.
 *
 * A is the 2m x 2m real Jordan form with m copies of the rotation
 * Q = [[cos, sin], [-sin, cos]] on the diagonal and I_2 above it. The
 * recovery matrix S = A^{2m-1} O^{-1} maps a window of 2m consecutive outputs
 * (oldest first) to the current state, up to the input corrections b_tilde.
 */
template <typename Scalar = double>
struct SystemModel {
  int m = 0;
  double theta = 0.0;
  MatrixX<Scalar> A;
  VectorX<Scalar> b;
  MatrixX<Scalar> O;    ///< rows e_1^T A^k, k = 0..2m-1
  MatrixX<Scalar> S;    ///< A^{2m-1} O^{-1}
  MatrixX<Scalar> S_m;  ///< S without its first row
  VectorX<Scalar> l;    ///< cos S(1,.) + sin S(2,.) + S(3,.)
  /// b_tilde[n-1] multiplies u(t-n) in the state reconstruction, n = 1..2m-1.
  std::vector<VectorX<Scalar>> b_tilde;

  int order() const { return 2 * m; }

  template <typename To>
  SystemModel<To> cast() const {
    SystemModel<To> out;
    out.m = m;
    out.theta = theta;
    out.A = A.template cast<To>();
    out.b = b.template cast<To>();
    out.O = O.template cast<To>();
    out.S = S.template cast<To>();
    out.S_m = S_m.template cast<To>();
    out.l = l.template cast<To>();
    out.b_tilde.reserve(b_tilde.size());
    for (const auto& v : b_tilde) out.b_tilde.push_back(v.template cast<To>());
    return out;
  }
};

namespace detail {

inline void check_model_args(int m, double theta) {
  if (m < 1) throw InvalidOrderError("order parameter m must be >= 1, got " + std::to_string(m));
  if (!(std::abs(std::sin(theta)) >= kMinAbsSin)) {
    throw DegenerateFrequencyError("|sin(theta)| < 1e-6 (theta = " + std::to_string(theta) +
                                   "): observability matrix is singular");
  }
}

}  // namespace detail

/// The real Jordan block A for m pole pairs at e^{+-j theta}.
template <typename Scalar = double>
MatrixX<Scalar> jordan_matrix(int m, double theta) {
  const Scalar c = detail::cos_of<Scalar>(theta);
  const Scalar s = detail::sin_of<Scalar>(theta);
  const int n = 2 * m;
  MatrixX<Scalar> A = MatrixX<Scalar>::Zero(n, n);
  for (int k = 0; k < m; ++k) {
    const int r = 2 * k;
    A(r, r) = c;
    A(r, r + 1) = s;
    A(r + 1, r) = -s;
    A(r + 1, r + 1) = c;
    if (k + 1 < m) {
      A(r, r + 2) = Scalar(1);
      A(r + 1, r + 3) = Scalar(1);
    }
  }
  return A;
}

/// Builds the model entirely in `Scalar` arithmetic.
template <typename Scalar>
SystemModel<Scalar> build_system_in(int m, double theta) {
  detail::check_model_args(m, theta);
  const int n = 2 * m;

  SystemModel<Scalar> model;
  model.m = m;
  model.theta = theta;
  model.A = jordan_matrix<Scalar>(m, theta);
  model.b = VectorX<Scalar>::Zero(n);
  model.b(n - 1) = Scalar(1);

  // powers[k] = A^k, k = 0..2m-1
  std::vector<MatrixX<Scalar>> powers;
  powers.reserve(n);
  powers.push_back(MatrixX<Scalar>::Identity(n, n));
  for (int k = 1; k < n; ++k) powers.push_back(powers.back() * model.A);

  model.O.resize(n, n);
  for (int k = 0; k < n; ++k) model.O.row(k) = powers[k].row(0);

  const Scalar c = detail::cos_of<Scalar>(theta);
  const Scalar s = detail::sin_of<Scalar>(theta);
  if (m == 1) {
    // Two-step observer of the harmonic oscillator.
    model.S.resize(2, 2);
    model.S << Scalar(0), Scalar(1), -Scalar(1) / s, c / s;
  } else {
    // S O = A^{2m-1}  <=>  O^T S^T = (A^{2m-1})^T
    Eigen::FullPivLU<MatrixX<Scalar>> lu(model.O.transpose());
    if (!lu.isInvertible()) {
      throw DegenerateFrequencyError("observability matrix is singular at theta = " +
                                     std::to_string(theta));
    }
    model.S = lu.solve(powers[n - 1].transpose()).transpose();
  }
  model.S_m = model.S.bottomRows(n - 1);

  model.l = c * model.S.row(0).transpose() + s * model.S.row(1).transpose();
  if (m >= 2) model.l += model.S.row(2).transpose();

  // b_n(k) = A^{k-(2m+1-n)}(1, 2m) for k >= 2m+1-n (1-based), zero above.
  model.b_tilde.reserve(n - 1);
  for (int idx = 1; idx <= n - 1; ++idx) {
    VectorX<Scalar> bn = VectorX<Scalar>::Zero(n);
    for (int k = n + 1 - idx; k <= n; ++k) bn(k - 1) = powers[k - (n + 1 - idx)](0, n - 1);
    model.b_tilde.push_back(-(model.S * bn) + powers[idx - 1].col(n - 1));
  }
  return model;
}

/// Double-precision model. O^{-1} loses roughly log10(cond O) digits and cond O
/// reaches 1e15 for m = 6, so the construction runs in HighPrecision and is
/// rounded once at the end.
inline SystemModel<double> build_system(int m, double theta) {
  return build_system_in<HighPrecision>(m, theta).template cast<double>();
}

/// Closed-form row combination: l_k = (-1)^{k-1} sum_h C(m,k-2h) C(m-(k-2h),h) (2cos)^{k-2h}.
inline Eigen::VectorXd l_closed_form(int m, double theta) {
  if (m < 1) throw InvalidOrderError("order parameter m must be >= 1, got " + std::to_string(m));
  const double two_cos = 2.0 * std::cos(theta);
  Eigen::VectorXd l(2 * m);
  for (int k = 0; k < 2 * m; ++k) {
    double sum = 0.0;
    for (int h = 0; h <= k / 2; ++h) {
      const int p = k - 2 * h;
      if (p > m) continue;
      const auto coeff = binomial(m, p) * binomial(m - p, h);
      sum += static_cast<double>(coeff) * std::pow(two_cos, p);
    }
    l(k) = (k % 2 == 1) ? sum : -sum;
  }
  return l;
}

/// cos S(1,.) + sin S(2,.) + S(3,.) evaluated from the model's S (S(3,.) omitted for m = 1).
template <typename Scalar>
VectorX<Scalar> l_direct(const SystemModel<Scalar>& model) {
  const Scalar c = detail::cos_of<Scalar>(model.theta);
  const Scalar s = detail::sin_of<Scalar>(model.theta);
  VectorX<Scalar> l = c * model.S.row(0).transpose() + s * model.S.row(1).transpose();
  if (model.m >= 2) l += model.S.row(2).transpose();
  return l;
}

/// Direct combination evaluated in HighPrecision and rounded once. Entries of
/// S grow like 1/sin^{2m-1} while l stays O(4^m), so combining the
/// double-rounded rows cancels up to ~7 digits at |sin| = 0.05, m = 6.
inline Eigen::VectorXd l_direct(int m, double theta) {
  return l_direct(build_system_in<HighPrecision>(m, theta)).template cast<double>();
}

/// [2(1 + |cos theta|)]^m - 1, the value of sum_k |l_k|.
inline double l_abs_sum_identity(int m, double theta) {
  return std::pow(2.0 * (1.0 + std::abs(std::cos(theta))), m) - 1.0;
}

/**
 * Current state from the last 2m outputs and 2m-1 inputs.
 *
 * @param outputs y(t-2m+1), ..., y(t)  (oldest first)
 * @param inputs  u(t-2m+1), ..., u(t-1)  (oldest first)
 */
template <typename Scalar>
VectorX<Scalar> reconstruct_state(const SystemModel<Scalar>& model, std::span<const Scalar> outputs,
                                  std::span<const Scalar> inputs) {
  const int n = model.order();
  if (static_cast<int>(outputs.size()) != n || static_cast<int>(inputs.size()) != n - 1) {
    throw WindowMismatchError("reconstruct_state: expected " + std::to_string(n) + " outputs and " +
                              std::to_string(n - 1) + " inputs, got " +
                              std::to_string(outputs.size()) + " and " + std::to_string(inputs.size()));
  }
  VectorX<Scalar> window(n);
  for (int k = 0; k < n; ++k) window(k) = outputs[k];
  VectorX<Scalar> x = model.S * window;
  for (int idx = 1; idx <= n - 1; ++idx) x += model.b_tilde[idx - 1] * inputs[n - 1 - idx];
  return x;
}

}  // namespace qcons

#endif  // QCONS_MODEL_HPP

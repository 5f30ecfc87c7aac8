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
#ifndef QCONS_NUMERIC_HPP
#define QCONS_NUMERIC_HPP

// Scalar types, Eigen aliases and small exact-arithmetic helpers shared by
// every module.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qcons {

/// 50 decimal digits. Used where double loses too much to conditioning:
/// the observability inverse for large m and near-defective eigenproblems.
using HighPrecision = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                                    boost::multiprecision::et_off>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kPi = std::numbers::pi;

namespace detail {

template <typename Scalar>
Scalar sin_of(double theta) {
  using std::sin;
  return sin(Scalar(theta));
}

template <typename Scalar>
Scalar cos_of(double theta) {
  using std::cos;
  return cos(Scalar(theta));
}

template <typename Scalar>
double to_double(const Scalar& v) {
  return static_cast<double>(v);
}

}  // namespace detail

/// Exact binomial coefficient C(n, k); 0 when k < 0 or k > n.
/// Throws std::overflow_error if the value does not fit in 64 bits.
inline std::uint64_t binomial(int n, int k) {
  if (n < 0) throw std::invalid_argument("binomial: negative n");
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) is always divisible by i; divide by the gcd first
    // so the intermediate product stays as small as possible.
    std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    std::uint64_t den = static_cast<std::uint64_t>(i);
    std::uint64_t g = std::gcd(result, den);
    result /= g;
    den /= g;
    num /= den;  // den now divides num
    std::uint64_t next = 0;
    if (__builtin_mul_overflow(result, num, &next)) {
      throw std::overflow_error("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                                ") overflows 64 bits");
    }
    result = next;
  }
  return result;
}

/// Smallest integer >= x, treating values within `snap` of an integer as that integer.
/// Guards ceilings of analytic bounds against last-bit noise (e.g. cos(pi/3)).
inline long long snapped_ceil(double x, double snap = 1e-9) {
  const double r = std::round(x);
  if (std::abs(x - r) <= snap) return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(x));
}

/// Infinity norm (max absolute row sum) of a dense matrix.
template <typename Derived>
auto inf_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace qcons

#endif  // QCONS_NUMERIC_HPP

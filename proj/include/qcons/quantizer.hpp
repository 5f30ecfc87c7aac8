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
#ifndef QCONS_QUANTIZER_HPP
#define QCONS_QUANTIZER_HPP

#include <cmath>
#include <stdexcept>

#include "qcons/numeric.hpp"

namespace qcons {

/**
 * Symmetric uniform quantizer with 2M+1 levels {-M, ..., M}.
 *
 * 0 on (-1/2, 1/2); j on [(2j-1)/2, (2j+1)/2); M for y >= (2M-1)/2; odd.
 * Half-integers round away from zero. NaN maps to 0.
 */
inline int quantize(double y, int M) {
  if (M < 1) throw std::invalid_argument("quantize: M must be >= 1");
  const double a = std::abs(y);
  if (!(a >= 0.5)) return 0;
  int level = 0;
  if (a >= static_cast<double>(M) - 0.5) {
    level = M;
  } else {
    // a < M - 1/2 fits in an int; floor and the fractional part are exact.
    const double whole = std::floor(a);
    level = static_cast<int>(whole) + ((a - whole) >= 0.5 ? 1 : 0);
  }
  return y < 0.0 ? -level : level;
}

/// True when |y| exceeds the unsaturated range, i.e. |quantize(y) - y| > 1/2.
inline bool saturates(double y, int M) { return !(std::abs(y) <= static_cast<double>(M) + 0.5); }

/// ceil(log2(2M)): bits per transmitted nonzero symbol.
inline int bits_for_levels(int M) {
  if (M < 1) throw std::invalid_argument("bits_for_levels: M must be >= 1");
  int bits = 0;
  long long capacity = 1;
  while (capacity < 2LL * M) {
    capacity *= 2;
    ++bits;
  }
  return bits;
}

/// Right-hand side of the steady-phase level condition:
/// |cos| + 1/2 for m = 1, 2^{m-1}(1+|cos|)^m - 1/2 for m >= 2.
inline double steady_level_bound(int m, double theta) {
  const double ac = std::abs(std::cos(theta));
  if (m == 1) return ac + 0.5;
  return std::pow(2.0, m - 1) * std::pow(1.0 + ac, m) - 0.5;
}

/// Two-phase level schedule: M_initial for t <= 2m, M_steady afterwards.
struct LevelSchedule {
  int m = 1;
  double theta = 0.0;
  int M_initial = 1;
  int M_steady = 1;
  int bits = 1;

  int levels_at(long t) const { return t <= 2L * m ? M_initial : M_steady; }
  /// Whether both phases satisfy the level conditions that guarantee convergence.
  bool meets_bounds() const {
    return M_initial >= 1 && static_cast<double>(M_steady) >= steady_level_bound(m, theta) - 1e-9;
  }
};

/// Smallest schedule meeting the level conditions; bits = ceil(log2(2 M_steady)).
inline LevelSchedule minimal_schedule(int m, double theta) {
  if (m < 1) throw std::invalid_argument("minimal_schedule: m must be >= 1");
  LevelSchedule s;
  s.m = m;
  s.theta = theta;
  s.M_initial = 1;
  s.M_steady = static_cast<int>(std::max(1LL, snapped_ceil(steady_level_bound(m, theta))));
  s.bits = bits_for_levels(s.M_steady);
  return s;
}

/// Schedule with explicit levels; bits follow the larger of the two phases.
inline LevelSchedule fixed_schedule(int m, double theta, int M_initial, int M_steady) {
  if (M_initial < 1 || M_steady < 1) throw std::invalid_argument("levels must be >= 1");
  LevelSchedule s;
  s.m = m;
  s.theta = theta;
  s.M_initial = M_initial;
  s.M_steady = M_steady;
  s.bits = bits_for_levels(std::max(M_initial, M_steady));
  return s;
}

}  // namespace qcons

#endif  // QCONS_QUANTIZER_HPP

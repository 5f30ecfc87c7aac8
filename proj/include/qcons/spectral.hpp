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
#ifndef QCONS_SPECTRAL_HPP
#define QCONS_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "qcons/closed_loop.hpp"
#include "qcons/gains.hpp"

namespace qcons {

/// Smallest probe epsilon accepted by the expansion check.
inline constexpr double kMinProbeEpsilon = 1e-6;
/// Eigenvalues closer than this count as repeated.
inline constexpr double kDistinctGap = 1e-10;

/// First-order coefficient of rho(eps) = 1 + slope * eps + o(eps).
inline double predicted_slope(const Coefficients& co, std::complex<double> lambda) {
  const double s = std::sin(co.theta);
  const double c = std::cos(co.theta);
  if (co.m == 1) return -0.5 * lambda.real() * (co.c(1) * c - co.c(0) * s);
  if (co.m == 2) return 0.5 * lambda.real() * co.R;
  double best = lambda.real() * co.R + co.H;
  for (const auto& v : co.roots) best = std::max(best, 2.0 * std::real(v * std::polar(1.0, -co.theta)));
  return 0.5 * best;
}

struct SpectralReport {
  int m = 1;
  double theta = 0.0;
  std::complex<double> lambda;
  std::vector<double> epsilons;
  std::vector<double> radii;
  std::vector<double> min_gaps;
  double slope_fit = 0.0;
  double predicted_slope = 0.0;
  bool eigen_distinct = true;
  bool ok = true;
  std::string diagnostic;

  double relative_slope_error() const {
    return std::abs(slope_fit - predicted_slope) / std::max(std::abs(predicted_slope), 1e-300);
  }
  /// rho < 1 - eps/2 at every probe.
  bool below_threshold() const {
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (!(radii[i] < 1.0 - epsilons[i] / 2.0)) return false;
    return true;
  }
};

/**
 * Probes rho(eps) of A - lambda K(eps) along a decreasing list of epsilons and
 * fits the slope as the mean of (rho - 1)/eps. An eigensolver failure is
 * reported through `ok`/`diagnostic` rather than thrown.
 */
inline SpectralReport radius_expansion_check(const SystemModel<double>& model, const Coefficients& co,
                                             std::complex<double> lambda, const std::vector<double>& epsilons) {
  if (epsilons.empty()) throw std::invalid_argument("radius_expansion_check: no probes");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] >= kMinProbeEpsilon)) {
      throw std::invalid_argument("radius_expansion_check: probes must be >= 1e-6");
    }
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw std::invalid_argument("radius_expansion_check: probes must be strictly decreasing");
    }
  }
  SpectralReport rep;
  rep.m = model.m;
  rep.theta = model.theta;
  rep.lambda = lambda;
  rep.epsilons = epsilons;
  rep.predicted_slope = predicted_slope(co, lambda);
  double sum = 0.0;
  for (const double eps : epsilons) {
    const auto spec = closed_loop_spectrum(model, graded_gains(co.c, eps), lambda);
    if (!spec.ok) {
      rep.ok = false;
      rep.diagnostic = "eps=" + std::to_string(eps) + ": " + spec.diagnostic;
      rep.radii.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.min_gaps.push_back(0.0);
      continue;
    }
    rep.radii.push_back(spec.radius);
    rep.min_gaps.push_back(spec.min_gap);
    if (!(spec.min_gap > kDistinctGap)) rep.eigen_distinct = false;
    sum += (spec.radius - 1.0) / eps;
  }
  rep.slope_fit = rep.ok ? sum / static_cast<double>(epsilons.size()) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

inline void write_spectral_csv_header(std::ostream& os) {
  os << "m,theta,lambda,epsilon,rho,predicted_rho,slope_fit,predicted_slope\n";
}

/// One row per probe.
inline void write_spectral_csv_rows(std::ostream& os, const SpectralReport& r) {
  os << std::setprecision(12);
  for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
    os << r.m << ',' << r.theta << ',' << r.lambda.real() << ',' << r.epsilons[i] << ',' << r.radii[i] << ','
       << 1.0 + r.predicted_slope * r.epsilons[i] << ',' << r.slope_fit << ',' << r.predicted_slope << '\n';
  }
}

// ---------------------------------------------------------------------------
// Entrywise power bounds
// ---------------------------------------------------------------------------

struct PowerBoundReport {
  double lambda = 0.0;
  double epsilon = 0.0;
  double rho = 0.0;
  std::vector<double> constants;    ///< M_1..M_m
  std::vector<double> worst_ratio;  ///< max observed / bound per pair j
  std::vector<long> worst_step;     ///< s at which the worst ratio occurred
};

/**
 * Compares |(A_i^s xi)_{2j-1}|, |(A_i^s xi)_{2j}| with
 * ||xi|| M_j rho^s eps^{e_j} for s = 0..s_max over random xi of unit
 * infinity norm (plus the zero vector when trials == 0).
 */
inline PowerBoundReport power_bound_check(const SystemModel<double>& model, const Coefficients& co, double lambda,
                                          double epsilon, long s_max, int trials, std::uint64_t seed) {
  const int m = model.m;
  const int n = model.order();
  PowerBoundReport rep;
  rep.lambda = lambda;
  rep.epsilon = epsilon;
  rep.constants = power_bound_constants(co, lambda);
  rep.worst_ratio.assign(m, 0.0);
  rep.worst_step.assign(m, 0);
  const Eigen::VectorXd k = graded_gains(co.c, epsilon);
  rep.rho = spectral_radius(model, k, lambda);
  const Eigen::MatrixXd Ai = closed_loop_matrix(model, k, lambda);

  std::vector<double> scale(m);
  for (int j = 1; j <= m; ++j) scale[j - 1] = rep.constants[j - 1] * std::pow(epsilon, power_bound_exponent(m, j));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd xi(n);
    for (int r = 0; r < n; ++r) xi(r) = unif(rng);
    xi /= xi.cwiseAbs().maxCoeff();
    const double norm = 1.0;
    double rho_s = 1.0;
    for (long s = 0; s <= s_max; ++s) {
      for (int j = 1; j <= m; ++j) {
        const double entry = std::max(std::abs(xi(2 * j - 2)), std::abs(xi(2 * j - 1)));
        const double ratio = entry / (norm * scale[j - 1] * rho_s);
        if (ratio > rep.worst_ratio[j - 1]) {
          rep.worst_ratio[j - 1] = ratio;
          rep.worst_step[j - 1] = s;
        }
      }
      xi = Ai * xi;
      rho_s *= rep.rho;
    }
  }
  return rep;
}

}  // namespace qcons

#endif  // QCONS_SPECTRAL_HPP

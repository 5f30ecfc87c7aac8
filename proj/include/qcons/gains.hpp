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
#ifndef QCONS_GAINS_HPP
#define QCONS_GAINS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qcons/closed_loop.hpp"
#include "qcons/error.hpp"
#include "qcons/model.hpp"
#include "qcons/network.hpp"

namespace qcons {

/// Feedback coefficients before epsilon grading, with the quantities that
/// predict the closed-loop decay rate.
struct Coefficients {
  int m = 1;
  double theta = 0.0;
  double h = 1.0;
  Eigen::VectorXd c;
  double R = 0.0;  ///< 1/2 + 1/2 (c_{2m-1} sin - c_{2m} cos); 0 for m = 1
  double H = 0.0;  ///< zero for m <= 2
  std::vector<std::complex<double>> roots;  ///< m - 2 roots of the low-order polynomial
};

/// Coefficients of e^{2 theta j} prod_{k=1}^{m-2} (v + k e^{theta j}), lowest power first.
inline std::vector<std::complex<double>> low_order_polynomial(int m, double theta) {
  const std::complex<double> rot = std::polar(1.0, theta);
  std::vector<std::complex<double>> poly{std::polar(1.0, 2.0 * theta)};
  for (int k = 1; k <= m - 2; ++k) {
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i] * (static_cast<double>(k) * rot);
      next[i + 1] += poly[i];
    }
    poly = std::move(next);
  }
  return poly;
}

/// sum_{j=1}^{m-1} (c_{2j} - c_{2j-1} i) v^{j-1}.
inline std::complex<double> coefficient_polynomial(const Eigen::VectorXd& c, std::complex<double> v) {
  const int m = static_cast<int>(c.size()) / 2;
  std::complex<double> acc = 0.0;
  for (int j = m - 1; j >= 1; --j) acc = acc * v + std::complex<double>(c(2 * j - 1), -c(2 * j - 2));
  return acc;
}

/// Re[(c_{2m-5} i - c_{2m-4}) / (c_{2m-3} i - c_{2m-2}) e^{-i theta}] for m >= 3.
inline double h_from_coefficients(const Eigen::VectorXd& c, double theta) {
  const int m = static_cast<int>(c.size()) / 2;
  if (m < 3) return 0.0;
  const std::complex<double> num(-c(2 * m - 5), c(2 * m - 6));
  const std::complex<double> den(-c(2 * m - 3), c(2 * m - 4));
  return std::real(num / den * std::polar(1.0, -theta));
}

/// 1/2 + 1/2 (c_{2m-1} sin - c_{2m} cos).
inline double r_from_coefficients(const Eigen::VectorXd& c, double theta) {
  const int m = static_cast<int>(c.size()) / 2;
  return 0.5 + 0.5 * (c(2 * m - 2) * std::sin(theta) - c(2 * m - 1) * std::cos(theta));
}

/**
 * Coefficient recipe with design parameter h in (0, lambda_2].
 *
 * m = 1: c = [-sin/h, cos/h].
 * m = 2: c = [-sin 2t, cos 2t, -(4/h+1) sin, (4/h+1) cos].
 * m >= 3: pairs 1..m-1 from the polynomial with roots -(n-2) e^{i theta};
 *         top pair scaled by (2H+4)/h + 1 with H = (m-1)(m-2)/2.
 */
inline Coefficients select_coefficients(int m, double theta, double h) {
  detail::check_model_args(m, theta);
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("select_coefficients: h must be positive");
  Coefficients out;
  out.m = m;
  out.theta = theta;
  out.h = h;
  out.c = Eigen::VectorXd::Zero(2 * m);
  const double s = std::sin(theta);
  const double co = std::cos(theta);
  if (m == 1) {
    out.c << -s / h, co / h;
    return out;
  }
  const auto poly = low_order_polynomial(m, theta);
  for (int j = 1; j <= m - 1; ++j) {
    out.c(2 * j - 1) = poly[j - 1].real();
    out.c(2 * j - 2) = -poly[j - 1].imag();
  }
  out.H = m >= 3 ? 0.5 * (m - 1) * (m - 2) : 0.0;
  const double f = (2.0 * out.H + 4.0) / h + 1.0;
  out.c(2 * m - 2) = -f * s;
  out.c(2 * m - 1) = f * co;
  out.R = r_from_coefficients(out.c, theta);
  for (int n = 3; n <= m; ++n) out.roots.push_back(-static_cast<double>(n - 2) * std::polar(1.0, theta));
  return out;
}

/// k_{2j-1,2j} = c_{2j-1,2j} eps^{m-j} for j < m and c eps for j = m.
inline Eigen::VectorXd graded_gains(const Eigen::VectorXd& c, double epsilon) {
  const int m = static_cast<int>(c.size()) / 2;
  Eigen::VectorXd k(c.size());
  for (int j = 1; j <= m; ++j) {
    const double w = j < m ? std::pow(epsilon, m - j) : epsilon;
    k(2 * j - 2) = c(2 * j - 2) * w;
    k(2 * j - 1) = c(2 * j - 1) * w;
  }
  return k;
}

/// Default h: lambda_2 for m >= 2, Re(lambda_2)/2 for m = 1.
inline double default_h(int m, const Network& net) {
  if (net.N < 2) throw std::invalid_argument("default_h: network needs at least two agents");
  return m == 1 ? 0.5 * net.eigenvalues[1].real() : net.eigenvalues[1].real();
}

/// Entrywise power-bound constants M_1..M_m for eigenvalue lambda.
inline std::vector<double> power_bound_constants(const Coefficients& co, double lambda) {
  const int m = co.m;
  if (m < 2) throw InvalidOrderError("power bounds are defined for m >= 2");
  if (!(lambda > 0.0)) throw std::invalid_argument("power_bound_constants: lambda must be positive");
  std::vector<double> M(m, 0.0);
  auto root_sum = [&](int power) {
    double acc = 0.0;
    for (std::size_t n = 0; n < co.roots.size(); ++n) {
      double prod = 1.0;
      for (std::size_t k = 0; k < co.roots.size(); ++k)
        if (k != n) prod *= std::abs(co.roots[k] - co.roots[n]);
      acc += std::pow(std::abs(co.roots[n]), power) / prod;
    }
    return acc;
  };
  for (int j = 1; j <= m - 3; ++j) M[j - 1] = 5.0 / (2.0 * lambda) * root_sum(j - 1);
  if (m >= 3) M[m - 3] = 5.0 / (2.0 * lambda) * (root_sum(m - 3) + 1.0);
  M[m - 2] = 3.0 / std::sqrt(2.0 * lambda);
  M[m - 1] = 2.5;
  return M;
}

/// Power of epsilon in the entry bound for pair j: j-(m-1) below m-1, (j-m)/2 for the top two.
inline double power_bound_exponent(int m, int j) {
  return j <= m - 2 ? static_cast<double>(j - (m - 1)) : 0.5 * static_cast<double>(j - m);
}

// ---------------------------------------------------------------------------
// Feasibility
// ---------------------------------------------------------------------------

struct FeasibilityEntry {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double margin() const { return rhs - lhs; }
};

/// Constants gating the epsilon search. Fields not used by the current order stay zero.
struct DesignConstants {
  double U_inf = 0.0;
  double U_inv_inf = 0.0;
  int N_max = 1;
  // m = 1
  double C0 = 0.0;
  double Lambda = 0.0;
  std::vector<double> C_chain;
  double C_bar = 0.0;
  // m >= 2
  double b_star = 0.0;
  double c_star = 0.0;
  std::vector<double> Lambda_i;
  double S_inf = 0.0;
};

struct FeasibilityReport {
  std::vector<FeasibilityEntry> entries;
  bool feasible() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
  }
  const FeasibilityEntry* first_failure() const {
    for (const auto& e : entries)
      if (!e.pass) return &e;
    return nullptr;
  }
};

/// One "id: lhs= rhs= margin= status=" line per entry.
inline void write_report(std::ostream& os, const FeasibilityReport& r) {
  for (const auto& e : r.entries) {
    os << e.id << ": lhs=" << std::setprecision(10) << e.lhs << " rhs=" << e.rhs << " margin=" << e.margin()
       << " status=" << (e.pass ? "pass" : "fail") << '\n';
  }
}

struct EpsilonOptions {
  double start = 0.1;
  int max_halvings = 60;
  /// Use the uniform (stronger, eigenvalue-free) form of the entry-bound ratio condition.
  bool strengthened = false;
  /// Evaluate the report at this epsilon instead of searching.
  std::optional<double> forced;
};

/**
 * @brief A complete gain design: coefficients, graded gains, epsilon, gamma.
 */
struct GainPlan {
  int m = 1;
  double theta = 0.0;
  double h = 1.0;
  Eigen::VectorXd c;
  Eigen::VectorXd k;
  double epsilon = 0.0;
  double gamma = 1.0;
  double R = 0.0;
  double H = 0.0;
  std::vector<std::complex<double>> roots;
  DesignConstants constants;
  FeasibilityReport feasibility;
  std::vector<double> radii;  ///< closed-loop spectral radius per nonzero eigenvalue
  bool searched = false;      ///< false when epsilon was forced
};

namespace detail {

inline DesignConstants design_constants(const SystemModel<double>& model, const Coefficients& co,
                                        const Network& net) {
  DesignConstants k;
  const int m = model.m;
  const auto basis = eigen_basis_norms(net);
  k.U_inf = basis.U_inf;
  k.U_inv_inf = basis.U_inv_inf;
  k.N_max = basis.max_block;
  const auto nz = nonzero_eigenvalues(net);
  if (m == 1) {
    const double c1 = std::abs(co.c(0));
    const double c2 = std::abs(co.c(1));
    k.C0 = 0.5 * c1 + 1.5 * std::abs(co.c(1) / std::sin(model.theta));
    for (const auto& z : nz) k.Lambda = std::max(k.Lambda, std::abs(z));
    k.C_chain.push_back(k.U_inv_inf + 2.0 * k.C0 * k.Lambda * k.U_inf);
    for (int i = 2; i <= k.N_max; ++i) {
      k.C_chain.push_back(k.U_inv_inf + 2.0 * k.C0 * (k.Lambda + 1.0) * k.U_inf +
                          10.0 * (c1 + c2) * k.C_chain.back());
    }
    k.C_bar = 5.0 * (c1 + c2) * k.C_chain.back() + k.C0 * k.U_inf;
    return k;
  }
  for (const auto& v : model.b_tilde) k.b_star = std::max(k.b_star, v.cwiseAbs().maxCoeff());
  k.c_star = co.c.cwiseAbs().maxCoeff();
  for (const auto& z : nz) {
    const double l = z.real();
    k.Lambda_i.push_back(std::max(std::sqrt(l), std::pow(l, 1.5)));
    k.Lambda = std::max(k.Lambda, k.Lambda_i.back());
  }
  k.S_inf = inf_norm(model.S);
  k.C_bar = 9.0 / std::sqrt(2.0) * (k.U_inv_inf + 5.0 * k.c_star * m * net.N * (k.S_inf + 2.0));
  return k;
}

/// min over n = 1..m-2 of (n-1)! (m-2-n)!.
inline double min_factorial_product(int m) {
  double best = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= m - 2; ++n) best = std::min(best, std::tgamma(n) * std::tgamma(m - 1 - n));
  return std::isfinite(best) ? best : 1.0;
}

inline void add(FeasibilityReport& r, std::string id, double lhs, double rhs) {
  r.entries.push_back({std::move(id), lhs, rhs, lhs <= rhs});
}

inline FeasibilityReport evaluate_at(const SystemModel<double>& model, const Coefficients& co, const Network& net,
                                     const DesignConstants& k, double eps, bool strengthened,
                                     std::vector<double>* radii) {
  FeasibilityReport r;
  const int m = model.m;
  const int N = net.N;
  const double g = 1.0 - eps / 4.0;
  const double ac = std::abs(std::cos(model.theta));
  const double csc = 1.0 / std::abs(std::sin(model.theta));
  const auto nz = nonzero_eigenvalues(net);
  if (m == 1) {
    add(r, "coupling_step", (k.Lambda + 1.0) * k.C_bar * eps, 0.5 * g * csc * k.U_inf);
    add(r, "level_growth", (2.0 * ac + 1.0 / g) / g, 2.0 * ac + 1.5);
    add(r, "coupling_network", (N - 1) * k.C_bar * (k.Lambda + 1.0) * eps, 0.25 * csc * g * g * g);
  } else {
    const double se = std::sqrt(eps);
    if (strengthened) {
      double lam_max = 0.0;
      double lam_min = std::numeric_limits<double>::infinity();
      for (const auto& z : nz) {
        lam_max = std::max(lam_max, z.real());
        lam_min = std::min(lam_min, z.real());
      }
      double sum = 0.0;
      for (int j = 1; j <= m - 2; ++j)
        for (int n = 1; n <= m - 2; ++n) sum += std::pow(n, j - 1);
      sum /= min_factorial_product(m);
      add(r, "entry_bound_ratio_uniform", 5.0 * k.c_star * (sum + 1.0 + lam_max) * se,
          3.0 * std::sqrt(lam_min / 2.0));
    } else {
      for (std::size_t i = 0; i < nz.size(); ++i) {
        const auto M = power_bound_constants(co, nz[i].real());
        double sum = 0.0;
        for (int j = 1; j <= m; ++j)
          if (j != m - 1) sum += M[j - 1];
        add(r, "entry_bound_ratio[" + std::to_string(i + 2) + "]", 2.0 * k.c_star * sum * se, M[m - 2]);
      }
    }
    add(r, "level_growth", model.l.cwiseAbs().sum() / std::pow(g, 2 * m),
        std::pow(2.0 * (1.0 + ac), m) - 0.5);
    add(r, "coupling_network", (2 * m - 1) * k.b_star * (N - 1) * k.Lambda * k.C_bar * se,
        std::pow(g, 4 * m - 1) / 8.0);
  }
  const Eigen::VectorXd gains = graded_gains(co.c, eps);
  if (radii) radii->clear();
  for (std::size_t i = 0; i < nz.size(); ++i) {
    const auto spec = closed_loop_spectrum(model, gains, nz[i]);
    const double rho = spec.ok ? spec.radius : std::numeric_limits<double>::infinity();
    if (radii) radii->push_back(rho);
    add(r, "spectral_radius[" + std::to_string(i + 2) + "]", rho, 1.0 - eps / 2.0);
    r.entries.back().pass = rho < 1.0 - eps / 2.0;
  }
  return r;
}

}  // namespace detail

/**
 * Chooses epsilon by halving from `opts.start` until every inequality and the
 * spectral condition rho_i < 1 - eps/2 hold, then sets gamma = 1 - eps/4.
 * With `opts.forced` the report is evaluated once and returned as is.
 *
 * @throws UnsupportedTopologyError for m >= 2 on a complex or defective spectrum
 * @throws InfeasibleError when the halvings run out
 */
inline GainPlan design_gains(const SystemModel<double>& model, const Network& net, double h,
                             const EpsilonOptions& opts = {}) {
  if (net.N < 2) throw std::invalid_argument("design_gains: network needs at least two agents");
  if (model.m >= 2) require_real_diagonalizable_spectrum(net);
  if (!connectivity_check(net).has_spanning_tree) {
    throw UnsupportedTopologyError("graph has no spanning tree; consensus is impossible");
  }
  const Coefficients co = select_coefficients(model.m, model.theta, h);
  GainPlan plan;
  plan.m = model.m;
  plan.theta = model.theta;
  plan.h = h;
  plan.c = co.c;
  plan.R = co.R;
  plan.H = co.H;
  plan.roots = co.roots;
  plan.constants = detail::design_constants(model, co, net);

  auto finish = [&](double eps) {
    plan.epsilon = eps;
    plan.gamma = 1.0 - eps / 4.0;
    plan.k = graded_gains(co.c, eps);
  };
  if (opts.forced) {
    const double eps = *opts.forced;
    if (!(eps > 0.0 && eps < 4.0)) throw std::invalid_argument("forced epsilon must lie in (0, 4)");
    plan.feasibility = detail::evaluate_at(model, co, net, plan.constants, eps, opts.strengthened, &plan.radii);
    finish(eps);
    return plan;
  }
  plan.searched = true;
  double eps = opts.start;
  FeasibilityReport last;
  for (int step = 0; step <= opts.max_halvings; ++step, eps *= 0.5) {
    std::vector<double> radii;
    last = detail::evaluate_at(model, co, net, plan.constants, eps, opts.strengthened, &radii);
    if (last.feasible()) {
      plan.feasibility = std::move(last);
      plan.radii = std::move(radii);
      finish(eps);
      return plan;
    }
  }
  const auto* f = last.first_failure();
  throw InfeasibleError("no feasible epsilon after " + std::to_string(opts.max_halvings) +
                        " halvings; first failing condition: " + (f ? f->id : std::string("?")));
}

/// Convenience overload using the default h for the network.
inline GainPlan design_gains(const SystemModel<double>& model, const Network& net, const EpsilonOptions& opts = {}) {
  return design_gains(model, net, default_h(model.m, net), opts);
}

/// Smallest admissible initial scale for state bound c_star and disagreement
/// bound c_delta_star: max(4 c_star / (3 gamma), c_delta_star) for m = 1 and
/// (sqrt2 + 1)^{2m} max(c_star, c_delta_star) for m >= 2.
inline double p0_minimum(int m, double gamma, double c_star, double c_delta_star) {
  if (m < 1) throw InvalidOrderError("order parameter m must be >= 1, got " + std::to_string(m));
  if (!(c_star > 0.0) || !(c_delta_star > 0.0)) {
    throw NonpositiveBoundError("state and disagreement bounds must be positive");
  }
  if (m == 1) {
    if (!(gamma > 0.0)) throw std::invalid_argument("p0_minimum: gamma must be positive");
    return std::max(4.0 * c_star / (3.0 * gamma), c_delta_star);
  }
  return std::pow(std::sqrt(2.0) + 1.0, 2 * m) * std::max(c_star, c_delta_star);
}

}  // namespace qcons

#endif  // QCONS_GAINS_HPP

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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qcons/qcons.hpp"

namespace {

using qcons::kPi;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

qcons::Scenario second_order_scenario(std::uint64_t seed) {
  qcons::Scenario sc;
  sc.m = 2;
  sc.theta = kPi / 3.0;
  sc.source = "random";
  sc.nodes = 5;
  sc.probability = 0.5;
  sc.directed = false;
  sc.epsilon = 0.01;
  sc.gamma = 0.9975;
  sc.p0 = 10.0;
  sc.M_initial = 1;
  sc.M_steady = 4;
  sc.horizon = 6000;
  sc.seed = seed;
  return sc;
}

qcons::Scenario harmonic_directed_scenario(std::uint64_t seed) {
  qcons::Scenario sc;
  sc.m = 1;
  sc.theta = kPi / 4.0;
  sc.source = "random";
  sc.nodes = 6;
  sc.probability = 0.5;
  sc.directed = true;
  sc.epsilon = 0.01;
  sc.horizon = 8000;
  sc.seed = seed;
  return sc;
}

// 1. Second-order network reproduction.
Outcome criterion_network_reproduction() {
  Outcome out{true, ""};
  double worst_ratio = 0.0, worst_time = 0.0;
  long saturations = 0;
  int bits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t0 = Clock::now();
    const auto r = qcons::resolve(second_order_scenario(seed));
    const auto trace = qcons::run(r.sim);
    const auto mt = qcons::metrics(trace, r.sim.plan.gamma);
    const double elapsed = seconds_since(t0);
    worst_ratio = std::max(worst_ratio, mt.decay_ratio);
    worst_time = std::max(worst_time, elapsed);
    saturations += mt.saturation_count;
    bits = r.sim.schedule.bits;
    if (mt.saturation_count != 0 || mt.decay_ratio > 1e-3 || elapsed >= 10.0 || bits != 3) out.pass = false;
  }
  out.detail = "5 seeds, bits=" + std::to_string(bits) + ", saturations=" + std::to_string(saturations) +
               ", worst final/initial=" + fmt("%.3g", worst_ratio) + " (<=1e-3), worst runtime=" +
               fmt("%.3f", worst_time) + "s (<10s)";
  return out;
}

// 2. Printed recovery rows for m = 2, theta = pi/3.
Outcome criterion_printed_recovery_rows() {
  const auto model = qcons::build_system(2, kPi / 3.0);
  const double r3 = std::sqrt(3.0);
  const double printed[3][4] = {{-4.0 / (3.0 * r3), 2.0 / r3, -4.0 / (3.0 * r3), 5.0 / (3.0 * r3)},
                                {-1.0 / 3.0, 1.0, -1.0, 2.0 / 3.0},
                                {-1.0 / r3, 1.0 / r3, -1.0 / r3, 0.0}};
  Outcome out{true, ""};
  int matched = 0;
  std::ostringstream bad;
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 4; ++k) {
      const double diff = std::abs(model.S_m(r, k) - printed[r][k]);
      if (diff <= 1e-12) {
        ++matched;
      } else {
        out.pass = false;
        bad << " (" << r + 1 << ',' << k + 1 << "): computed " << fmt("%.12f", model.S_m(r, k)) << " printed "
            << fmt("%.12f", printed[r][k]);
      }
    }
  }
  // Independent check of the computed rows: S_m O must equal rows 2..4 of A^3.
  const Eigen::MatrixXd A3 = model.A * model.A * model.A;
  const double defn = (model.S_m * model.O - A3.bottomRows(3)).cwiseAbs().maxCoeff();
  out.detail = std::to_string(matched) + "/12 entries within 1e-12" + (out.pass ? "" : "; mismatch" + bad.str()) +
               "; residual of S_m O = A^3 rows: " + fmt("%.2g", defn);
  return out;
}

// 3. Row-combination closed form and absolute-sum identity.
Outcome criterion_row_combination() {
  const auto t0 = Clock::now();
  std::vector<double> thetas;
  for (int k = 0; thetas.size() < 50; ++k) {
    const double th = 0.05 + (2.0 * kPi - 0.1) * k / 60.0;
    if (std::abs(std::sin(th)) >= 0.05) thetas.push_back(th);
  }
  double worst_l = 0.0, worst_sum = 0.0;
  for (int m = 1; m <= 6; ++m) {
    for (double th : thetas) {
      const Eigen::VectorXd closed = qcons::l_closed_form(m, th);
      const Eigen::VectorXd direct = qcons::l_direct(m, th);
      worst_l = std::max(worst_l, (closed - direct).cwiseAbs().maxCoeff() / closed.cwiseAbs().maxCoeff());
      const double ident = qcons::l_abs_sum_identity(m, th);
      worst_sum = std::max(worst_sum, std::abs(closed.cwiseAbs().sum() - ident) / ident);
      worst_sum = std::max(worst_sum, std::abs(direct.cwiseAbs().sum() - ident) / ident);
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome out;
  out.pass = worst_l <= 1e-9 && worst_sum <= 1e-9 && elapsed < 5.0;
  out.detail = "m=1..6 x 50 angles: max rel diff " + fmt("%.2g", worst_l) + ", identity rel err " +
               fmt("%.2g", worst_sum) + " (<=1e-9), runtime " + fmt("%.3f", elapsed) + "s (<5s)";
  return out;
}

// 4. Data-rate bracket.
Outcome criterion_rate_bracket() {
  Outcome out{true, ""};
  int rows = 0, wide = 0;
  for (int m = 1; m <= 6; ++m) {
    for (int k = 1; k <= 100; ++k) {
      const double th = kPi * k / 101.0;
      const auto s = qcons::minimal_schedule(m, th);
      ++rows;
      if (s.bits < m || s.bits > 2 * m) out.pass = false;
      if (std::abs(std::cos(th)) >= 0.9) {
        ++wide;
        if (s.bits != 2 * m) out.pass = false;
      }
    }
    if (qcons::minimal_schedule(m, kPi / 2.0).bits != m) out.pass = false;
  }
  const int reference_bits = qcons::minimal_schedule(2, kPi / 3.0).bits;
  if (reference_bits != 3) out.pass = false;
  out.detail = std::to_string(rows) + " rows in [m, 2m]; bits=m at pi/2; " + std::to_string(wide) +
               " rows with |cos|>=0.9 at 2m; (m=2, pi/3) -> " + std::to_string(reference_bits) + " bits";
  return out;
}

// 5. Spectral-radius expansions.
Outcome criterion_spectral_expansion() {
  const std::vector<double> probes{1e-3, 3e-4, 1e-4, 3e-5};
  Outcome out{true, ""};
  double worst = 0.0;
  int cases = 0;
  bool threshold = true;
  for (int m = 1; m <= 3; ++m) {
    for (int k = 0; k < 10; ++k) {
      const double th = kPi * (k + 0.5) / 10.0;
      const auto model = qcons::build_system(m, th);
      for (double lambda : {0.5, 1.0, 2.0}) {
        const double h = m == 1 ? lambda / 2.0 : lambda;
        const auto co = qcons::select_coefficients(m, th, h);
        const auto rep = qcons::radius_expansion_check(model, co, lambda, probes);
        ++cases;
        worst = std::max(worst, rep.relative_slope_error());
        if (!rep.ok || rep.relative_slope_error() > 0.1) out.pass = false;
        if (!rep.below_threshold()) threshold = false;
      }
    }
  }
  if (!threshold) out.pass = false;
  out.detail = std::to_string(cases) + " cases: worst relative slope error " + fmt("%.4f", worst) +
               " (<=0.1); rho < 1 - eps/2 at every probe: " + (threshold ? "yes" : "no");
  return out;
}

// 6. Codec invariants.
Outcome criterion_codec_invariants() {
  Outcome out{true, ""};
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> order(1, 3);
  std::uniform_int_distribution<long> length(1, 1000);
  std::uniform_real_distribution<double> angle(0.2, kPi - 0.2);
  std::normal_distribution<double> gauss(0.0, 2.0);
  long mismatched_streams = 0;
  for (int stream = 0; stream < 1000; ++stream) {
    const int m = order(rng);
    auto model = std::make_shared<const qcons::SystemModel<double>>(qcons::build_system(m, angle(rng)));
    qcons::CodecState enc(model, 3.0, 0.995), dec(model, 3.0, 0.995);
    const long T = length(rng);
    bool same = true;
    for (long t = 1; t <= T && same; ++t) {
      const auto r = qcons::encoder_step(enc, t, gauss(rng), 3);
      qcons::decoder_step(dec, t, r.symbol);
      same = enc.estimate() == dec.estimate();
    }
    if (!same) ++mismatched_streams;
  }
  double e1 = 0.0, high = 0.0;
  long decoder_mismatch = 0;
  std::vector<qcons::Scenario> runs;
  for (std::uint64_t s = 1; s <= 3; ++s) runs.push_back(second_order_scenario(s));
  for (std::uint64_t s = 1; s <= 3; ++s) runs.push_back(harmonic_directed_scenario(s));
  {
    auto sc = second_order_scenario(11);
    sc.m = 3;
    sc.theta = 1.1;
    sc.epsilon = 0.01;  // the literal search underflows for m = 3; see the gains tests
    sc.gamma.reset();
    sc.M_steady.reset();
    sc.p0.reset();
    sc.horizon = 2000;
    runs.push_back(sc);
  }
  // The m = 3 run starts at p0_min ~ 1e3 and its states grow large before
  // contracting, so its first-component identity is checked relative to the
  // operand magnitude; the O(1)-scale runs are checked absolutely.
  double e1_rel = 0.0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto r = qcons::resolve(runs[k]);
    const auto trace = qcons::run(r.sim);
    if (k + 1 < runs.size()) e1 = std::max(e1, trace.residuals.estimation_error);
    e1_rel = std::max(e1_rel, trace.residuals.estimation_error_relative);
    high = std::max(high, trace.residuals.high_order_error);
    decoder_mismatch += trace.residuals.decoder_mismatches;
  }
  out.pass = mismatched_streams == 0 && decoder_mismatch == 0 && e1 <= 1e-12 && e1_rel <= 1e-12 && high <= 1e-9;
  out.detail = "1000 streams, desynchronised: " + std::to_string(mismatched_streams) + "; " +
               std::to_string(runs.size()) + " closed-loop runs: first-component identity " + fmt("%.2g", e1) +
               " absolute on O(1) runs, " + fmt("%.2g", e1_rel) + " relative on all (<=1e-12), full-state decomposition " + fmt("%.2g", high) + " (<=1e-9), decoder mismatches " +
               std::to_string(decoder_mismatch);
  return out;
}

// 7. Harmonic oscillators on a directed graph.
Outcome criterion_directed_harmonic() {
  Outcome out{true, ""};
  double worst_excess = -1.0;
  long saturations = 0;
  int bits = 0;
  double gamma = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto r = qcons::resolve(harmonic_directed_scenario(seed));
    if (!qcons::connectivity_check(r.sim.network).has_spanning_tree) out.pass = false;
    const auto trace = qcons::run(r.sim);
    const auto mt = qcons::metrics(trace, r.sim.plan.gamma);
    gamma = r.sim.plan.gamma;
    bits = r.sim.schedule.bits;
    saturations += mt.saturation_count;
    worst_excess = std::max(worst_excess, mt.fitted_rate - gamma);
    if (mt.saturation_count != 0 || mt.fitted_rate > gamma + 0.005 || r.sim.schedule.M_steady != 2) out.pass = false;
  }
  out.detail = "3 seeds, M=2 (" + std::to_string(bits) + " bits), gamma=" + fmt("%.4f", gamma) +
               ", worst fitted rate - gamma = " + fmt("%.2e", worst_excess) + " (<=0.005), saturations=" +
               std::to_string(saturations);
  return out;
}

// 8. Entrywise power bounds.
Outcome criterion_power_bounds() {
  const auto r = qcons::resolve(second_order_scenario(1));
  const auto& model = *r.sim.model;
  const double h = r.sim.plan.h;
  const auto co = qcons::select_coefficients(2, kPi / 3.0, h);
  Outcome out{true, ""};
  std::vector<double> worst(2, 0.0);
  int idx = 0;
  for (const auto& lam : qcons::nonzero_eigenvalues(r.sim.network)) {
    const auto rep = qcons::power_bound_check(model, co, lam.real(), 1e-4, 2000, 100, 100 + idx++);
    for (int j = 0; j < 2; ++j) worst[j] = std::max(worst[j], rep.worst_ratio[j]);
  }
  for (double w : worst)
    if (w > 1.2) out.pass = false;
  out.detail = std::to_string(idx) + " eigenvalues x 100 vectors x s<=2000: worst ratio j=1 " +
               fmt("%.3f", worst[0]) + ", j=2 " + fmt("%.3f", worst[1]) + " (<=1.2)";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 second-order network reproduction", criterion_network_reproduction},
      {"AC2 printed recovery rows", criterion_printed_recovery_rows},
      {"AC3 row-combination closed form", criterion_row_combination},
      {"AC4 data-rate bracket", criterion_rate_bracket},
      {"AC5 spectral-radius expansions", criterion_spectral_expansion},
      {"AC6 codec invariants", criterion_codec_invariants},
      {"AC7 directed harmonic consensus", criterion_directed_harmonic},
      {"AC8 entrywise power bounds", criterion_power_bounds},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

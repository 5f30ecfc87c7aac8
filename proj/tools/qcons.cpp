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

// qcons command-line harness: simulate, verify-lemma3, spectral-check,
// power-bounds, rate-table and sweep.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qcons/qcons.hpp"

namespace fs = std::filesystem;

namespace {

// Tolerances of the pass/fail checks reported by each subcommand.
constexpr double kRateSlack = 0.005;
constexpr double kSlopeTolerance = 0.1;
constexpr double kPowerBoundSlack = 1.2;

struct RunResult {
  qcons::ResolvedScenario resolved;
  qcons::Metrics metrics;
  qcons::SimTrace trace;
  bool pass = false;
};

qcons::Scenario load_with_overrides(const std::string& path, std::optional<std::uint64_t> seed,
                                    const std::vector<std::string>& overrides) {
  qcons::Scenario sc = qcons::load_scenario(path);
  if (seed) sc.seed = *seed;
  for (const auto& o : overrides) qcons::apply_override(sc, o);
  return sc;
}

RunResult simulate_scenario(const qcons::Scenario& sc, const fs::path& base_dir) {
  RunResult rr;
  rr.resolved = qcons::resolve(sc, base_dir);
  rr.trace = qcons::run(rr.resolved.sim);
  rr.metrics = qcons::metrics(rr.trace, rr.resolved.sim.plan.gamma);
  const auto& res = rr.trace.residuals;
  rr.pass = rr.metrics.saturation_count == 0 && rr.metrics.fitted_rate <= rr.metrics.gamma + kRateSlack &&
            res.decoder_mismatches == 0 && res.estimation_error_relative <= 1e-12 && res.high_order_error <= 1e-9 &&
            res.control_law <= 1e-9 && res.consensus_neutrality <= 1e-9;
  return rr;
}

void write_summary(std::ostream& os, const RunResult& rr) {
  const auto& cfg = rr.resolved.sim;
  const auto& mt = rr.metrics;
  const auto& res = rr.trace.residuals;
  os << std::setprecision(10);
  os << "m=" << cfg.model->m << "\ntheta=" << cfg.model->theta << "\nagents=" << cfg.network.N
     << "\nlambda2=" << cfg.network.eigenvalues[1].real() << "\nh=" << cfg.plan.h << "\nepsilon=" << cfg.plan.epsilon
     << "\nepsilon_searched=" << (cfg.plan.searched ? "true" : "false") << "\nplan_feasible="
     << (cfg.plan.feasibility.feasible() ? "true" : "false") << "\ngamma=" << cfg.plan.gamma << "\np0=" << cfg.p0
     << "\np0_min=" << rr.resolved.p0_min << "\np0_meets_bound=" << (cfg.p0 >= rr.resolved.p0_min ? "true" : "false")
     << "\nM_initial=" << cfg.schedule.M_initial << "\nM_steady=" << cfg.schedule.M_steady
     << "\nbits=" << cfg.schedule.bits << "\nschedule_meets_bound=" << (cfg.schedule.meets_bounds() ? "true" : "false")
     << "\nhorizon=" << cfg.horizon << "\nfitted_rate=" << mt.fitted_rate << "\nsaturation_count="
     << mt.saturation_count << "\nmax_abs_delta_quant=" << mt.max_abs_delta_quant << "\ninitial_error="
     << mt.initial_error << "\nfinal_error=" << mt.final_error << "\ndecay_ratio=" << mt.decay_ratio
     << "\nbits_sent=" << rr.trace.bits_sent << "\nresidual_estimation_error=" << res.estimation_error
     << "\nresidual_estimation_error_relative=" << res.estimation_error_relative
     << "\nresidual_high_order_error=" << res.high_order_error << "\nresidual_control_law=" << res.control_law
     << "\nresidual_consensus_neutrality=" << res.consensus_neutrality
     << "\ndecoder_mismatches=" << res.decoder_mismatches << "\nstatus=" << (rr.pass ? "pass" : "fail") << '\n';
}

void write_run_outputs(const fs::path& out, const RunResult& rr) {
  fs::create_directories(out);
  const auto& cfg = rr.resolved.sim;
  {
    std::ofstream f(out / "manifest.cfg");
    f << "# Fully resolved scenario; rerun with: qcons simulate --config manifest.cfg\n";
    qcons::write_scenario(f, rr.resolved.scenario);
    f << std::setprecision(17) << "# resolved: h=" << cfg.plan.h << " epsilon=" << cfg.plan.epsilon
      << " gamma=" << cfg.plan.gamma << " p0=" << cfg.p0 << '\n';
  }
  {
    std::ofstream f(out / "trace.csv");
    qcons::write_trace_csv(f, rr.trace, cfg.network.N, cfg.model->m);
  }
  {
    std::ofstream f(out / "symbols.csv");
    qcons::write_symbol_log(f, rr.trace);
  }
  {
    std::ofstream f(out / "feasibility.txt");
    qcons::write_report(f, cfg.plan.feasibility);
  }
  std::ofstream f(out / "summary.txt");
  write_summary(f, rr);
}

int cmd_simulate(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed,
                 const std::vector<std::string>& overrides) {
  const auto sc = load_with_overrides(config, seed, overrides);
  const auto rr = simulate_scenario(sc, fs::path(config).parent_path());
  write_run_outputs(out, rr);
  write_summary(std::cout, rr);
  return rr.pass ? 0 : 1;
}

int cmd_verify_row_combination(int m_max, int theta_steps) {
  std::cout << "m,theta,max_rel_diff,abs_sum,identity,rel_err\n" << std::setprecision(10);
  bool ok = true;
  for (int m = 1; m <= m_max; ++m) {
    for (int k = 0; k < theta_steps; ++k) {
      const double th = qcons::kPi * (k + 0.5) / theta_steps;
      if (std::abs(std::sin(th)) < 0.05) continue;
      const Eigen::VectorXd closed = qcons::l_closed_form(m, th);
      const Eigen::VectorXd direct = qcons::l_direct(m, th);
      const double diff = (closed - direct).cwiseAbs().maxCoeff() / closed.cwiseAbs().maxCoeff();
      const double sum = closed.cwiseAbs().sum();
      const double ident = qcons::l_abs_sum_identity(m, th);
      const double rel = std::abs(sum - ident) / ident;
      if (diff > 1e-9 || rel > 1e-9) ok = false;
      std::cout << m << ',' << th << ',' << diff << ',' << sum << ',' << ident << ',' << rel << '\n';
    }
  }
  std::cerr << "verify-lemma3: " << (ok ? "pass" : "fail") << '\n';
  return ok ? 0 : 1;
}

int cmd_spectral_check(const std::string& config, const std::vector<std::string>& overrides) {
  const auto sc = load_with_overrides(config, std::nullopt, overrides);
  const auto r = qcons::resolve(sc, fs::path(config).parent_path());
  const auto& model = *r.sim.model;
  const auto co = qcons::select_coefficients(model.m, model.theta, r.sim.plan.h);
  const std::vector<double> probes{1e-3, 3e-4, 1e-4, 3e-5};
  bool ok = true;
  qcons::write_spectral_csv_header(std::cout);
  for (const auto& lam : qcons::nonzero_eigenvalues(r.sim.network)) {
    const auto rep = qcons::radius_expansion_check(model, co, lam, probes);
    qcons::write_spectral_csv_rows(std::cout, rep);
    if (!rep.ok) std::cerr << "eigensolver: " << rep.diagnostic << '\n';
    if (!rep.ok || !rep.below_threshold() || rep.relative_slope_error() > kSlopeTolerance) ok = false;
    if (model.m >= 2 && !rep.eigen_distinct) ok = false;
  }
  std::cerr << "# plan at epsilon=" << r.sim.plan.epsilon << '\n';
  qcons::write_report(std::cerr, r.sim.plan.feasibility);
  for (const auto& e : r.sim.plan.feasibility.entries)
    if (e.id.rfind("spectral_radius", 0) == 0 && !e.pass) ok = false;
  std::cerr << "spectral-check: " << (ok ? "pass" : "fail") << '\n';
  return ok ? 0 : 1;
}

int cmd_power_bounds(const std::string& config, double epsilon, long s_max, int trials,
                     const std::vector<std::string>& overrides) {
  const auto sc = load_with_overrides(config, std::nullopt, overrides);
  const auto r = qcons::resolve(sc, fs::path(config).parent_path());
  const auto& model = *r.sim.model;
  if (model.m < 2) {
    std::cerr << "power-bounds: entry bounds are defined for m >= 2\n";
    return 1;
  }
  const auto co = qcons::select_coefficients(model.m, model.theta, r.sim.plan.h);
  std::cout << "lambda,j,constant,exponent,worst_ratio,worst_step\n" << std::setprecision(10);
  bool ok = true;
  int idx = 0;
  for (const auto& lam : qcons::nonzero_eigenvalues(r.sim.network)) {
    const auto rep = qcons::power_bound_check(model, co, lam.real(), epsilon, s_max, trials, sc.seed + idx++);
    for (int j = 1; j <= model.m; ++j) {
      std::cout << lam.real() << ',' << j << ',' << rep.constants[j - 1] << ','
                << qcons::power_bound_exponent(model.m, j) << ',' << rep.worst_ratio[j - 1] << ','
                << rep.worst_step[j - 1] << '\n';
      if (rep.worst_ratio[j - 1] > kPowerBoundSlack) ok = false;
    }
  }
  std::cerr << "power-bounds: " << (ok ? "pass" : "fail") << '\n';
  return ok ? 0 : 1;
}

int cmd_rate_table(int m_max, int theta_steps) {
  std::cout << "m,theta,M_steady,bits,in_bracket\n" << std::setprecision(10);
  bool ok = true;
  for (int m = 1; m <= m_max; ++m) {
    for (int k = 1; k <= theta_steps; ++k) {
      const double th = qcons::kPi * k / (theta_steps + 1);
      const auto s = qcons::minimal_schedule(m, th);
      const bool in = s.bits >= m && s.bits <= 2 * m;
      ok = ok && in;
      std::cout << m << ',' << th << ',' << s.M_steady << ',' << s.bits << ',' << (in ? 1 : 0) << '\n';
    }
  }
  return ok ? 0 : 1;
}

/// Grid file: one "section.key = v1, v2, ..." per line; runs are the cartesian product.
std::vector<std::vector<std::string>> parse_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file: " + path);
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw qcons::ConfigError("grid: expected key = v1, v2, ...", line_no);
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    std::vector<std::string> values;
    std::stringstream vs(line.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) {
      v.erase(0, v.find_first_not_of(" \t"));
      v.erase(v.find_last_not_of(" \t\r") + 1);
      if (!v.empty()) values.push_back(v);
    }
    if (values.empty()) throw qcons::ConfigError("grid: no values", line_no);
    axes.emplace_back(key, values);
  }
  std::vector<std::vector<std::string>> runs{{}};
  for (const auto& [key, values] : axes) {
    std::vector<std::vector<std::string>> next;
    for (const auto& run : runs) {
      for (const auto& v : values) {
        auto r = run;
        r.push_back(key + "=" + v);
        next.push_back(std::move(r));
      }
    }
    runs = std::move(next);
  }
  return runs;
}

int cmd_sweep(const std::string& config, const std::string& grid, const std::string& out, unsigned jobs) {
  const auto base = qcons::load_scenario(config);
  const auto runs = parse_grid(grid);
  // Validate every override before starting any run.
  for (const auto& r : runs) {
    qcons::Scenario sc = base;
    for (const auto& o : r) qcons::apply_override(sc, o);
  }
  fs::create_directories(out);
  std::vector<std::string> rows(runs.size());
  std::vector<int> status(runs.size(), 1);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      std::ostringstream id;
      id << "run_" << std::setw(4) << std::setfill('0') << i;
      std::ostringstream row;
      row << id.str() << ',';
      for (std::size_t k = 0; k < runs[i].size(); ++k) row << (k ? ";" : "") << runs[i][k];
      try {
        qcons::Scenario sc = base;
        for (const auto& o : runs[i]) qcons::apply_override(sc, o);
        const auto rr = simulate_scenario(sc, fs::path(config).parent_path());
        write_run_outputs(fs::path(out) / id.str(), rr);
        row << std::setprecision(10) << ',' << rr.resolved.sim.plan.epsilon << ',' << rr.metrics.fitted_rate << ','
            << rr.metrics.saturation_count << ',' << rr.metrics.final_error << ',' << (rr.pass ? "pass" : "fail");
        status[i] = rr.pass ? 0 : 1;
      } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        row << ",,,,,error: " << msg;
      }
      rows[i] = row.str();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  std::ofstream merged(fs::path(out) / "summary.csv");
  merged << "run_id,overrides,epsilon,fitted_rate,saturation_count,final_error,status\n";
  for (const auto& r : rows) merged << r << '\n';  // already in run-id order
  const bool ok = std::all_of(status.begin(), status.end(), [](int s) { return s == 0; });
  std::cout << runs.size() << " runs, " << std::count(status.begin(), status.end(), 0) << " passed; summary in "
            << (fs::path(out) / "summary.csv").string() << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized consensus of high-order oscillator networks"};
  app.require_subcommand(1);

  std::string config, out = "qcons_out", grid;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  int m_max = 6, theta_steps = 50;
  double epsilon = 1e-4;
  long s_max = 2000;
  int trials = 100;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* sim = app.add_subcommand("simulate", "Run a closed-loop scenario and write trace, symbols and summary");
  sim->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Output directory");
  sim->add_option("--seed", seed, "Override the scenario seed");
  sim->add_option("--set", overrides, "Override a value: section.key=value");

  auto* l3 = app.add_subcommand("verify-lemma3", "Check the closed-form row combination and its absolute sum");
  l3->add_option("--m-max", m_max, "Largest order")->check(CLI::Range(1, 12));
  l3->add_option("--theta-steps", theta_steps, "Angles in (0, pi)")->check(CLI::PositiveNumber);

  auto* spec = app.add_subcommand("spectral-check", "Fit closed-loop radius slopes for a scenario's eigenvalues");
  spec->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  spec->add_option("--set", overrides, "Override a value: section.key=value");

  auto* pb = app.add_subcommand("power-bounds", "Check entrywise bounds on closed-loop matrix powers");
  pb->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  pb->add_option("--epsilon", epsilon, "Gain scale");
  pb->add_option("--s-max", s_max, "Largest power");
  pb->add_option("--trials", trials, "Random vectors");
  pb->add_option("--set", overrides, "Override a value: section.key=value");

  auto* rt = app.add_subcommand("rate-table", "Tabulate minimal levels and bits");
  rt->add_option("--m-max", m_max, "Largest order")->check(CLI::Range(1, 12));
  rt->add_option("--theta-steps", theta_steps, "Angles in (0, pi)")->check(CLI::PositiveNumber);

  auto* sw = app.add_subcommand("sweep", "Run a grid of scenario variants in parallel");
  sw->add_option("--config", config, "Base scenario file")->required()->check(CLI::ExistingFile);
  sw->add_option("--grid", grid, "Grid file")->required()->check(CLI::ExistingFile);
  sw->add_option("--out", out, "Output directory");
  sw->add_option("--jobs", jobs, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(config, out, seed, overrides);
    if (*l3) return cmd_verify_row_combination(m_max, theta_steps);
    if (*spec) return cmd_spectral_check(config, overrides);
    if (*pb) return cmd_power_bounds(config, epsilon, s_max, trials, overrides);
    if (*rt) return cmd_rate_table(m_max, theta_steps);
    if (*sw) return cmd_sweep(config, grid, out, jobs);
  } catch (const qcons::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

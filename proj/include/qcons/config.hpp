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
#ifndef QCONS_CONFIG_HPP
#define QCONS_CONFIG_HPP

// Flat "key = value" scenario files with [section] headers, and the code
// that turns a parsed scenario into a runnable SimConfig.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qcons/error.hpp"
#include "qcons/gains.hpp"
#include "qcons/model.hpp"
#include "qcons/network.hpp"
#include "qcons/quantizer.hpp"
#include "qcons/sim.hpp"

namespace qcons {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text, const std::string& key) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw ConfigError(key + ": expected a number, got '" + s + "'");
  return v;
}

}  // namespace detail

/// Parses an angle such as "1.2", "pi", "pi/3", "2*pi/5" or "0.25*pi".
inline double parse_angle(const std::string& text) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw ConfigError("theta: empty value");
  double value = 1.0;
  char op = '*';
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find_first_of("*/", pos);
    const std::string token = detail::trim(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    const double f = token == "pi" ? kPi : detail::parse_number(token, "theta");
    if (op == '*') {
      value *= f;
    } else {
      if (f == 0.0) throw ConfigError("theta: division by zero");
      value /= f;
    }
    if (next == std::string::npos) break;
    op = s[next];
    pos = next + 1;
  }
  return value;
}

/**
 * A scenario as written in a config file. Optional fields left unset are
 * derived when the scenario is resolved (h, epsilon, p0, levels, bounds).
 */
struct Scenario {
  // [model]
  int m = 2;
  double theta = kPi / 3.0;
  // [network]
  std::string source = "random";  ///< random | edges | file
  int nodes = 5;
  double probability = 0.5;
  bool directed = false;
  std::string edges;  ///< inline "i j w; i j w; ..."
  std::string file;
  // [gains]
  std::optional<double> h;
  std::optional<double> epsilon;
  std::optional<double> gamma;
  bool strengthened = false;
  // [quantizer]
  std::optional<int> M_initial;
  std::optional<int> M_steady;
  // [sim]
  long horizon = 1000;
  std::optional<double> p0;
  std::optional<double> c_star;
  std::optional<double> c_delta_star;
  double init_scale = 1.0;
  std::uint64_t seed = 1;
  bool override_checks = false;
  bool check_invariants = true;
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

template <typename Int>
Int parse_integer(const std::string& text, const std::string& key) {
  const std::string s = trim(text);
  Int v{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw ConfigError(key + ": expected an integer, got '" + s + "'");
  return v;
}

}  // namespace detail

/// Sets one "section.key" from text. Throws ConfigError for unknown keys or bad values.
inline void set_scenario_value(Scenario& sc, const std::string& full_key, const std::string& raw) {
  using namespace detail;
  const std::string v = trim(raw);
  const std::string& k = full_key;
  if (k == "model.m") sc.m = parse_integer<int>(v, k);
  else if (k == "model.theta") sc.theta = parse_angle(v);
  else if (k == "network.source") {
    if (v != "random" && v != "edges" && v != "file") throw ConfigError(k + ": expected random, edges or file");
    sc.source = v;
  } else if (k == "network.nodes") sc.nodes = parse_integer<int>(v, k);
  else if (k == "network.probability") sc.probability = parse_number(v, k);
  else if (k == "network.directed") sc.directed = parse_bool(v, k);
  else if (k == "network.edges") sc.edges = v;
  else if (k == "network.file") sc.file = v;
  else if (k == "gains.h") sc.h = parse_number(v, k);
  else if (k == "gains.epsilon") sc.epsilon = parse_number(v, k);
  else if (k == "gains.gamma") sc.gamma = parse_number(v, k);
  else if (k == "gains.strengthened") sc.strengthened = parse_bool(v, k);
  else if (k == "quantizer.M_initial") sc.M_initial = parse_integer<int>(v, k);
  else if (k == "quantizer.M_steady") sc.M_steady = parse_integer<int>(v, k);
  else if (k == "sim.horizon") sc.horizon = parse_integer<long>(v, k);
  else if (k == "sim.p0") sc.p0 = parse_number(v, k);
  else if (k == "sim.c_star") sc.c_star = parse_number(v, k);
  else if (k == "sim.c_delta_star") sc.c_delta_star = parse_number(v, k);
  else if (k == "sim.init_scale") sc.init_scale = parse_number(v, k);
  else if (k == "sim.seed") sc.seed = parse_integer<std::uint64_t>(v, k);
  else if (k == "sim.override") sc.override_checks = parse_bool(v, k);
  else if (k == "sim.check_invariants") sc.check_invariants = parse_bool(v, k);
  else throw ConfigError("unknown key '" + k + "'");
}

/// Applies a "section.key=value" override.
inline void apply_override(Scenario& sc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  set_scenario_value(sc, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

inline Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string raw, section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "network" && section != "gains" && section != "quantizer" &&
          section != "sim") {
        throw ConfigError("unknown section '" + section + "'", line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
    if (section.empty()) throw ConfigError("key outside of a section", line_no);
    try {
      set_scenario_value(sc, section + "." + detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line_no);
    }
  }
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  return parse_scenario(in);
}

/// Writes the scenario in config syntax; parsing the output yields an identical scenario.
inline void write_scenario(std::ostream& os, const Scenario& sc) {
  os << std::setprecision(17);
  os << "[model]\nm = " << sc.m << "\ntheta = " << sc.theta << "\n\n";
  os << "[network]\nsource = " << sc.source << "\nnodes = " << sc.nodes << "\nprobability = " << sc.probability
     << "\ndirected = " << (sc.directed ? "true" : "false") << '\n';
  if (!sc.edges.empty()) os << "edges = " << sc.edges << '\n';
  if (!sc.file.empty()) os << "file = " << sc.file << '\n';
  os << "\n[gains]\n";
  if (sc.h) os << "h = " << *sc.h << '\n';
  if (sc.epsilon) os << "epsilon = " << *sc.epsilon << '\n';
  if (sc.gamma) os << "gamma = " << *sc.gamma << '\n';
  os << "strengthened = " << (sc.strengthened ? "true" : "false") << "\n\n[quantizer]\n";
  if (sc.M_initial) os << "M_initial = " << *sc.M_initial << '\n';
  if (sc.M_steady) os << "M_steady = " << *sc.M_steady << '\n';
  os << "\n[sim]\nhorizon = " << sc.horizon << '\n';
  if (sc.p0) os << "p0 = " << *sc.p0 << '\n';
  if (sc.c_star) os << "c_star = " << *sc.c_star << '\n';
  if (sc.c_delta_star) os << "c_delta_star = " << *sc.c_delta_star << '\n';
  os << "init_scale = " << sc.init_scale << "\nseed = " << sc.seed
     << "\noverride = " << (sc.override_checks ? "true" : "false")
     << "\ncheck_invariants = " << (sc.check_invariants ? "true" : "false") << '\n';
}

/// Everything derived from a scenario, ready to run.
struct ResolvedScenario {
  Scenario scenario;
  SimConfig sim;
  double p0_min = 0.0;
};

/**
 * Builds the model, network, gain plan, schedule and initial states. All
 * randomness comes from one generator seeded with `sim.seed`: the graph is
 * drawn first, then the initial states.
 */
inline ResolvedScenario resolve(const Scenario& sc, const std::filesystem::path& base_dir = {}) {
  ResolvedScenario out;
  out.scenario = sc;
  auto model = std::make_shared<const SystemModel<double>>(build_system(sc.m, sc.theta));
  std::mt19937_64 rng(sc.seed);

  Eigen::MatrixXd weights;
  if (sc.source == "random") {
    if (sc.nodes < 2) throw ConfigError("network.nodes must be >= 2 for a random graph");
    weights = random_connected_graph(sc.nodes, sc.probability, sc.directed, rng, sc.m >= 2);
  } else if (sc.source == "edges") {
    std::string text = sc.edges;
    for (auto& ch : text)
      if (ch == ';') ch = '\n';
    std::istringstream es(text);
    weights = parse_edge_list(es, sc.directed, sc.nodes);
  } else {
    std::filesystem::path p = sc.file;
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    std::ifstream gf(p);
    if (!gf) throw std::runtime_error("graph file not found: " + p.string());
    weights = parse_edge_list(gf, sc.directed, sc.nodes);
  }
  Network net = build_network(weights, sc.directed);

  EpsilonOptions opts;
  opts.strengthened = sc.strengthened;
  opts.forced = sc.epsilon;
  const double h = sc.h ? *sc.h : default_h(sc.m, net);
  GainPlan plan = design_gains(*model, net, h, opts);
  if (sc.gamma) {
    if (!(*sc.gamma > 0.0 && *sc.gamma < 1.0)) throw ConfigError("gains.gamma must lie in (0, 1)");
    plan.gamma = *sc.gamma;
  }

  LevelSchedule sched = minimal_schedule(sc.m, sc.theta);
  if (sc.M_initial || sc.M_steady) {
    sched = fixed_schedule(sc.m, sc.theta, sc.M_initial.value_or(sched.M_initial), sc.M_steady.value_or(sched.M_steady));
  }

  Eigen::MatrixXd x0 = random_initial_states(net.N, sc.m, rng, sc.init_scale);
  const double c_star = sc.c_star.value_or(x0.cwiseAbs().maxCoeff());
  const double c_delta_star = sc.c_delta_star.value_or(disagreement_norms(net, x0).maxCoeff());
  out.p0_min = p0_minimum(sc.m, plan.gamma, c_star, c_delta_star);

  SimConfig& cfg = out.sim;
  cfg.model = model;
  cfg.network = std::move(net);
  cfg.plan = std::move(plan);
  cfg.schedule = sched;
  cfg.p0 = sc.p0.value_or(out.p0_min);
  cfg.horizon = sc.horizon;
  cfg.x0 = std::move(x0);
  cfg.seed = sc.seed;
  cfg.c_star = c_star;
  cfg.c_delta_star = c_delta_star;
  cfg.allow_override = sc.override_checks;
  cfg.check_invariants = sc.check_invariants;
  return out;
}

}  // namespace qcons

#endif  // QCONS_CONFIG_HPP

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

// Builds a small scenario in code, runs it and prints the error decay.

#include <iostream>

#include "qcons/qcons.hpp"

int main() {
  qcons::Scenario sc;
  sc.m = 2;
  sc.theta = qcons::kPi / 3.0;
  sc.nodes = 5;
  sc.epsilon = 0.01;
  sc.gamma = 0.9975;
  sc.M_steady = 4;
  sc.p0 = 10.0;
  sc.horizon = 4000;

  const auto resolved = qcons::resolve(sc);
  const auto& cfg = resolved.sim;
  std::cout << "agents " << cfg.network.N << ", lambda2 " << cfg.network.eigenvalues[1].real() << ", "
            << cfg.schedule.bits << " bits per symbol\n";

  const auto trace = qcons::run(cfg);
  for (long t = 0; t < static_cast<long>(trace.steps.size()); t += 500)
    std::cout << "t=" << t << "  consensus error " << trace.steps[t].delta_inf.maxCoeff() << '\n';

  const auto m = qcons::metrics(trace, cfg.plan.gamma);
  std::cout << "fitted rate " << m.fitted_rate << " (gamma " << m.gamma << "), saturations " << m.saturation_count
            << ", bits sent " << trace.bits_sent << '\n';
  return m.saturation_count == 0 ? 0 : 1;
}

/*
 Copyright 2026 The OLC Authors

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
// Drives a scalar plant towards a drifting target with the target-state
// tracker and compares it with the best constant input in hindsight.

#include <cstdio>
#include <vector>

#include "olc/olc.hpp"

int main() {
    using namespace olc;
    const LtiSystem sys(Matrix{{0.5}}, Matrix{{1.0}});
    const BoxSet u_set = BoxSet::symmetric(1, 2.0);
    const StabilityCert cert = certify_strong_stability(sys.A());

    const long T = 200;
    SeededRng rng(7);
    std::vector<QuadraticCost> costs;
    for (long t = 0; t < T; ++t) costs.emplace_back(Matrix{{1.0}}, Vector{1.5 + rng.uniform(-1.0, 1.0)});
    const std::vector<Vector> w(T - 1, Vector(1));

    const Vector x1(1);
    const StateBound bound = state_bound(cert, sys, x1, u_set, BoxSet::point(Vector(1)));
    const SmoothnessParams smooth = smoothness_constant(costs, bound, 2.5);
    const double eta = theorem1_step_size(smooth.L, T, cert);

    OlcController ctl(sys, u_set, eta, x1);
    const ControllerTrace trace = play(sys, ctl, x1, costs, w, bound);
    double total = 0.0;
    for (double c : trace.costs) total += c;

    const auto best = best_fixed_input(sys, x1, w, costs, u_set);
    std::printf("gamma %.4f kappa %.4f D %.4f L %.4f eta %.5f\n", cert.gamma, cert.kappa, bound.D, smooth.L, eta);
    std::printf("online cost %.4f, best fixed input u* = %.4f with cost %.4f, regret %.4f\n", total,
                best.optimizer[0], best.value, total - best.value);
    return 0;
}

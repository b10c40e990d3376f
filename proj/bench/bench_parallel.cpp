// Benchmark: OpenMP kernels against their serial reference
// implementations (Wigner sampling and dense propagation).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "kerrforge/dynamics.hpp"

using namespace kerrforge;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main() {
    Circuit circuit;
    circuit.cavities.push_back({"c1", 9.2, 40});
    circuit.devices.push_back({"q1", Duffing{8.2, -0.15, 4}});
    circuit.couplings.push_back({"c1", "q1", 0.08});

    const HamiltonianBundle bundle = build_hamiltonian(circuit);
    const Propagator prop(bundle);
    const StateVector psi0 = coherent_state(bundle.space, "c1", {2.0, 0.0});

    {
        const auto times = time_grid(100.0, 400);
        const auto t0 = std::chrono::steady_clock::now();
        const auto states = prop.evolve(psi0, times);
        const double dt = seconds_since(t0);
        std::printf("evolve  dim=%ld points=%zu  %.3f s (%s)\n",
                    bundle.space.total_dim(), times.size(), dt,
                    prop.method() == Propagator::Method::Dense ? "dense"
                                                               : "krylov");
    }

    const auto rho = partial_trace(prop.apply(psi0, 40.0), {"c1"});
    const auto grid = square_grid(3.0, 96);
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto w = wigner_serial(rho, grid);
        const double ts = seconds_since(t0);
        const auto t1 = std::chrono::steady_clock::now();
        const auto wp = wigner(rho, grid);
        const double tp = seconds_since(t1);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            max_diff = std::max(max_diff, std::abs(w.values[i] - wp.values[i]));
        }
        std::printf("wigner  %zu points  serial %.3f s  parallel %.3f s  "
                    "speedup %.2fx  max|diff| %.2e\n",
                    grid.size(), ts, tp, ts / tp, max_diff);
    }
    return 0;
}

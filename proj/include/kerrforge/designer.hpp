#ifndef KERRFORGE_DESIGNER_HPP
#define KERRFORGE_DESIGNER_HPP

#include <functional>
#include <string>
#include <vector>

#include "kerrforge/circuit.hpp"
#include "kerrforge/perturbation.hpp"

namespace kerrforge {

struct NoRootInBounds : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DispersiveViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleTarget : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FrequencyCollision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bisection on a sign-changing bracket located by a 64-point coarse scan.
// The closed forms have poles, so derivative-based methods are avoided.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double tol, int scan_points = 64);

struct DeviceSearchSpace {
    DeviceSpec device;  // template; its frequency is the unknown
    double coupling = 0.0;
    double min_frequency = 0.0;
    double max_frequency = 0.0;
};

// Adds a second device to the cavity so the total closed-form self-Kerr
// vanishes. Returns the mirrored analytic solution (opposite detuning and
// anharmonicity, equal coupling) when the search space admits it, otherwise
// bisects the template device's frequency to |S| < 1e-9 GHz. The result
// must pass the dispersive diagnostics.
Circuit solve_self_kerr_cancellation(const Circuit& base,
                                     const std::string& cavity_label,
                                     const DeviceSearchSpace& search);

// Retunes the named device so the closed-form cross-Kerr between the two
// cavities vanishes, |X| < 1e-9 GHz.
Circuit solve_cross_kerr_off(const Circuit& circuit,
                             const std::string& tunable_label,
                             double min_frequency, double max_frequency);

struct GateSchedule {
    Circuit off_configuration;
    Circuit on_configuration;
    std::string tunable_label;
    double x_on = 0.0;             // GHz, closed form
    double x_off_numeric = 0.0;    // GHz, from exact spectra
    double gate_time_us = 0.0;     // 1/(2 |X_on|); phase pi from 2 pi X t
    double on_off_ratio = 0.0;     // |X_on| / |X_off_numeric|
    double single_device_ratio = 0.0;  // two-level estimate without the
                                       // canceling device
};

// Detunes the tunable device by detune_shift (GHz) to switch the cross-Kerr
// on; CPHASE gate time = 1/(2 |X_on|). |X_on| below 1e-7 GHz (a gate slower
// than 5 ms) is rejected.
GateSchedule plan_cphase_gate(const Circuit& circuit_off,
                              const std::string& tunable_label,
                              double detune_shift);

struct EffectiveHamiltonianSpec {
    std::vector<double> frequencies;  // rescaled w'_i, GHz
    std::vector<double> self_kerr;    // S_i, GHz
    std::vector<double> cross_kerr;   // X_{i,i+1}, GHz, size N-1
};

struct ArrayDesignSpec {
    int n = 2;
    std::vector<double> target_self_kerr;   // size n
    std::vector<double> target_cross_kerr;  // size n-1
    // Chain geometry: cavity i at base + i * spacing, on-site qubits above
    // their cavities, intermediary qubits below the pair they join.
    double cavity_base_frequency = 9.0;
    double cavity_spacing = 0.2;
    double intermediary_chi_magnitude = 0.15;
    double intermediary_coupling = 0.08;
    double intermediary_detuning_min = 0.6;
    double intermediary_detuning_max = 3.0;
    double onsite_chi_magnitude = 0.15;
    double onsite_detuning = 1.5;
    double onsite_coupling_max = 0.15;
    int fock_dim = 4;
};

struct ArrayDesignResult {
    Circuit circuit;
    EffectiveHamiltonianSpec effective;
    std::vector<double> residual_self;   // achieved - target, GHz
    std::vector<double> residual_cross;
};

// Two-stage chain design: intermediary qubits are placed first to hit each
// X_{i,i+1} target, then on-site couplings are solved to bring each total
// S_i to target. Verifies that no two subsystem frequencies coincide within
// 10 MHz. Residuals above 1e-8 GHz raise InfeasibleTarget.
ArrayDesignResult design_array(const ArrayDesignSpec& spec);

}  // namespace kerrforge

#endif

#ifndef KERRFORGE_CIRCUIT_HPP
#define KERRFORGE_CIRCUIT_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace kerrforge {

// All frequencies are ordinary frequencies in GHz. Time evolution applies
// the 2*pi internally (phase = -2*pi*E*t with t in ns), so 1 GHz over 1 ns
// is one full cycle.

struct CavitySpec {
    std::string label;
    double frequency = 0.0;  // GHz
    int fock_dim = 2;
};

struct TwoLevel {
    double frequency = 0.0;  // GHz
};

struct Duffing {
    double frequency = 0.0;      // GHz
    double anharmonicity = 0.0;  // chi, GHz; device level m has energy m*w + chi*m*(m-1)
    int levels = 3;
};

struct Multilevel {
    std::vector<double> level_energies;  // GHz, starting at 0, strictly increasing
    // Dimensionless relative weights for the j<k transition couplings.
    // Empty means nearest-neighbor sqrt(j+1) ladder weights.
    Eigen::MatrixXd coupling_weights;
};

struct DeviceSpec {
    std::string label;
    std::variant<TwoLevel, Duffing, Multilevel> model;

    int levels() const;
    // Energy of device level m (GHz, relative to the ground level).
    double level_energy(int m) const;
    // First transition frequency (GHz).
    double transition_frequency() const { return level_energy(1); }
    // Coupling matrix element weight for the j -> k transition (j < k),
    // multiplied by the circuit coupling strength g.
    double transition_weight(int j, int k) const;
};

struct Coupling {
    std::string cavity_label;
    std::string device_label;
    double strength = 0.0;  // g, GHz
};

struct Circuit {
    std::vector<CavitySpec> cavities;
    std::vector<DeviceSpec> devices;
    std::vector<Coupling> couplings;
    bool rwa = true;

    const CavitySpec& cavity(const std::string& label) const;
    const DeviceSpec& device(const std::string& label) const;
    CavitySpec& cavity(const std::string& label);
    DeviceSpec& device(const std::string& label);
    bool has_cavity(const std::string& label) const;
    bool has_device(const std::string& label) const;
    std::optional<double> coupling_strength(const std::string& cavity_label,
                                            const std::string& device_label) const;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structural checks: unique labels, referenced labels exist, no duplicate
// couplings, per-type invariants. Throws ValidationError on failure.
void validate_structure(const Circuit& circuit);

enum class DispersiveClass { Dispersive, Marginal, NonDispersive };

struct Diagnostic {
    std::string cavity_label;
    std::string device_label;
    double ratio = 0.0;  // g / |Delta|
    DispersiveClass cls = DispersiveClass::Dispersive;
    bool rwa_strained = false;   // |Delta| >= 0.2 (w_c + w_q)
    bool degenerate = false;     // Delta == 0
    bool pt_pole = false;        // 2*Delta + chi == 0 or Delta_i + Delta_j + chi == 0
    std::string note;
};

std::vector<Diagnostic> validate_dispersive(const Circuit& circuit);

// omega_cavity - omega_device (first transition), GHz.
double detuning(const Circuit& circuit, const std::string& cavity_label,
                const std::string& device_label);

// JSON config round trip. Schema: top-level keys schema_version, cavities,
// devices, couplings, rwa.
Circuit parse_circuit(const std::string& json_text);
std::string serialize_circuit(const Circuit& circuit);
Circuit load_circuit_file(const std::string& path);

// fock_dim heuristic for a cavity meant to hold coherent amplitude alpha:
// ceil(|alpha|^2 + 5|alpha| + 10).
int fock_dim_for_amplitude(double alpha_abs);

}  // namespace kerrforge

#endif

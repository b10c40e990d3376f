#ifndef KERRFORGE_PERTURBATION_HPP
#define KERRFORGE_PERTURBATION_HPP

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerrforge/circuit.hpp"

namespace kerrforge {

struct DegenerateIntermediate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncationClipped : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PoleProximity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bare product-state occupation: photon number per cavity, excitation level
// per device. Absent labels mean 0.
struct OccupationLabel {
    std::map<std::string, int> occupations;

    int get(const std::string& label) const {
        auto it = occupations.find(label);
        return it == occupations.end() ? 0 : it->second;
    }
};

struct PathContribution {
    std::string description;
    double value = 0.0;  // GHz
};

struct PTCorrection {
    double order1 = 0.0;  // GHz; identically zero for linear couplings
    double order2 = 0.0;
    double order3 = 0.0;  // identically zero for loop-free circuits
    double order4 = 0.0;
    // order4 before the final double rounding; Kerr coefficients are
    // second differences of order4 and keep full precision this way.
    long double order4_extended = 0.0;
    std::vector<PathContribution> path_ledger;  // order-4 breakdown

    double total() const { return order2 + order4; }
};

// Rayleigh-Schrodinger corrections for the bare product state `label`,
// computed by enumerating excitation-hopping paths through the coupling
// graph. Two applications of V feed order 2, four feed order 4:
//   E2 = sum_i |V_ni|^2 / E_ni
//   E4 = sum_{ijk} V_nk V_kj V_ji V_in / (E_ni E_nj E_nk)
//        - (sum_k |V_nk|^2 / E_nk^2)(sum_i |V_ni|^2 / E_ni)
// with all intermediate states distinct from `label`. Matrix elements come
// from the ladder rules and the device transition weights; denominators are
// bare-energy differences E_ni = E_n - E_i.
// Throws DegenerateIntermediate when a reachable denominator is below
// 1e-9 GHz and TruncationClipped when a path needs a level beyond a
// subsystem's truncation. Requires circuit.rwa == true.
PTCorrection pt_energy(const Circuit& circuit, const OccupationLabel& label);

struct KerrReport {
    std::vector<std::string> cavity_labels;
    Eigen::VectorXd self_kerr;     // GHz, per cavity
    Eigen::MatrixXd cross_kerr;    // GHz, symmetric, zero diagonal
    Eigen::VectorXd linear_shift;  // GHz, PT correction to the n_i coefficient
    std::string method;

    double cross(const std::string& a, const std::string& b) const;
    double self(const std::string& a) const;
    int index_of(const std::string& label) const;
};

// Kerr coefficients from finite differences of pt_energy:
//   S_i = (E(2e_i) - 2 E(e_i) + E(0)) / 2
//   X_ij = E(e_i + e_j) - E(e_i) - E(e_j) + E(0)
// with E = order2 + order4.
KerrReport kerr_from_paths(const Circuit& circuit);

// Exact closed-form fourth-order energies for circuits of two-level and
// Duffing devices, any coupling topology. Single-device building blocks:
//   two-level:  S = -g^4 / Delta^3
//   Duffing:    S = chi g^4 / (Delta^3 (Delta - chi))
//   two-level:  X = -2 g_i^2 g_j^2 (D_i + D_j) / (D_i^2 D_j^2)
//   Duffing:    X = 4 chi g_i^2 g_j^2 (D_i + D_j) / (D_i^2 D_j^2 (D_i + D_j - 2 chi))
// where level m of a Duffing device sits at m w + chi m (m-1). Self-Kerr
// contributions are strictly per-device additive; cross-Kerr additionally
// picks up interference terms whenever two devices share both cavities of
// a pair (the coupling graph then has a four-cycle), and those terms are
// assembled here as well, so the result agrees with kerr_from_paths to
// rounding for every supported circuit.
// Throws PoleProximity when a denominator magnitude is below 1e-6 GHz.
KerrReport kerr_closed_form(const Circuit& circuit);

// Scalar building blocks of the catalogue.
double self_kerr_two_level(double g, double delta);
double self_kerr_duffing(double g, double delta, double chi);
double cross_kerr_two_level(double g1, double g2, double delta1, double delta2);
double cross_kerr_duffing(double g1, double g2, double delta1, double delta2,
                          double chi);

struct NonRwaCorrection {
    double order2 = 0.0;
    double order4 = 0.0;
    // Individual order-4 terms; the first two are the RWA terms, the rest
    // appear only without the rotating wave approximation.
    std::vector<PathContribution> terms;
    std::size_t num_rwa_terms = 2;
};

// Energy corrections for one cavity and one transmon without the rotating
// wave approximation, as a diagnostic for how strongly the counter-rotating
// terms perturb the dispersive picture.
NonRwaCorrection pt_energy_nonrwa(double omega_c, double omega_q, double chi,
                                  double g, int n);

}  // namespace kerrforge

#endif

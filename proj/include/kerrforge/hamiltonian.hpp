#ifndef KERRFORGE_HAMILTONIAN_HPP
#define KERRFORGE_HAMILTONIAN_HPP

#include "kerrforge/circuit.hpp"
#include "kerrforge/fock.hpp"

namespace kerrforge {

struct HamiltonianTerm {
    std::string description;
    MatrixXc matrix;
};

struct HamiltonianBundle {
    HilbertSpace space;
    OperatorMatrix hamiltonian;  // GHz (ordinary frequency units)
    std::vector<HamiltonianTerm> term_ledger;

    // Total excitation number: sum of cavity photon numbers and device
    // excitation levels.
    OperatorMatrix excitation_number() const;
};

// Assembles the full Hamiltonian from the circuit. Cavities contribute
// w a^dag a, two-level devices (w/2) sigma_z, Duffing devices
// w b^dag b + chi b^dag b^dag b b, multilevel devices sum_j w_j |j><j|.
// RWA couplings are g (a b^dag + a^dag b); rwa=false adds the
// counter-rotating g (a b + a^dag b^dag) for two-level and Duffing devices.
HamiltonianBundle build_hamiltonian(const Circuit& circuit,
                                    long dim_cap = (1L << 20));

// Single-excitation-sector 2x2 block of the Jaynes-Cummings model in the
// basis {|n, up>, |n+1, down>}.
Eigen::Matrix2d jc_block(int n, double omega_c, double omega_q, double g);

// 4x4 block of the one-cavity-two-qubit model with n+2 total excitations,
// basis {|n+2, gg>, |n+1, eg>, |n+1, ge>, |n, ee>}.
Eigen::Matrix4d dicke_block(int n, double omega_c, double delta1, double delta2,
                            double g1, double g2);

}  // namespace kerrforge

#endif

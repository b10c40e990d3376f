#include "kerrforge/hamiltonian.hpp"

#include <cmath>

namespace kerrforge {

OperatorMatrix HamiltonianBundle::excitation_number() const {
    MatrixXc total = MatrixXc::Zero(space.total_dim(), space.total_dim());
    for (int k = 0; k < space.num_subsystems(); ++k) {
        total += embed(number_operator(space.dim(k)), space, space.label(k)).entries;
    }
    return OperatorMatrix{space, std::move(total)};
}

namespace {

// Device on-site Hamiltonian in its own level basis.
MatrixXc device_hamiltonian(const DeviceSpec& dev) {
    const int d = dev.levels();
    MatrixXc h = MatrixXc::Zero(d, d);
    if (std::holds_alternative<TwoLevel>(dev.model)) {
        // (w/2) sigma_z, trace-free.
        const double w = dev.transition_frequency();
        h(0, 0) = -0.5 * w;
        h(1, 1) = 0.5 * w;
    } else {
        for (int m = 0; m < d; ++m) h(m, m) = dev.level_energy(m);
    }
    return h;
}

// Device raising operator weighted by the transition weights.
MatrixXc device_raising(const DeviceSpec& dev) {
    const int d = dev.levels();
    MatrixXc up = MatrixXc::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            up(k, j) = dev.transition_weight(j, k);
        }
    }
    return up;
}

}  // namespace

HamiltonianBundle build_hamiltonian(const Circuit& circuit, long dim_cap) {
    validate_structure(circuit);
    std::vector<std::pair<std::string, int>> subs;
    long total = 1;
    for (const auto& c : circuit.cavities) {
        subs.push_back({c.label, c.fock_dim});
        total *= c.fock_dim;
    }
    for (const auto& d : circuit.devices) {
        subs.push_back({d.label, d.levels()});
        total *= d.levels();
    }
    if (total > dim_cap) {
        throw std::runtime_error("build_hamiltonian: total dimension " +
                                 std::to_string(total) + " exceeds cap " +
                                 std::to_string(dim_cap));
    }
    HilbertSpace space(std::move(subs));

    HamiltonianBundle bundle;
    bundle.space = space;
    MatrixXc H = MatrixXc::Zero(space.total_dim(), space.total_dim());

    auto add_term = [&](std::string description, MatrixXc m) {
        H += m;
        bundle.term_ledger.push_back({std::move(description), std::move(m)});
    };

    for (const auto& c : circuit.cavities) {
        add_term("cavity " + c.label + ": w a^dag a",
                 c.frequency * embed(number_operator(c.fock_dim), space, c.label).entries);
    }
    for (const auto& d : circuit.devices) {
        add_term("device " + d.label + ": on-site levels",
                 embed(device_hamiltonian(d), space, d.label).entries);
    }
    for (const auto& cpl : circuit.couplings) {
        if (cpl.strength == 0.0) continue;
        const auto& cav = circuit.cavity(cpl.cavity_label);
        const auto& dev = circuit.device(cpl.device_label);
        const MatrixXc a = embed(annihilation(cav.fock_dim), space, cav.label).entries;
        const MatrixXc up = embed(device_raising(dev), space, dev.label).entries;
        MatrixXc rwa_term = cpl.strength * (a * up);
        rwa_term += rwa_term.adjoint().eval();
        add_term("coupling " + cpl.cavity_label + "--" + cpl.device_label +
                     ": g (a b^dag + a^dag b)",
                 std::move(rwa_term));
        if (!circuit.rwa) {
            if (std::holds_alternative<Multilevel>(dev.model)) {
                throw std::runtime_error(
                    "build_hamiltonian: non-RWA coupling not supported for "
                    "multilevel device " +
                    dev.label);
            }
            MatrixXc cr = cpl.strength * (a.adjoint() * up);
            cr += cr.adjoint().eval();
            add_term("coupling " + cpl.cavity_label + "--" + cpl.device_label +
                         ": g (a b + a^dag b^dag)",
                     std::move(cr));
        }
    }

    bundle.hamiltonian = OperatorMatrix{space, std::move(H)};
    if (!bundle.hamiltonian.is_hermitian()) {
        throw std::runtime_error("build_hamiltonian: assembled H is not Hermitian");
    }
    return bundle;
}

Eigen::Matrix2d jc_block(int n, double omega_c, double omega_q, double g) {
    if (n < 0) throw std::invalid_argument("jc_block: n < 0");
    Eigen::Matrix2d m;
    const double offdiag = g * std::sqrt(n + 1.0);
    m << n * omega_c + 0.5 * omega_q, offdiag,
         offdiag, (n + 1) * omega_c - 0.5 * omega_q;
    return m;
}

Eigen::Matrix4d dicke_block(int n, double omega_c, double delta1, double delta2,
                            double g1, double g2) {
    if (n < 0) throw std::invalid_argument("dicke_block: n < 0");
    const double dp = delta1 + delta2;
    const double dm = delta1 - delta2;
    const double s2 = std::sqrt(n + 2.0);
    const double s1 = std::sqrt(n + 1.0);
    const double e = (n + 1) * omega_c;
    Eigen::Matrix4d m;
    m << e + 0.5 * dp, g1 * s2,      g2 * s2,      0.0,
         g1 * s2,      e - 0.5 * dm, 0.0,          g2 * s1,
         g2 * s2,      0.0,          e + 0.5 * dm, g1 * s1,
         0.0,          g2 * s1,      g1 * s1,      e - 0.5 * dp;
    return m;
}

}  // namespace kerrforge

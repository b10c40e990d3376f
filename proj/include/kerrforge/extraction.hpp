#ifndef KERRFORGE_EXTRACTION_HPP
#define KERRFORGE_EXTRACTION_HPP

#include <map>
#include <string>
#include <vector>

#include "kerrforge/hamiltonian.hpp"
#include "kerrforge/perturbation.hpp"

namespace kerrforge {

struct AmbiguousLabeling : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WeakOverlap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DressedState {
    double energy = 0.0;  // GHz
    VectorXc vector;
    double overlap = 0.0;  // |<bare|dressed>|^2
};

// Assigns each requested bare occupation label the eigenvector maximizing
// its overlap with the bare product state. The search is restricted to an
// energy window around the bare energy. Assignment must be injective;
// overlap below 0.5 throws WeakOverlap, a double claim AmbiguousLabeling.
std::map<std::string, DressedState> label_dressed_states(
    const HamiltonianBundle& bundle, const std::vector<OccupationLabel>& labels);

// Key for the label map: canonical "label:occ,label:occ" with zeros omitted,
// "vac" for the ground label.
std::string occupation_key(const OccupationLabel& label);

struct SelfKerrFit {
    double self_kerr = 0.0;      // GHz
    double linear = 0.0;         // GHz
    double max_residual = 0.0;   // GHz
};

// Least-squares fit E(n) = E0 + A n + S n^2 over n = 0..n_max photons in
// the named cavity (devices in the ground state). n_max = 2 reduces to the
// exact second difference.
SelfKerrFit extract_self_kerr(const HamiltonianBundle& bundle,
                              const std::string& cavity_label, int n_max = 3);

// X = E_11 - E_10 - E_01 + E_00 from the labeled dressed energies.
double extract_cross_kerr(const HamiltonianBundle& bundle,
                          const std::string& cavity_a,
                          const std::string& cavity_b);

// Numeric counterpart of kerr_from_paths / kerr_closed_form.
KerrReport kerr_numeric(const Circuit& circuit, int n_max = 2);

}  // namespace kerrforge

#endif

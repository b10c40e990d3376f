#include "kerrforge/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace kerrforge {

namespace {

// Energy window around the bare energy searched for the matching dressed
// eigenvector; dispersive shifts are orders of magnitude smaller.
constexpr double kSearchWindow = 2.0;  // GHz

struct Spectrum {
    Eigen::VectorXd evals;
    MatrixXc evecs;
};

Spectrum diagonalize(const HamiltonianBundle& bundle) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(bundle.hamiltonian.entries);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("label_dressed_states: eigendecomposition failed");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

std::vector<int> to_occupations(const HilbertSpace& space,
                                const OccupationLabel& label) {
    std::vector<int> occ(space.num_subsystems(), 0);
    for (const auto& [name, n] : label.occupations) {
        occ[space.index_of(name)] = n;
    }
    return occ;
}

std::map<std::string, DressedState> label_with(
    const Spectrum& sp, const HamiltonianBundle& bundle,
    const std::vector<OccupationLabel>& labels) {
    const auto& space = bundle.space;
    std::map<std::string, DressedState> out;
    std::set<Eigen::Index> claimed;
    std::map<Eigen::Index, std::string> claimant;
    for (const auto& label : labels) {
        const long bare = space.flat_index(to_occupations(space, label));
        const double bare_energy =
            std::real(bundle.hamiltonian.entries(bare, bare));
        Eigen::Index best = -1;
        double best_overlap = -1.0;
        for (Eigen::Index k = 0; k < sp.evals.size(); ++k) {
            if (std::abs(sp.evals(k) - bare_energy) > kSearchWindow) continue;
            const double ov = std::norm(sp.evecs(bare, k));
            if (ov > best_overlap) {
                best_overlap = ov;
                best = k;
            }
        }
        const std::string key = occupation_key(label);
        // Strictly above 1/2 so the exactly tied resonant case (two dressed
        // partners at overlap 1/2 each) reports WeakOverlap, not an
        // arbitrary winner.
        if (best < 0 || best_overlap < 0.5 + 1e-9) {
            std::ostringstream os;
            os << "label_dressed_states: bare state " << key
               << " has no dressed partner with overlap >= 0.5 (best "
               << best_overlap << ")";
            throw WeakOverlap(os.str());
        }
        if (claimed.count(best)) {
            throw AmbiguousLabeling("label_dressed_states: labels " +
                                    claimant[best] + " and " + key +
                                    " claim the same eigenvector");
        }
        claimed.insert(best);
        claimant[best] = key;
        out[key] = DressedState{sp.evals(best), sp.evecs.col(best), best_overlap};
    }
    return out;
}

}  // namespace

std::string occupation_key(const OccupationLabel& label) {
    std::ostringstream os;
    bool any = false;
    for (const auto& [name, n] : label.occupations) {
        if (n == 0) continue;
        if (any) os << ",";
        os << name << ":" << n;
        any = true;
    }
    return any ? os.str() : "vac";
}

std::map<std::string, DressedState> label_dressed_states(
    const HamiltonianBundle& bundle,
    const std::vector<OccupationLabel>& labels) {
    return label_with(diagonalize(bundle), bundle, labels);
}

namespace {

SelfKerrFit self_kerr_from(const Spectrum& sp, const HamiltonianBundle& bundle,
                           const std::string& cavity_label, int n_max) {
    if (n_max < 2) throw std::invalid_argument("extract_self_kerr: n_max < 2");
    std::vector<OccupationLabel> labels;
    for (int n = 0; n <= n_max; ++n) {
        labels.push_back(OccupationLabel{{{cavity_label, n}}});
    }
    const auto dressed = label_with(sp, bundle, labels);
    Eigen::VectorXd e(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        e(n) = dressed.at(occupation_key(labels[n])).energy;
    }
    Eigen::MatrixXd design(n_max + 1, 3);
    for (int n = 0; n <= n_max; ++n) {
        design(n, 0) = 1.0;
        design(n, 1) = n;
        design(n, 2) = static_cast<double>(n) * n;
    }
    const Eigen::VectorXd coef =
        design.colPivHouseholderQr().solve(e);
    SelfKerrFit fit;
    fit.linear = coef(1);
    fit.self_kerr = coef(2);
    fit.max_residual = (e - design * coef).cwiseAbs().maxCoeff();
    return fit;
}

double cross_kerr_from(const Spectrum& sp, const HamiltonianBundle& bundle,
                       const std::string& a, const std::string& b) {
    std::vector<OccupationLabel> labels = {
        OccupationLabel{{}},
        OccupationLabel{{{a, 1}}},
        OccupationLabel{{{b, 1}}},
        OccupationLabel{{{a, 1}, {b, 1}}},
    };
    const auto dressed = label_with(sp, bundle, labels);
    return dressed.at(occupation_key(labels[3])).energy -
           dressed.at(occupation_key(labels[1])).energy -
           dressed.at(occupation_key(labels[2])).energy +
           dressed.at(occupation_key(labels[0])).energy;
}

}  // namespace

SelfKerrFit extract_self_kerr(const HamiltonianBundle& bundle,
                              const std::string& cavity_label, int n_max) {
    return self_kerr_from(diagonalize(bundle), bundle, cavity_label, n_max);
}

double extract_cross_kerr(const HamiltonianBundle& bundle,
                          const std::string& cavity_a,
                          const std::string& cavity_b) {
    return cross_kerr_from(diagonalize(bundle), bundle, cavity_a, cavity_b);
}

KerrReport kerr_numeric(const Circuit& circuit, int n_max) {
    const HamiltonianBundle bundle = build_hamiltonian(circuit);
    const Spectrum sp = diagonalize(bundle);
    const int nc = static_cast<int>(circuit.cavities.size());
    KerrReport rep;
    rep.method = "numeric";
    rep.self_kerr = Eigen::VectorXd::Zero(nc);
    rep.cross_kerr = Eigen::MatrixXd::Zero(nc, nc);
    rep.linear_shift = Eigen::VectorXd::Zero(nc);
    for (const auto& c : circuit.cavities) rep.cavity_labels.push_back(c.label);
    for (int i = 0; i < nc; ++i) {
        const auto fit =
            self_kerr_from(sp, bundle, rep.cavity_labels[i], n_max);
        rep.self_kerr(i) = fit.self_kerr;
        rep.linear_shift(i) = fit.linear - circuit.cavities[i].frequency;
    }
    for (int i = 0; i < nc; ++i) {
        for (int j = i + 1; j < nc; ++j) {
            const double x = cross_kerr_from(sp, bundle, rep.cavity_labels[i],
                                             rep.cavity_labels[j]);
            rep.cross_kerr(i, j) = x;
            rep.cross_kerr(j, i) = x;
        }
    }
    return rep;
}

}  // namespace kerrforge

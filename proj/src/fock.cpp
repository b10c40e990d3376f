#include "kerrforge/fock.hpp"

#include <cmath>
#include <numeric>

namespace kerrforge {

HilbertSpace::HilbertSpace(std::vector<std::pair<std::string, int>> subsystems) {
    if (subsystems.empty()) {
        throw std::invalid_argument("HilbertSpace: no subsystems");
    }
    total_dim_ = 1;
    for (auto& [label, dim] : subsystems) {
        if (dim < 2) {
            throw std::invalid_argument("HilbertSpace: dimension < 2 for " + label);
        }
        for (const auto& l : labels_) {
            if (l == label) {
                throw std::invalid_argument("HilbertSpace: duplicate label " + label);
            }
        }
        labels_.push_back(label);
        dims_.push_back(dim);
        total_dim_ *= dim;
    }
}

int HilbertSpace::index_of(const std::string& label) const {
    for (int k = 0; k < num_subsystems(); ++k) {
        if (labels_[k] == label) return k;
    }
    throw std::out_of_range("HilbertSpace: unknown label " + label);
}

bool HilbertSpace::has_label(const std::string& label) const {
    for (const auto& l : labels_) {
        if (l == label) return true;
    }
    return false;
}

long HilbertSpace::flat_index(const std::vector<int>& occupations) const {
    if (static_cast<int>(occupations.size()) != num_subsystems()) {
        throw std::invalid_argument("flat_index: occupation length mismatch");
    }
    long idx = 0;
    for (int k = 0; k < num_subsystems(); ++k) {
        if (occupations[k] < 0 || occupations[k] >= dims_[k]) {
            throw std::out_of_range("flat_index: occupation outside truncation");
        }
        idx = idx * dims_[k] + occupations[k];
    }
    return idx;
}

std::vector<int> HilbertSpace::occupations(long flat) const {
    std::vector<int> occ(num_subsystems());
    for (int k = num_subsystems() - 1; k >= 0; --k) {
        occ[k] = static_cast<int>(flat % dims_[k]);
        flat /= dims_[k];
    }
    return occ;
}

bool OperatorMatrix::is_hermitian(double tol) const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff() < tol;
}

void StateVector::normalize() {
    const double n = amplitudes.norm();
    if (n == 0.0) {
        throw std::invalid_argument("StateVector: zero norm");
    }
    amplitudes /= n;
}

MatrixXc annihilation(int dim) {
    if (dim < 2) {
        throw std::invalid_argument("annihilation: dim < 2");
    }
    MatrixXc a = MatrixXc::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

MatrixXc creation(int dim) { return annihilation(dim).adjoint(); }

MatrixXc number_operator(int dim) {
    MatrixXc n = MatrixXc::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

MatrixXc parity_operator(int dim) {
    MatrixXc p = MatrixXc::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return p;
}

OperatorMatrix embed(const MatrixXc& op, const HilbertSpace& space,
                     const std::string& label) {
    const int target = space.index_of(label);
    if (op.rows() != space.dim(target) || op.cols() != space.dim(target)) {
        throw std::invalid_argument("embed: operator dimension mismatch for " + label);
    }
    long left = 1, right = 1;
    for (int k = 0; k < target; ++k) left *= space.dim(k);
    for (int k = target + 1; k < space.num_subsystems(); ++k) right *= space.dim(k);

    const long d = space.dim(target);
    MatrixXc out = MatrixXc::Zero(space.total_dim(), space.total_dim());
    for (long l = 0; l < left; ++l) {
        for (long i = 0; i < d; ++i) {
            for (long j = 0; j < d; ++j) {
                const Complex v = op(i, j);
                if (v == Complex(0.0, 0.0)) continue;
                const long row0 = (l * d + i) * right;
                const long col0 = (l * d + j) * right;
                for (long r = 0; r < right; ++r) {
                    out(row0 + r, col0 + r) = v;
                }
            }
        }
    }
    return OperatorMatrix{space, std::move(out)};
}

VectorXc coherent_amplitudes(int dim, Complex alpha) {
    VectorXc c(dim);
    // c_n = e^{-|a|^2/2} a^n / sqrt(n!), built by recurrence.
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) {
        c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    }
    return c;
}

StateVector coherent_state(const HilbertSpace& space, const std::string& cavity_label,
                           Complex alpha) {
    const int target = space.index_of(cavity_label);
    const int d = space.dim(target);
    VectorXc c = coherent_amplitudes(d, alpha);
    const double kept = c.squaredNorm();
    if (kept < 1.0 - 1e-8) {
        throw TruncationError("coherent_state: truncation too small for |alpha|=" +
                              std::to_string(std::abs(alpha)) + ", lost norm " +
                              std::to_string(1.0 - kept));
    }
    StateVector psi{space, VectorXc::Zero(space.total_dim())};
    std::vector<int> occ(space.num_subsystems(), 0);
    for (int n = 0; n < d; ++n) {
        occ[target] = n;
        psi.amplitudes(space.flat_index(occ)) = c(n);
    }
    psi.normalize();
    return psi;
}

StateVector cat_state(const HilbertSpace& space, const std::string& cavity_label,
                      const std::vector<Complex>& components,
                      const std::vector<Complex>& weights) {
    if (components.size() != weights.size() || components.empty()) {
        throw std::invalid_argument("cat_state: components/weights mismatch");
    }
    bool any = false;
    for (const auto& w : weights) {
        if (w != Complex(0.0, 0.0)) any = true;
    }
    if (!any) {
        throw std::invalid_argument("cat_state: all weights zero");
    }
    const int target = space.index_of(cavity_label);
    const int d = space.dim(target);
    VectorXc mode = VectorXc::Zero(d);
    for (std::size_t k = 0; k < components.size(); ++k) {
        VectorXc c = coherent_amplitudes(d, components[k]);
        if (c.squaredNorm() < 1.0 - 1e-8) {
            throw TruncationError("cat_state: truncation too small for component " +
                                  std::to_string(k));
        }
        mode += weights[k] * c;
    }
    if (mode.norm() < 1e-14) {
        throw std::invalid_argument("cat_state: components cancel to zero");
    }
    StateVector psi{space, VectorXc::Zero(space.total_dim())};
    std::vector<int> occ(space.num_subsystems(), 0);
    for (int n = 0; n < d; ++n) {
        occ[target] = n;
        psi.amplitudes(space.flat_index(occ)) = mode(n);
    }
    psi.normalize();
    return psi;
}

Complex expectation(const StateVector& psi, const OperatorMatrix& op) {
    if (!(psi.space == op.space)) {
        throw std::invalid_argument("expectation: space mismatch");
    }
    return psi.amplitudes.dot(op.entries * psi.amplitudes);
}

}  // namespace kerrforge

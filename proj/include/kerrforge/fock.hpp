#ifndef KERRFORGE_FOCK_HPP
#define KERRFORGE_FOCK_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kerrforge {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ordered tensor product of truncated subsystem spaces. The subsystem
// order is fixed at construction and defines the kron convention:
// the first subsystem is the slowest-varying index.
class HilbertSpace {
public:
    HilbertSpace() = default;
    HilbertSpace(std::vector<std::pair<std::string, int>> subsystems);

    int num_subsystems() const { return static_cast<int>(dims_.size()); }
    int dim(int k) const { return dims_.at(k); }
    int dim(const std::string& label) const { return dims_.at(index_of(label)); }
    long total_dim() const { return total_dim_; }
    const std::string& label(int k) const { return labels_.at(k); }
    int index_of(const std::string& label) const;
    bool has_label(const std::string& label) const;

    // Flat index of a product basis state given per-subsystem occupations.
    long flat_index(const std::vector<int>& occupations) const;
    std::vector<int> occupations(long flat) const;

    bool operator==(const HilbertSpace& other) const {
        return labels_ == other.labels_ && dims_ == other.dims_;
    }

private:
    std::vector<std::string> labels_;
    std::vector<int> dims_;
    long total_dim_ = 0;
};

struct OperatorMatrix {
    HilbertSpace space;
    MatrixXc entries;

    bool is_hermitian(double tol = 1e-12) const;
};

struct StateVector {
    HilbertSpace space;
    VectorXc amplitudes;

    double norm() const { return amplitudes.norm(); }
    void normalize();
};

// Single-mode ladder operators on a dim-level truncation.
MatrixXc annihilation(int dim);
MatrixXc creation(int dim);
MatrixXc number_operator(int dim);
MatrixXc parity_operator(int dim);

// Lift a single-subsystem operator to the full space, identity elsewhere.
OperatorMatrix embed(const MatrixXc& op, const HilbertSpace& space,
                     const std::string& label);

// |alpha> with Poisson amplitudes on the named cavity, all other
// subsystems in their ground state. Throws TruncationError if the
// truncated norm falls below 1 - 1e-8.
StateVector coherent_state(const HilbertSpace& space, const std::string& cavity_label,
                           Complex alpha);

// Normalized sum_k w_k |alpha_k>; the normalization comes from the
// numeric Gram matrix of the truncated components.
StateVector cat_state(const HilbertSpace& space, const std::string& cavity_label,
                      const std::vector<Complex>& components,
                      const std::vector<Complex>& weights);

// Single-mode coherent amplitudes (helper shared with Wigner code).
VectorXc coherent_amplitudes(int dim, Complex alpha);

Complex expectation(const StateVector& psi, const OperatorMatrix& op);

}  // namespace kerrforge

#endif

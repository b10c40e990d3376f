#ifndef KERRFORGE_DYNAMICS_HPP
#define KERRFORGE_DYNAMICS_HPP

#include <string>
#include <vector>

#include "kerrforge/hamiltonian.hpp"

namespace kerrforge {

// Times are microseconds at the API surface; internally the phase applied
// over t is exp(-2*pi*i*H*t) with H in GHz and t in ns (1 us = 1000 ns).

struct TimeTrace {
    std::vector<double> times_us;
    std::vector<std::pair<std::string, std::vector<double>>> series;

    const std::vector<double>& column(const std::string& name) const;
};

// Exact propagator over an immutable Hamiltonian. Dense eigendecomposition
// up to 4096 dimensions, Lanczos/Krylov with per-step tolerance 1e-10 above.
class Propagator {
public:
    enum class Method { Auto, Dense, Krylov };

    explicit Propagator(const HamiltonianBundle& bundle,
                        Method method = Method::Auto);

    const HilbertSpace& space() const { return space_; }
    Method method() const { return method_; }

    StateVector apply(const StateVector& psi, double t_us) const;
    std::vector<StateVector> evolve(const StateVector& psi,
                                    const std::vector<double>& times_us) const;

private:
    StateVector krylov_apply(const StateVector& psi, double t_ns) const;

    HilbertSpace space_;
    Method method_;
    Eigen::VectorXd evals_;  // dense path, GHz
    MatrixXc evecs_;
    MatrixXc h_;  // Krylov path
};

// Uniform time grid, endpoints included.
std::vector<double> time_grid(double t_max_us, int points = 2000);

// |<psi(t)| a |psi(t)>| for the named cavity; column "abs_a".
TimeTrace amplitude_trace(const std::vector<StateVector>& states,
                          const std::vector<double>& times_us,
                          const std::string& cavity_label);

struct ReducedDensity {
    HilbertSpace space;
    MatrixXc rho;
};

ReducedDensity partial_trace(const StateVector& psi,
                             const std::vector<std::string>& keep_labels);

double purity(const ReducedDensity& rho);

// Reference family sum_k w_k |alpha_k e^{i theta}> on a single cavity mode,
// swept over the global phase-space rotation theta.
struct ReferenceFamily {
    std::vector<Complex> components;
    std::vector<Complex> weights;  // same length; {1} for a plain coherent state

    static ReferenceFamily coherent(Complex alpha);
    static ReferenceFamily cat(const std::vector<Complex>& components,
                               const std::vector<Complex>& weights);
};

// Uhlmann fidelity sqrt(<ref|rho_cav|ref>) of the cavity reduced state
// against the pure reference, extremized over the rotation angle theta
// (720-point scan refined by golden section to 1e-6 in theta).
double fidelity_min_rotation(const StateVector& psi,
                             const std::string& cavity_label,
                             const ReferenceFamily& family);

struct WignerGrid {
    std::vector<Complex> points;
    std::vector<double> values;
    // Points with |beta|^2 > 0.5 * fock_dim, where the truncated parity sum
    // is unreliable.
    std::vector<bool> clipped;
};

// W(beta) = (2/pi) tr(rho D(beta) P D(beta)^dag), P the photon parity.
// Normalized so the phase-space integral of W is 1.
WignerGrid wigner(const ReducedDensity& rho_cavity,
                  const std::vector<Complex>& points);
// Serial reference implementation (same contract, no OpenMP).
WignerGrid wigner_serial(const ReducedDensity& rho_cavity,
                         const std::vector<Complex>& points);

// Square grid helper: side x side points covering [-extent, extent]^2.
std::vector<Complex> square_grid(double extent, int side);

struct Revival {
    double time_us = 0.0;
    double amplitude = 0.0;
};

// Local maxima of a trace column above floor_fraction times the initial
// value, located by quadratic interpolation through each peak sample.
// Under a self-Kerr evolution the amplitude peaks alternate between the
// mirrored (-alpha) and the original coherent state; the full revival of
// the initial state is the second peak.
std::vector<Revival> detect_revivals(const TimeTrace& trace,
                                     const std::string& column,
                                     double floor_fraction = 0.5);

// Time of the full revival of the initial state (second amplitude peak).
// Throws if fewer than two peaks are present.
double full_revival_time(const TimeTrace& trace, const std::string& column,
                         double floor_fraction = 0.5);

}  // namespace kerrforge

#endif

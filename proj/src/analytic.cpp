#include "kerrforge/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace kerrforge {

JCEigenpair jc_eigenpair(int n, double omega_c, double omega_q, double g) {
    if (n < 0) throw std::invalid_argument("jc_eigenpair: n < 0");
    const double delta = omega_c - omega_q;
    const double rabi = std::sqrt(4.0 * g * g * (n + 1.0) + delta * delta);
    JCEigenpair out;
    out.energy_plus = (n + 0.5) * omega_c + 0.5 * rabi;
    out.energy_minus = (n + 0.5) * omega_c - 0.5 * rabi;
    out.mixing_angle = std::atan2(2.0 * g * std::sqrt(n + 1.0), delta);
    return out;
}

std::pair<double, double> jc_dressed_coefficients(double mixing_angle) {
    return {std::cos(0.5 * mixing_angle), std::sin(0.5 * mixing_angle)};
}

double jc_dispersive_energy(int n, double omega_c, double delta, double g) {
    const double r2 = g * g / delta;
    const double r4 = g * g * g * g / (delta * delta * delta);
    return (omega_c - r2 + 2.0 * r4) * n + r4 * static_cast<double>(n) * n;
}

std::array<double, 4> symmetric_1c2q_eigenvalues(int n, double omega_c,
                                                 double delta, double g) {
    if (n < 0) throw std::invalid_argument("symmetric_1c2q_eigenvalues: n < 0");
    const double e = (n + 1.0) * omega_c;
    const double split = std::sqrt(4.0 * g * g * (n + 1.5) + delta * delta);
    return {e, e, e + split, e - split};
}

}  // namespace kerrforge

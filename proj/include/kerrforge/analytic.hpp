#ifndef KERRFORGE_ANALYTIC_HPP
#define KERRFORGE_ANALYTIC_HPP

#include <array>
#include <utility>

namespace kerrforge {

struct JCEigenpair {
    double energy_plus;   // |n,+> branch, GHz
    double energy_minus;  // |n,-> branch, GHz
    double mixing_angle;  // theta_n = atan2(2 g sqrt(n+1), Delta)
};

// Closed-form eigenvalues and mixing angle of the (n+1)-excitation
// Jaynes-Cummings block: E = (n+1/2) w_c +/- sqrt(4 g^2 (n+1) + Delta^2)/2.
// Delta = 0 gives theta_n = pi/2 (equal superpositions).
JCEigenpair jc_eigenpair(int n, double omega_c, double omega_q, double g);

// Dressed-state coefficients (cos(theta/2), sin(theta/2)) for |n,+> in the
// {|n+1,down>, |n,up>} basis; |n,-> is the orthogonal complement.
std::pair<double, double> jc_dressed_coefficients(double mixing_angle);

// Dispersive expansion relative to the n=0 level of the same branch:
// E(n) = (w_c - g^2/Delta + 2 g^4/Delta^3) n + (g^4/Delta^3) n^2,
// correct to fourth order in g/Delta. This matches the exact block
// eigenvalues E_n^- referenced to E_0^- up to O((g/Delta)^6).
double jc_dispersive_energy(int n, double omega_c, double delta, double g);

// Exact eigenvalues of the symmetric one-cavity-two-qubit block
// (g1 = g2 = g, Delta1 = -Delta2 = Delta): {(n+1) w_c (twice),
// (n+1) w_c +/- sqrt(4 g^2 (n + 3/2) + Delta^2)}. The first two belong to
// the same-qubit-state branch, whose spectrum is exactly linear in n.
std::array<double, 4> symmetric_1c2q_eigenvalues(int n, double omega_c,
                                                 double delta, double g);

}  // namespace kerrforge

#endif

#ifndef KERRFORGE_TESTS_PRESETS_HPP
#define KERRFORGE_TESTS_PRESETS_HPP

// Random dispersive preset circuits shared by the equivalence tests and
// the acceptance suite. Parameters are drawn away from every denominator
// of the fourth-order expressions.

#include <random>
#include <string>

#include "kerrforge/circuit.hpp"

namespace kerrforge::presets {

struct Sampler {
    std::mt19937 rng;

    explicit Sampler(unsigned seed) : rng(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    double signed_uniform(double lo, double hi) {
        const double v = uniform(lo, hi);
        return uniform(0.0, 1.0) < 0.5 ? -v : v;
    }
    double chi() { return signed_uniform(0.05, 0.25); }
    double coupling() { return uniform(0.03, 0.08); }
    // Detuning well separated from zero and from the +-chi poles.
    double detuning() { return signed_uniform(0.7, 2.5); }
};

inline Circuit one_cavity_one_transmon(Sampler& s) {
    Circuit c;
    const double wc = s.uniform(6.0, 10.0);
    c.cavities.push_back({"c1", wc, 4});
    c.devices.push_back({"q1", Duffing{wc - s.detuning(), s.chi(), 4}});
    c.couplings.push_back({"c1", "q1", s.coupling()});
    return c;
}

inline Circuit one_cavity_two_duffing(Sampler& s) {
    Circuit c;
    const double wc = s.uniform(6.0, 10.0);
    c.cavities.push_back({"c1", wc, 4});
    double d1 = s.detuning(), d2 = s.detuning();
    // Keep the joint intermediate away from degeneracy.
    while (std::abs(d1 + d2) < 0.05) d2 = s.detuning();
    c.devices.push_back({"q1", Duffing{wc - d1, s.chi(), 4}});
    c.devices.push_back({"q2", Duffing{wc - d2, s.chi(), 4}});
    c.couplings.push_back({"c1", "q1", s.coupling()});
    c.couplings.push_back({"c1", "q2", s.coupling()});
    return c;
}

inline void two_cavities(Sampler& s, Circuit& c) {
    const double w1 = s.uniform(6.0, 10.0);
    double w2 = s.uniform(6.0, 10.0);
    while (std::abs(w1 - w2) < 0.15) w2 = s.uniform(6.0, 10.0);
    c.cavities.push_back({"c1", w1, 4});
    c.cavities.push_back({"c2", w2, 4});
}

inline bool shared_device_ok(const Circuit& c, double wq, double chi) {
    // Denominators of the shared-device terms.
    const double d1 = c.cavities[0].frequency - wq;
    const double d2 = c.cavities[1].frequency - wq;
    return std::abs(d1) > 0.5 && std::abs(d2) > 0.5 &&
           std::abs(d1 + d2) > 0.05 && std::abs(d1 + d2 - 2.0 * chi) > 0.05;
}

inline Circuit two_cavities_one_qubit(Sampler& s) {
    Circuit c;
    two_cavities(s, c);
    double wq = s.uniform(4.0, 12.0);
    while (!shared_device_ok(c, wq, 0.0)) wq = s.uniform(4.0, 12.0);
    c.devices.push_back({"q1", TwoLevel{wq}});
    c.couplings.push_back({"c1", "q1", s.coupling()});
    c.couplings.push_back({"c2", "q1", s.coupling()});
    return c;
}

inline Circuit two_cavities_one_transmon(Sampler& s) {
    Circuit c;
    two_cavities(s, c);
    const double chi = s.chi();
    double wq = s.uniform(4.0, 12.0);
    while (!shared_device_ok(c, wq, chi)) wq = s.uniform(4.0, 12.0);
    c.devices.push_back({"q1", Duffing{wq, chi, 4}});
    c.couplings.push_back({"c1", "q1", s.coupling()});
    c.couplings.push_back({"c2", "q1", s.coupling()});
    return c;
}

inline Circuit two_cavities_two_duffing(Sampler& s) {
    Circuit c;
    two_cavities(s, c);
    const double chi1 = s.chi(), chi2 = s.chi();
    double w1 = s.uniform(4.0, 12.0), w2 = s.uniform(4.0, 12.0);
    while (!shared_device_ok(c, w1, chi1)) w1 = s.uniform(4.0, 12.0);
    auto pair_ok = [&](double wq) {
        // Mixed two-device intermediate: w_c1 + w_c2 - w_q1 - w_q2.
        const double den = c.cavities[0].frequency + c.cavities[1].frequency -
                           w1 - wq;
        return shared_device_ok(c, wq, chi2) && std::abs(den) > 0.05 &&
               std::abs(w1 - wq) > 0.05;
    };
    while (!pair_ok(w2)) w2 = s.uniform(4.0, 12.0);
    c.devices.push_back({"q1", Duffing{w1, chi1, 4}});
    c.devices.push_back({"q2", Duffing{w2, chi2, 4}});
    c.couplings.push_back({"c1", "q1", s.coupling()});
    c.couplings.push_back({"c2", "q1", s.coupling()});
    c.couplings.push_back({"c1", "q2", s.coupling()});
    c.couplings.push_back({"c2", "q2", s.coupling()});
    return c;
}

// Three-site chain: on-site qubits above their cavities, intermediary
// qubits below each adjacent pair.
inline Circuit array_segment(Sampler& s) {
    Circuit c;
    const double base = s.uniform(8.5, 9.5);
    for (int i = 0; i < 3; ++i) {
        c.cavities.push_back({"c" + std::to_string(i + 1), base + 0.21 * i, 4});
    }
    for (int i = 0; i < 2; ++i) {
        const std::string label = "b" + std::to_string(i + 1);
        const double wq = c.cavities[i].frequency - s.uniform(0.8, 1.6);
        c.devices.push_back({label, Duffing{wq, s.chi(), 4}});
        c.couplings.push_back({c.cavities[i].label, label, s.coupling()});
        c.couplings.push_back({c.cavities[i + 1].label, label, s.coupling()});
    }
    for (int i = 0; i < 3; ++i) {
        const std::string label = "q" + std::to_string(i + 1);
        const double wq = c.cavities[i].frequency + s.uniform(1.2, 2.2);
        c.devices.push_back({label, Duffing{wq, s.chi(), 4}});
        c.couplings.push_back({c.cavities[i].label, label, s.coupling()});
    }
    return c;
}

}  // namespace kerrforge::presets

#endif

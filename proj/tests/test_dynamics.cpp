#include <doctest.h>

#include <cmath>
#include <complex>

#include "kerrforge/dynamics.hpp"

using namespace kerrforge;

namespace {

Circuit jc_circuit() {
    Circuit c;
    c.cavities.push_back({"c1", 8.0, 16});
    c.devices.push_back({"q1", TwoLevel{7.0}});
    c.couplings.push_back({"c1", "q1", 0.1});
    return c;
}

// Pure Kerr cavity H = L n + S n^2, built by hand so the evolution can be
// checked against the exact coherent-state solution
//   <a>(t) = alpha exp(-2 pi i (L + S) t) exp(|alpha|^2 (e^{-4 pi i S t} - 1))
// with t in ns.
HamiltonianBundle kerr_bundle(int dim, double linear, double kerr) {
    HilbertSpace space({{"c1", dim}});
    MatrixXc n = number_operator(dim);
    MatrixXc h = linear * n + kerr * n * n;
    return HamiltonianBundle{space, OperatorMatrix{space, h}, {}};
}

}  // namespace

TEST_CASE("time_grid is uniform and includes both endpoints") {
    const auto t = time_grid(2.0, 5);
    REQUIRE(t.size() == 5);
    CHECK(t.front() == doctest::Approx(0.0));
    CHECK(t.back() == doctest::Approx(2.0));
    CHECK(t[1] == doctest::Approx(0.5));
    CHECK(t[3] == doctest::Approx(1.5));
}

TEST_CASE("free cavity: amplitude magnitude and norm are conserved") {
    Circuit c;
    c.cavities.push_back({"c1", 8.0, 24});
    const HamiltonianBundle b = build_hamiltonian(c);
    const Propagator prop(b);
    const StateVector psi0 = coherent_state(b.space, "c1", Complex(1.2, 0.0));

    const auto times = time_grid(0.5, 40);
    const auto states = prop.evolve(psi0, times);
    const auto trace = amplitude_trace(states, times, "c1");
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK(trace.column("abs_a")[k] == doctest::Approx(1.2).epsilon(1e-9));
        CHECK(states[k].norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("dense and Krylov propagators agree") {
    const HamiltonianBundle b = build_hamiltonian(jc_circuit());
    const Propagator dense(b, Propagator::Method::Dense);
    const Propagator krylov(b, Propagator::Method::Krylov);
    CHECK(dense.method() == Propagator::Method::Dense);
    CHECK(krylov.method() == Propagator::Method::Krylov);

    const StateVector psi0 = coherent_state(b.space, "c1", Complex(1.0, 0.5));
    for (double t : {0.013, 0.21, 1.7}) {
        const StateVector a = dense.apply(psi0, t);
        const StateVector b2 = krylov.apply(psi0, t);
        CHECK((a.amplitudes - b2.amplitudes).norm() < 1e-8);
    }
}

TEST_CASE("evolution composes and conserves norm and energy") {
    const HamiltonianBundle b = build_hamiltonian(jc_circuit());
    const Propagator prop(b);
    const StateVector psi0 = coherent_state(b.space, "c1", Complex(1.3, 0.0));

    const StateVector one = prop.apply(psi0, 0.37);
    const StateVector two = prop.apply(one, 0.63);
    const StateVector direct = prop.apply(psi0, 1.0);
    CHECK((two.amplitudes - direct.amplitudes).norm() < 1e-8);

    const Complex e0 = expectation(psi0, b.hamiltonian);
    for (double t : {0.1, 1.0, 10.0}) {
        const StateVector psi = prop.apply(psi0, t);
        CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-9));
        const Complex e = expectation(psi, b.hamiltonian);
        CHECK(std::abs(e - e0) < 1e-8 * std::abs(e0));
    }
}

TEST_CASE("Kerr evolution matches the exact coherent-state amplitude") {
    const double kerr = 5e-4;  // GHz -> full revival at 2 us
    const HamiltonianBundle b = kerr_bundle(30, 0.0, kerr);
    const Propagator prop(b);
    const double alpha = 1.5;
    const StateVector psi0 = coherent_state(b.space, "c1", alpha);

    const auto times = time_grid(2.3, 800);
    const auto states = prop.evolve(psi0, times);
    const auto trace = amplitude_trace(states, times, "c1");
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t_ns = 1000.0 * times[k];
        const Complex phase =
            std::exp(Complex(0.0, -4.0 * M_PI * kerr * t_ns)) - 1.0;
        const double expected =
            alpha * std::abs(std::exp(alpha * alpha * phase));
        CHECK(trace.column("abs_a")[k] ==
              doctest::Approx(expected).epsilon(1e-6));
    }

    // Peaks alternate mirrored/original: 1 us (mirror) and 2 us (revival).
    const auto peaks = detect_revivals(trace, "abs_a");
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].time_us == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(peaks[0].amplitude == doctest::Approx(alpha).epsilon(1e-3));
    CHECK(full_revival_time(trace, "abs_a") ==
          doctest::Approx(2.0).epsilon(1e-3));

    // The mirror peak really is the mirrored state.
    const int k_mirror = 800 / 23 * 10;  // nearest sample to 1 us
    const StateVector at_mirror = prop.apply(psi0, 1.0);
    const OperatorMatrix a_op{b.space, annihilation(30)};
    const Complex mean_a = expectation(at_mirror, a_op);
    CHECK(mean_a.real() == doctest::Approx(-alpha).epsilon(1e-6));
    (void)k_mirror;
}

TEST_CASE("column lookup rejects unknown names") {
    TimeTrace trace;
    trace.times_us = {0.0, 1.0};
    trace.series.push_back({"abs_a", {1.0, 0.5}});
    CHECK(trace.column("abs_a")[1] == doctest::Approx(0.5));
    CHECK_THROWS(trace.column("nope"));
}

TEST_CASE("partial trace: product state pure, Bell pair maximally mixed") {
    HilbertSpace space({{"c1", 2}, {"c2", 2}});
    StateVector bell{space, VectorXc::Zero(4)};
    bell.amplitudes(space.flat_index({0, 0})) = 1.0 / std::sqrt(2.0);
    bell.amplitudes(space.flat_index({1, 1})) = 1.0 / std::sqrt(2.0);
    const ReducedDensity mixed = partial_trace(bell, {"c1"});
    CHECK(purity(mixed) == doctest::Approx(0.5).epsilon(1e-12));

    StateVector prod{space, VectorXc::Zero(4)};
    prod.amplitudes(space.flat_index({1, 0})) = 1.0;
    CHECK(purity(partial_trace(prod, {"c1"})) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(purity(partial_trace(prod, {"c2"})) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Purity of the reduced Bell block stays within [1/dim, 1].
    CHECK(purity(mixed) >= 0.5 - 1e-12);
    CHECK(purity(mixed) <= 1.0 + 1e-12);
}

TEST_CASE("fidelity against rotating references") {
    Circuit c;
    c.cavities.push_back({"c1", 8.0, 24});
    const HamiltonianBundle b = build_hamiltonian(c);
    const Propagator prop(b);
    const Complex alpha(1.4, 0.0);
    const StateVector psi0 = coherent_state(b.space, "c1", alpha);

    // Free evolution only rotates the coherent state; the rotation sweep
    // recovers unit fidelity at every time.
    const auto family = ReferenceFamily::coherent(alpha);
    for (double t : {0.0, 0.11, 0.43}) {
        const StateVector psi = prop.apply(psi0, t);
        CHECK(fidelity_min_rotation(psi, "c1", family) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }

    // A reference with a different magnitude stays mismatched under every
    // rotation: best overlap is exp(-|1.4 - 0.7|^2 / 2).
    const auto wrong = ReferenceFamily::coherent(Complex(0.7, 0.0));
    CHECK(fidelity_min_rotation(psi0, "c1", wrong) ==
          doctest::Approx(std::exp(-0.5 * 0.49)).epsilon(1e-4));
}

TEST_CASE("quarter-revival Kerr state is a two-component cat") {
    const double kerr = 5e-4;
    const HamiltonianBundle b = kerr_bundle(30, 0.0, kerr);
    const Propagator prop(b);
    const double alpha = 1.5;
    const StateVector psi0 = coherent_state(b.space, "c1", alpha);

    // Quarter of the full revival: t_ns = 1/(4 kerr) -> 0.5 us.
    const StateVector psi = prop.apply(psi0, 0.5);
    const Complex i(0.0, 1.0);
    const auto cat = ReferenceFamily::cat(
        {i * alpha, -i * alpha},
        {std::exp(-i * (M_PI / 4.0)), std::exp(i * (M_PI / 4.0))});
    CHECK(fidelity_min_rotation(psi, "c1", cat) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Wigner function: vacuum and coherent values, serial equals parallel") {
    HilbertSpace space({{"c1", 20}});
    StateVector vac{space, VectorXc::Zero(20)};
    vac.amplitudes(0) = 1.0;
    const ReducedDensity rho_vac = partial_trace(vac, {"c1"});

    const std::vector<Complex> pts = {Complex(0.0, 0.0), Complex(1.0, 0.0),
                                      Complex(0.0, 1.5)};
    const WignerGrid w = wigner(rho_vac, pts);
    CHECK(w.values[0] == doctest::Approx(2.0 / M_PI).epsilon(1e-10));
    // Vacuum W(beta) = (2/pi) exp(-2 |beta|^2).
    CHECK(w.values[1] ==
          doctest::Approx(2.0 / M_PI * std::exp(-2.0)).epsilon(1e-8));
    CHECK(w.values[2] ==
          doctest::Approx(2.0 / M_PI * std::exp(-4.5)).epsilon(1e-8));

    const Complex alpha(0.9, -0.4);
    const StateVector coh = coherent_state(space, "c1", alpha);
    const ReducedDensity rho_coh = partial_trace(coh, {"c1"});
    const auto grid = square_grid(3.0, 41);
    const WignerGrid wp = wigner(rho_coh, grid);
    const WignerGrid ws = wigner_serial(rho_coh, grid);
    REQUIRE(wp.values.size() == grid.size());
    double max_diff = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        max_diff = std::max(max_diff, std::abs(wp.values[k] - ws.values[k]));
        CHECK(wp.clipped[k] == ws.clipped[k]);
    }
    CHECK(max_diff < 1e-12);

    // Peak sits at beta = alpha with the coherent peak value 2/pi.
    const WignerGrid peak = wigner(rho_coh, {alpha});
    CHECK(peak.values[0] == doctest::Approx(2.0 / M_PI).epsilon(1e-6));
}

TEST_CASE("Wigner grid integrates to one and flags clipped points") {
    // Truncation 40 keeps the whole [-3, 3]^2 box inside the reliable
    // region |beta|^2 <= 20.
    HilbertSpace space({{"c1", 40}});
    const StateVector coh = coherent_state(space, "c1", Complex(1.0, 0.0));
    const ReducedDensity rho = partial_trace(coh, {"c1"});

    const double extent = 3.0;
    const int side = 81;
    const auto grid = square_grid(extent, side);
    const WignerGrid w = wigner(rho, grid);
    const double cell = std::pow(2.0 * extent / (side - 1), 2);
    double integral = 0.0;
    for (double v : w.values) integral += v * cell;
    CHECK(integral == doctest::Approx(1.0).epsilon(0.02));

    // |beta|^2 beyond half the truncation is flagged.
    HilbertSpace small({{"c1", 24}});
    const StateVector coh24 = coherent_state(small, "c1", Complex(1.0, 0.0));
    const ReducedDensity rho24 = partial_trace(coh24, {"c1"});
    const WignerGrid far =
        wigner(rho24, {Complex(4.0, 0.0), Complex(0.5, 0.5)});
    CHECK(far.clipped[0]);          // 16 > 12
    CHECK_FALSE(far.clipped[1]);    // 0.5 < 12
}

TEST_CASE("square_grid covers the requested square") {
    const auto g = square_grid(2.0, 5);
    REQUIRE(g.size() == 25);
    CHECK(g.front() == Complex(-2.0, -2.0));
    CHECK(g.back() == Complex(2.0, 2.0));
}

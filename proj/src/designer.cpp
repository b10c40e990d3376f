#include "kerrforge/designer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kerrforge/extraction.hpp"

namespace kerrforge {

double bisect_root(const std::function<double(double)>& fn, double lo,
                   double hi, double tol, int scan_points) {
    if (!(hi > lo)) throw std::invalid_argument("bisect_root: empty interval");
    // Sample points on top of a pole evaluate as NaN and are skipped,
    // whether the objective returns inf or throws PoleProximity.
    auto f = [&](double x) -> double {
        try {
            return fn(x);
        } catch (const PoleProximity&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    std::vector<double> xs(scan_points + 1), ys(scan_points + 1);
    for (int i = 0; i <= scan_points; ++i) {
        xs[i] = lo + (hi - lo) * i / scan_points;
        ys[i] = f(xs[i]);
        if (std::isfinite(ys[i]) && std::abs(ys[i]) < tol) return xs[i];
    }
    for (int i = 0; i < scan_points; ++i) {
        if (!std::isfinite(ys[i]) || !std::isfinite(ys[i + 1])) continue;
        if (ys[i] == 0.0) return xs[i];
        if (ys[i] * ys[i + 1] > 0.0) continue;
        double a = xs[i], b = xs[i + 1], fa = ys[i];
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a));
             ++it) {
            const double m = 0.5 * (a + b);
            const double fm = f(m);
            if (!std::isfinite(fm)) break;
            if (fa * fm <= 0.0) {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        const double root = 0.5 * (a + b);
        // A pole bracket also shows a sign change; the residual check
        // rejects it.
        if (std::abs(f(root)) < tol) return root;
    }
    throw NoRootInBounds("bisect_root: no admissible root in [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

namespace {

void require_dispersive(const Circuit& circuit, const std::string& who) {
    for (const auto& d : validate_dispersive(circuit)) {
        if (d.cls == DispersiveClass::NonDispersive) {
            throw DispersiveViolation(who + ": coupling " + d.cavity_label +
                                      "--" + d.device_label +
                                      " is non-dispersive (g/|Delta| = " +
                                      std::to_string(d.ratio) + ")");
        }
    }
}

double device_self_kerr(const DeviceSpec& dev, double g, double delta) {
    if (std::holds_alternative<Duffing>(dev.model) && dev.levels() >= 3) {
        return self_kerr_duffing(g, delta,
                                 std::get<Duffing>(dev.model).anharmonicity);
    }
    return self_kerr_two_level(g, delta);
}

DeviceSpec with_frequency(DeviceSpec dev, double freq) {
    if (auto* tl = std::get_if<TwoLevel>(&dev.model)) {
        tl->frequency = freq;
    } else if (auto* du = std::get_if<Duffing>(&dev.model)) {
        du->frequency = freq;
    } else {
        throw std::invalid_argument(
            "designer: multilevel devices have no single tunable frequency");
    }
    return dev;
}

double device_frequency(const DeviceSpec& dev) {
    return dev.transition_frequency();
}

}  // namespace

Circuit solve_self_kerr_cancellation(const Circuit& base,
                                     const std::string& cavity_label,
                                     const DeviceSearchSpace& search) {
    const double s_base = kerr_closed_form(base).self(cavity_label);
    const double w_c = base.cavity(cavity_label).frequency;

    auto assemble = [&](double freq) {
        Circuit c = base;
        c.devices.push_back(with_frequency(search.device, freq));
        c.couplings.push_back(
            {cavity_label, search.device.label, search.coupling});
        return c;
    };

    // Mirrored analytic solution: one fixed Duffing device, a Duffing
    // template with opposite anharmonicity and equal coupling.
    if (base.devices.size() == 1 && s_base != 0.0) {
        const auto* fixed = std::get_if<Duffing>(&base.devices.front().model);
        const auto* tmpl = std::get_if<Duffing>(&search.device.model);
        const auto g_fixed =
            base.coupling_strength(cavity_label, base.devices.front().label);
        if (fixed && tmpl && g_fixed &&
            tmpl->anharmonicity == -fixed->anharmonicity &&
            search.coupling == *g_fixed) {
            const double delta_fixed = w_c - fixed->frequency;
            const double mirror = w_c + delta_fixed;
            if (mirror >= search.min_frequency && mirror <= search.max_frequency) {
                Circuit c = assemble(mirror);
                require_dispersive(c, "solve_self_kerr_cancellation");
                return c;
            }
        }
    }

    auto total_s = [&](double freq) {
        return s_base +
               device_self_kerr(search.device, search.coupling, w_c - freq);
    };
    if (std::abs(s_base) < 1e-9) {
        // Already cancelled; a decoupled second device is admissible.
        Circuit c = base;
        return c;
    }
    const double root = bisect_root(total_s, search.min_frequency,
                                    search.max_frequency, 1e-9);
    Circuit c = assemble(root);
    require_dispersive(c, "solve_self_kerr_cancellation");
    return c;
}

Circuit solve_cross_kerr_off(const Circuit& circuit,
                             const std::string& tunable_label,
                             double min_frequency, double max_frequency) {
    if (circuit.cavities.size() != 2) {
        throw std::invalid_argument(
            "solve_cross_kerr_off: exactly two cavities required");
    }
    const std::string& ca = circuit.cavities[0].label;
    const std::string& cb = circuit.cavities[1].label;

    auto retuned = [&](double freq) {
        Circuit c = circuit;
        c.device(tunable_label) = with_frequency(c.device(tunable_label), freq);
        return c;
    };
    auto x_of = [&](double freq) {
        return kerr_closed_form(retuned(freq)).cross(ca, cb);
    };

    // Mirror-symmetric analytic zero: two Duffing devices with opposite
    // anharmonicities and crossed-equal couplings.
    if (circuit.devices.size() == 2) {
        const DeviceSpec* fixed = nullptr;
        for (const auto& d : circuit.devices)
            if (d.label != tunable_label) fixed = &d;
        const auto* fd = fixed ? std::get_if<Duffing>(&fixed->model) : nullptr;
        const auto* td =
            std::get_if<Duffing>(&circuit.device(tunable_label).model);
        if (fd && td && td->anharmonicity == -fd->anharmonicity) {
            const auto gaf = circuit.coupling_strength(ca, fixed->label);
            const auto gbf = circuit.coupling_strength(cb, fixed->label);
            const auto gat = circuit.coupling_strength(ca, tunable_label);
            const auto gbt = circuit.coupling_strength(cb, tunable_label);
            if (gaf && gbf && gat && gbt && *gat == *gbf && *gbt == *gaf) {
                const double mirror = circuit.cavities[0].frequency +
                                      circuit.cavities[1].frequency -
                                      fd->frequency;
                if (mirror >= min_frequency && mirror <= max_frequency &&
                    std::abs(x_of(mirror)) < 1e-9) {
                    return retuned(mirror);
                }
            }
        }
    }

    const double root = bisect_root(x_of, min_frequency, max_frequency, 1e-9);
    return retuned(root);
}

GateSchedule plan_cphase_gate(const Circuit& circuit_off,
                              const std::string& tunable_label,
                              double detune_shift) {
    if (circuit_off.cavities.size() != 2) {
        throw std::invalid_argument("plan_cphase_gate: exactly two cavities required");
    }
    const std::string& ca = circuit_off.cavities[0].label;
    const std::string& cb = circuit_off.cavities[1].label;

    GateSchedule gs;
    gs.off_configuration = circuit_off;
    gs.tunable_label = tunable_label;
    Circuit on = circuit_off;
    on.device(tunable_label) = with_frequency(
        on.device(tunable_label),
        device_frequency(on.device(tunable_label)) + detune_shift);
    gs.on_configuration = on;

    gs.x_on = kerr_closed_form(on).cross(ca, cb);
    if (std::abs(gs.x_on) < 1e-7) {
        throw InfeasibleTarget(
            "plan_cphase_gate: |X_on| < 1e-7 GHz, gate slower than 5 ms");
    }
    gs.gate_time_us = 1.0 / (2.0 * std::abs(gs.x_on)) / 1000.0;

    gs.x_off_numeric = kerr_numeric(circuit_off).cross(ca, cb);
    gs.on_off_ratio = std::abs(gs.x_on) /
                      std::max(std::abs(gs.x_off_numeric), 1e-300);

    // Comparison against a single fixed device switched by the same shift:
    // without the canceling partner, "off" just means further detuned. The
    // two-level closed form gives the scale of that ratio.
    for (const auto& d : circuit_off.devices) {
        if (d.label == tunable_label) continue;
        const auto g1 = circuit_off.coupling_strength(ca, d.label);
        const auto g2 = circuit_off.coupling_strength(cb, d.label);
        if (!g1 || !g2) continue;
        const double d1 = detuning(circuit_off, ca, d.label);
        const double d2 = detuning(circuit_off, cb, d.label);
        const double s = std::abs(detune_shift);
        const double x_near = cross_kerr_two_level(*g1, *g2, d1, d2);
        const double x_far =
            cross_kerr_two_level(*g1, *g2, d1 + s, d2 + s);
        gs.single_device_ratio = std::abs(x_near / x_far);
        break;
    }
    return gs;
}

ArrayDesignResult design_array(const ArrayDesignSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("design_array: n < 2");
    if (static_cast<int>(spec.target_self_kerr.size()) != spec.n ||
        static_cast<int>(spec.target_cross_kerr.size()) != spec.n - 1) {
        throw std::invalid_argument("design_array: target list sizes mismatch n");
    }

    Circuit chain;
    for (int i = 0; i < spec.n; ++i) {
        chain.cavities.push_back(
            {"c" + std::to_string(i + 1),
             spec.cavity_base_frequency + i * spec.cavity_spacing,
             spec.fock_dim});
    }

    // Stage 1: intermediary qubits hit the cross-Kerr targets.
    for (int i = 0; i < spec.n - 1; ++i) {
        const double target = spec.target_cross_kerr[i];
        if (target == 0.0) continue;
        const double chi =
            std::copysign(spec.intermediary_chi_magnitude, target);
        const double g = spec.intermediary_coupling;
        const double wa = chain.cavities[i].frequency;
        const double wb = chain.cavities[i + 1].frequency;
        auto x_of = [&](double freq) {
            return cross_kerr_duffing(g, g, wa - freq, wb - freq, chi) - target;
        };
        const double lo = wa - spec.intermediary_detuning_max;
        const double hi = wa - spec.intermediary_detuning_min;
        double freq;
        try {
            freq = bisect_root(x_of, lo, hi, 1e-10);
        } catch (const NoRootInBounds&) {
            throw InfeasibleTarget(
                "design_array: cross-Kerr target " + std::to_string(target) +
                " GHz unreachable on link " + std::to_string(i + 1));
        }
        const std::string label = "b" + std::to_string(i + 1);
        chain.devices.push_back({label, Duffing{freq, chi, 4}});
        chain.couplings.push_back({chain.cavities[i].label, label, g});
        chain.couplings.push_back({chain.cavities[i + 1].label, label, g});
    }

    // Stage 2: on-site couplings bring each total self-Kerr to target.
    Circuit stage1 = chain;
    const KerrReport partial = kerr_closed_form(stage1);
    for (int i = 0; i < spec.n; ++i) {
        const double needed =
            spec.target_self_kerr[i] - partial.self_kerr(i);
        if (std::abs(needed) < 1e-15) continue;
        const double eta = std::copysign(spec.onsite_chi_magnitude, needed);
        const double delta = -spec.onsite_detuning;  // qubit above the cavity
        auto s_of = [&](double f) {
            return self_kerr_duffing(f, delta, eta) - needed;
        };
        double f;
        try {
            f = bisect_root(s_of, 0.0, spec.onsite_coupling_max, 1e-12);
        } catch (const NoRootInBounds&) {
            throw InfeasibleTarget(
                "design_array: self-Kerr target " +
                std::to_string(spec.target_self_kerr[i]) +
                " GHz unreachable on site " + std::to_string(i + 1));
        }
        const std::string label = "q" + std::to_string(i + 1);
        chain.devices.push_back(
            {label, Duffing{chain.cavities[i].frequency - delta, eta, 4}});
        chain.couplings.push_back({chain.cavities[i].label, label, f});
    }

    // Frequency collision check, 10 MHz clearance.
    {
        std::vector<std::pair<std::string, double>> freqs;
        for (const auto& c : chain.cavities) freqs.push_back({c.label, c.frequency});
        for (const auto& d : chain.devices)
            freqs.push_back({d.label, device_frequency(d)});
        for (std::size_t a = 0; a < freqs.size(); ++a) {
            for (std::size_t b = a + 1; b < freqs.size(); ++b) {
                if (std::abs(freqs[a].second - freqs[b].second) < 0.010) {
                    throw FrequencyCollision(
                        "design_array: " + freqs[a].first + " and " +
                        freqs[b].first + " are within 10 MHz");
                }
            }
        }
    }

    const KerrReport achieved = kerr_from_paths(chain);
    ArrayDesignResult out;
    out.circuit = chain;
    for (int i = 0; i < spec.n; ++i) {
        out.effective.frequencies.push_back(chain.cavities[i].frequency +
                                            achieved.linear_shift(i));
        out.effective.self_kerr.push_back(achieved.self_kerr(i));
        out.residual_self.push_back(achieved.self_kerr(i) -
                                    spec.target_self_kerr[i]);
    }
    for (int i = 0; i < spec.n - 1; ++i) {
        out.effective.cross_kerr.push_back(achieved.cross_kerr(i, i + 1));
        out.residual_cross.push_back(achieved.cross_kerr(i, i + 1) -
                                     spec.target_cross_kerr[i]);
    }
    for (double r : out.residual_self) {
        if (std::abs(r) > 1e-8)
            throw InfeasibleTarget("design_array: self-Kerr residual " +
                                   std::to_string(r) + " GHz above 1e-8");
    }
    for (double r : out.residual_cross) {
        if (std::abs(r) > 1e-8)
            throw InfeasibleTarget("design_array: cross-Kerr residual " +
                                   std::to_string(r) + " GHz above 1e-8");
    }
    return out;
}

}  // namespace kerrforge

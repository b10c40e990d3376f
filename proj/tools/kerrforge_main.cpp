#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kerrforge/designer.hpp"
#include "kerrforge/dynamics.hpp"
#include "kerrforge/extraction.hpp"
#include "kerrforge/perturbation.hpp"

using json = nlohmann::ordered_json;
using namespace kerrforge;

namespace {

std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

// Round through a 12-significant-digit decimal so JSON output is stable
// across platforms.
double round12(double x) { return std::stod(fmt12(x)); }

json report_json(const KerrReport& rep) {
    json j;
    j["method"] = rep.method;
    j["cavities"] = rep.cavity_labels;
    json self = json::array(), lin = json::array(), cross = json::array();
    for (Eigen::Index i = 0; i < rep.self_kerr.size(); ++i) {
        self.push_back(round12(rep.self_kerr(i)));
        lin.push_back(round12(rep.linear_shift(i)));
    }
    for (Eigen::Index i = 0; i < rep.cross_kerr.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < rep.cross_kerr.cols(); ++k) {
            row.push_back(round12(rep.cross_kerr(i, k)));
        }
        cross.push_back(row);
    }
    j["self_kerr_ghz"] = self;
    j["linear_shift_ghz"] = lin;
    j["cross_kerr_ghz"] = cross;
    return j;
}

void print_report_table(const KerrReport& rep, std::ostream& os) {
    os << "method: " << rep.method << "\n";
    os << "cavity        S (GHz)            linear shift (GHz)\n";
    for (std::size_t i = 0; i < rep.cavity_labels.size(); ++i) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-12s %-18s %-18s\n",
                      rep.cavity_labels[i].c_str(),
                      fmt12(rep.self_kerr(i)).c_str(),
                      fmt12(rep.linear_shift(i)).c_str());
        os << line;
    }
    for (std::size_t i = 0; i < rep.cavity_labels.size(); ++i) {
        for (std::size_t k = i + 1; k < rep.cavity_labels.size(); ++k) {
            os << "X(" << rep.cavity_labels[i] << "," << rep.cavity_labels[k]
               << ") = " << fmt12(rep.cross_kerr(i, k)) << " GHz\n";
        }
    }
}

void write_csv(const std::string& path, const TimeTrace& trace) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    // t_us first, observables alphabetical after.
    std::vector<std::pair<std::string, const std::vector<double>*>> cols;
    for (const auto& [name, v] : trace.series) cols.push_back({name, &v});
    std::sort(cols.begin(), cols.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    os << "t_us";
    for (const auto& [name, v] : cols) os << "," << name;
    os << "\n";
    for (std::size_t i = 0; i < trace.times_us.size(); ++i) {
        os << fmt12(trace.times_us[i]);
        for (const auto& [name, v] : cols) os << "," << fmt12((*v)[i]);
        os << "\n";
    }
}

void write_wigner_csv(const std::string& path, const WignerGrid& grid) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "re,im,W\n";
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        os << fmt12(grid.points[i].real()) << "," << fmt12(grid.points[i].imag())
           << "," << fmt12(grid.values[i]) << "\n";
    }
}

ReferenceFamily parse_state_spec(const std::string& spec, Complex* alpha_out) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument(
            "state spec must be coherent:<alpha> or cat:<alpha>");
    }
    const std::string kind = spec.substr(0, colon);
    const double alpha = std::stod(spec.substr(colon + 1));
    *alpha_out = Complex(alpha, 0.0);
    if (kind == "coherent") return ReferenceFamily::coherent(alpha);
    if (kind == "cat") {
        return ReferenceFamily::cat({Complex(alpha, 0), Complex(-alpha, 0)},
                                    {Complex(1, 0), Complex(1, 0)});
    }
    throw std::invalid_argument("unknown state kind " + kind);
}

StateVector initial_state(const HilbertSpace& space, const std::string& cavity,
                          const ReferenceFamily& family) {
    if (family.components.size() == 1) {
        return coherent_state(space, cavity, family.components[0]);
    }
    return cat_state(space, cavity, family.components, family.weights);
}

int classify_error(const std::exception& e) {
    if (dynamic_cast<const InfeasibleTarget*>(&e) ||
        dynamic_cast<const NoRootInBounds*>(&e) ||
        dynamic_cast<const FrequencyCollision*>(&e) ||
        dynamic_cast<const DispersiveViolation*>(&e)) {
        return 3;
    }
    if (dynamic_cast<const DegenerateIntermediate*>(&e) ||
        dynamic_cast<const TruncationClipped*>(&e) ||
        dynamic_cast<const PoleProximity*>(&e) ||
        dynamic_cast<const WeakOverlap*>(&e) ||
        dynamic_cast<const AmbiguousLabeling*>(&e) ||
        dynamic_cast<const TruncationError*>(&e)) {
        return 2;
    }
    return 1;  // configuration / usage error
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kerrforge: Kerr engineering for cavity-qubit networks"};
    app.require_subcommand(1);

    bool json_errors = false;
    int threads = 0;
    app.add_flag("--json-errors", json_errors,
                 "emit errors as JSON on stderr");
    app.add_option("--threads", threads,
                   "worker thread cap (default: KERRFORGE_THREADS or OpenMP)");

    // kerr-report
    std::string kr_config;
    bool kr_json = false;
    bool kr_skip_numeric = false;
    auto* kr = app.add_subcommand(
        "kerr-report", "closed-form, path-enumeration and numeric Kerr report");
    kr->add_option("config", kr_config, "circuit config JSON")->required();
    kr->add_flag("--json", kr_json, "JSON output instead of the table");
    kr->add_flag("--skip-numeric", kr_skip_numeric,
                 "omit the exact-diagonalization report");

    // cancel-self
    std::string cs_config, cs_tunable, cs_cavity;
    double cs_min = 0.0, cs_max = 0.0;
    auto* cs = app.add_subcommand(
        "cancel-self", "retune a device to cancel a cavity's self-Kerr");
    cs->add_option("config", cs_config)->required();
    cs->add_option("--tunable", cs_tunable, "device to retune")->required();
    cs->add_option("--cavity", cs_cavity,
                   "cavity whose self-Kerr is cancelled (default: first)");
    cs->add_option("--min-freq", cs_min, "search bound (GHz)");
    cs->add_option("--max-freq", cs_max, "search bound (GHz)");

    // store-state
    std::string ss_config, ss_state = "coherent:2", ss_cavity;
    std::string ss_trace_csv, ss_wigner_csv;
    double ss_tmax = 100.0, ss_wigner_time = -1.0, ss_wigner_extent = 3.0;
    int ss_points = 2000, ss_wigner_side = 41;
    auto* ss = app.add_subcommand(
        "store-state", "evolve a stored cavity state; amplitude and fidelity");
    ss->add_option("config", ss_config)->required();
    ss->add_option("--state", ss_state, "coherent:<alpha> or cat:<alpha>");
    ss->add_option("--t-max", ss_tmax, "window (us)");
    ss->add_option("--points", ss_points, "time grid points");
    ss->add_option("--cavity", ss_cavity, "cavity label (default: first)");
    ss->add_option("--trace-csv", ss_trace_csv, "write t_us/abs_a/fidelity CSV");
    ss->add_option("--wigner-csv", ss_wigner_csv, "write Wigner snapshot CSV");
    ss->add_option("--wigner-time", ss_wigner_time,
                   "snapshot time (us, default t-max)");
    ss->add_option("--wigner-extent", ss_wigner_extent, "half side of the grid");
    ss->add_option("--wigner-side", ss_wigner_side, "grid points per side");

    // gate
    std::string g_config, g_tunable, g_purity_csv;
    double g_shift = 1.0, g_tmax = 60.0;
    int g_points = 600;
    auto* gt = app.add_subcommand("gate",
                                  "CPHASE gate schedule from an off-configuration");
    gt->add_option("config", g_config)->required();
    gt->add_option("--tunable", g_tunable)->required();
    gt->add_option("--shift", g_shift, "detuning shift (GHz)");
    gt->add_option("--purity-csv", g_purity_csv,
                   "write on/off single-cavity purity trace CSV");
    gt->add_option("--t-max", g_tmax, "purity trace window (us)");
    gt->add_option("--points", g_points, "purity trace points");

    // array-design
    std::string ad_spec;
    auto* ad = app.add_subcommand("array-design",
                                  "design a cavity chain for target Kerr profile");
    ad->add_option("spec", ad_spec, "design spec JSON")->required();

    // validate
    std::string v_config;
    auto* vd = app.add_subcommand("validate", "structural and dispersive checks");
    vd->add_option("config", v_config)->required();

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads <= 0) {
        if (const char* env = std::getenv("KERRFORGE_THREADS")) {
            threads = std::atoi(env);
        }
    }
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (kr->parsed()) {
            const Circuit circuit = load_circuit_file(kr_config);
            // Multilevel devices have no closed form; the path and
            // numeric reports still apply.
            bool have_closed = true;
            KerrReport closed;
            std::string closed_note;
            try {
                closed = kerr_closed_form(circuit);
            } catch (const std::invalid_argument& e) {
                have_closed = false;
                closed_note = e.what();
            }
            const KerrReport paths = kerr_from_paths(circuit);
            if (kr_json) {
                json j;
                if (have_closed) {
                    j["closed_form"] = report_json(closed);
                } else {
                    j["closed_form"] = {{"unavailable", closed_note}};
                }
                j["path_enumeration"] = report_json(paths);
                if (!kr_skip_numeric) j["numeric"] = report_json(kerr_numeric(circuit));
                std::cout << j.dump(2) << "\n";
            } else {
                if (have_closed) {
                    print_report_table(closed, std::cout);
                } else {
                    std::cout << "closed-form: unavailable (" << closed_note
                              << ")\n";
                }
                std::cout << "\n";
                print_report_table(paths, std::cout);
                if (!kr_skip_numeric) {
                    std::cout << "\n";
                    print_report_table(kerr_numeric(circuit), std::cout);
                }
            }
        } else if (cs->parsed()) {
            Circuit circuit = load_circuit_file(cs_config);
            if (cs_cavity.empty()) cs_cavity = circuit.cavities.at(0).label;
            const double w_c = circuit.cavity(cs_cavity).frequency;
            if (cs_min == 0.0 && cs_max == 0.0) {
                cs_min = w_c - 3.0;
                cs_max = w_c + 3.0;
            }
            const bool exists =
                std::any_of(circuit.devices.begin(), circuit.devices.end(),
                            [&](const DeviceSpec& d) {
                                return d.label == cs_tunable;
                            });
            if (exists) {
                // Retune the named device until the cavity's total
                // self-Kerr vanishes.
                auto total_s = [&](double freq) {
                    Circuit c = circuit;
                    auto& dev = c.device(cs_tunable);
                    if (auto* du = std::get_if<Duffing>(&dev.model)) {
                        du->frequency = freq;
                    } else if (auto* tl = std::get_if<TwoLevel>(&dev.model)) {
                        tl->frequency = freq;
                    } else {
                        throw std::invalid_argument(
                            "cancel-self: device " + cs_tunable +
                            " is not tunable");
                    }
                    return kerr_closed_form(c).self(cs_cavity);
                };
                const double root = bisect_root(total_s, cs_min, cs_max, 1e-9);
                auto& dev = circuit.device(cs_tunable);
                if (auto* du = std::get_if<Duffing>(&dev.model))
                    du->frequency = root;
                if (auto* tl = std::get_if<TwoLevel>(&dev.model))
                    tl->frequency = root;
            } else {
                // Add a canceling partner: mirror template of the fixed
                // device coupled to the same cavity.
                const DeviceSpec* fixed = nullptr;
                std::optional<double> g_fixed;
                for (const auto& d : circuit.devices) {
                    if (auto g = circuit.coupling_strength(cs_cavity, d.label)) {
                        fixed = &d;
                        g_fixed = g;
                        break;
                    }
                }
                if (!fixed) {
                    throw std::invalid_argument(
                        "cancel-self: no device coupled to " + cs_cavity);
                }
                const auto* fd = std::get_if<Duffing>(&fixed->model);
                if (!fd) {
                    throw std::invalid_argument(
                        "cancel-self: fixed device must be a Duffing "
                        "oscillator to build a mirror template");
                }
                DeviceSearchSpace space;
                space.device =
                    DeviceSpec{cs_tunable,
                               Duffing{0.0, -fd->anharmonicity, fd->levels}};
                space.coupling = *g_fixed;
                space.min_frequency = cs_min;
                space.max_frequency = cs_max;
                circuit = solve_self_kerr_cancellation(circuit, cs_cavity, space);
            }
            json j;
            j["circuit"] = json::parse(serialize_circuit(circuit));
            j["tunable"] = cs_tunable;
            j["frequency_ghz"] =
                round12(circuit.device(cs_tunable).transition_frequency());
            j["self_kerr_closed_form_ghz"] =
                round12(kerr_closed_form(circuit).self(cs_cavity));
            j["self_kerr_numeric_ghz"] =
                round12(kerr_numeric(circuit).self(cs_cavity));
            std::cout << j.dump(2) << "\n";
        } else if (ss->parsed()) {
            const Circuit circuit = load_circuit_file(ss_config);
            if (ss_cavity.empty()) ss_cavity = circuit.cavities.at(0).label;
            Complex alpha;
            const ReferenceFamily family = parse_state_spec(ss_state, &alpha);
            const HamiltonianBundle bundle = build_hamiltonian(circuit);
            const StateVector psi0 =
                initial_state(bundle.space, ss_cavity, family);
            const Propagator prop(bundle);
            const auto times = time_grid(ss_tmax, ss_points);
            const auto states = prop.evolve(psi0, times);
            TimeTrace trace = amplitude_trace(states, times, ss_cavity);
            std::vector<double> fid(states.size());
            for (std::size_t i = 0; i < states.size(); ++i) {
                fid[i] = fidelity_min_rotation(states[i], ss_cavity, family);
            }
            trace.series.push_back({"fidelity", std::move(fid)});
            if (!ss_trace_csv.empty()) write_csv(ss_trace_csv, trace);
            if (!ss_wigner_csv.empty()) {
                const double t_snap =
                    ss_wigner_time < 0.0 ? ss_tmax : ss_wigner_time;
                const StateVector snap = prop.apply(psi0, t_snap);
                const auto rho = partial_trace(snap, {ss_cavity});
                write_wigner_csv(
                    ss_wigner_csv,
                    wigner(rho, square_grid(ss_wigner_extent, ss_wigner_side)));
            }
            json j;
            j["cavity"] = ss_cavity;
            j["state"] = ss_state;
            j["t_max_us"] = round12(ss_tmax);
            j["final_abs_a"] = round12(trace.column("abs_a").back());
            j["final_fidelity"] = round12(trace.column("fidelity").back());
            j["min_fidelity"] = round12(*std::min_element(
                trace.column("fidelity").begin(), trace.column("fidelity").end()));
            std::cout << j.dump(2) << "\n";
        } else if (gt->parsed()) {
            const Circuit circuit = load_circuit_file(g_config);
            const GateSchedule gs =
                plan_cphase_gate(circuit, g_tunable, g_shift);
            if (!g_purity_csv.empty()) {
                const auto& ca = circuit.cavities.at(0).label;
                auto purity_trace = [&](const Circuit& c,
                                        const std::vector<double>& times) {
                    const HamiltonianBundle bundle = build_hamiltonian(c);
                    // Photonic qubits: (|0>+|1>)(|0>+|1>)/2 across the two
                    // cavities.
                    VectorXc amp =
                        VectorXc::Zero(bundle.space.total_dim());
                    const auto& cb = c.cavities.at(1).label;
                    for (int na = 0; na < 2; ++na) {
                        for (int nb = 0; nb < 2; ++nb) {
                            std::vector<int> occ(bundle.space.num_subsystems(), 0);
                            occ[bundle.space.index_of(ca)] = na;
                            occ[bundle.space.index_of(cb)] = nb;
                            amp(bundle.space.flat_index(occ)) = 0.5;
                        }
                    }
                    const Propagator prop(bundle);
                    const auto states =
                        prop.evolve(StateVector{bundle.space, amp}, times);
                    std::vector<double> p(states.size());
                    for (std::size_t i = 0; i < states.size(); ++i) {
                        p[i] = purity(partial_trace(states[i], {ca}));
                    }
                    return p;
                };
                const auto times = time_grid(g_tmax, g_points);
                TimeTrace trace;
                trace.times_us = times;
                trace.series.push_back(
                    {"purity_off", purity_trace(gs.off_configuration, times)});
                trace.series.push_back(
                    {"purity_on", purity_trace(gs.on_configuration, times)});
                write_csv(g_purity_csv, trace);
            }
            json j;
            j["tunable"] = gs.tunable_label;
            j["shift_ghz"] = round12(g_shift);
            j["x_on_ghz"] = round12(gs.x_on);
            j["x_off_numeric_ghz"] = round12(gs.x_off_numeric);
            j["gate_time_us"] = round12(gs.gate_time_us);
            j["on_off_ratio"] = round12(gs.on_off_ratio);
            j["single_device_ratio"] = round12(gs.single_device_ratio);
            j["on_configuration"] =
                json::parse(serialize_circuit(gs.on_configuration));
            std::cout << j.dump(2) << "\n";
        } else if (ad->parsed()) {
            std::ifstream is(ad_spec);
            if (!is) throw std::invalid_argument("cannot read " + ad_spec);
            json sj = json::parse(is);
            ArrayDesignSpec spec;
            spec.n = sj.at("n").get<int>();
            spec.target_self_kerr =
                sj.at("target_self_kerr").get<std::vector<double>>();
            spec.target_cross_kerr =
                sj.at("target_cross_kerr").get<std::vector<double>>();
            if (sj.contains("cavity_base_frequency"))
                spec.cavity_base_frequency = sj["cavity_base_frequency"];
            if (sj.contains("cavity_spacing"))
                spec.cavity_spacing = sj["cavity_spacing"];
            if (sj.contains("fock_dim")) spec.fock_dim = sj["fock_dim"];
            const ArrayDesignResult res = design_array(spec);
            json j;
            j["circuit"] = json::parse(serialize_circuit(res.circuit));
            json rep;
            rep["target_self_kerr_ghz"] = spec.target_self_kerr;
            rep["target_cross_kerr_ghz"] = spec.target_cross_kerr;
            json eff;
            for (double w : res.effective.frequencies)
                eff["frequencies_ghz"].push_back(round12(w));
            for (double s : res.effective.self_kerr)
                eff["self_kerr_ghz"].push_back(round12(s));
            for (double x : res.effective.cross_kerr)
                eff["cross_kerr_ghz"].push_back(round12(x));
            rep["effective_hamiltonian"] = eff;
            for (double r : res.residual_self)
                rep["residual_self_ghz"].push_back(round12(r));
            for (double r : res.residual_cross)
                rep["residual_cross_ghz"].push_back(round12(r));
            j["design_report"] = rep;
            std::cout << j.dump(2) << "\n";
        } else if (vd->parsed()) {
            const Circuit circuit = load_circuit_file(v_config);
            validate_structure(circuit);
            json diags = json::array();
            for (const auto& d : validate_dispersive(circuit)) {
                json e;
                e["cavity"] = d.cavity_label;
                e["device"] = d.device_label;
                e["g_over_delta"] = round12(d.ratio);
                e["class"] = d.cls == DispersiveClass::Dispersive ? "dispersive"
                             : d.cls == DispersiveClass::Marginal
                                 ? "marginal"
                                 : "non-dispersive";
                e["rwa_strained"] = d.rwa_strained;
                e["degenerate"] = d.degenerate;
                e["pt_pole"] = d.pt_pole;
                if (!d.note.empty()) e["note"] = d.note;
                diags.push_back(e);
            }
            json j;
            j["diagnostics"] = diags;
            std::cout << j.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        const int code = classify_error(e);
        if (json_errors) {
            json j;
            j["error"]["message"] = e.what();
            j["error"]["exit_code"] = code;
            std::cerr << j.dump(2) << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return code;
    }
    return 0;
}

#include "kerrforge/circuit.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace kerrforge {

using nlohmann::json;

int DeviceSpec::levels() const {
    if (std::holds_alternative<TwoLevel>(model)) return 2;
    if (const auto* d = std::get_if<Duffing>(&model)) return d->levels;
    return static_cast<int>(std::get<Multilevel>(model).level_energies.size());
}

double DeviceSpec::level_energy(int m) const {
    if (m < 0 || m >= levels()) {
        throw std::out_of_range("level_energy: level " + std::to_string(m) +
                                " outside device " + label);
    }
    if (const auto* t = std::get_if<TwoLevel>(&model)) {
        return m == 0 ? 0.0 : t->frequency;
    }
    if (const auto* d = std::get_if<Duffing>(&model)) {
        return m * d->frequency + d->anharmonicity * m * (m - 1);
    }
    return std::get<Multilevel>(model).level_energies[m];
}

double DeviceSpec::transition_weight(int j, int k) const {
    if (j >= k) throw std::invalid_argument("transition_weight: need j < k");
    if (k >= levels()) return 0.0;
    if (const auto* m = std::get_if<Multilevel>(&model)) {
        if (m->coupling_weights.size() > 0) {
            return m->coupling_weights(j, k);
        }
        // Default: harmonic-ladder nearest-neighbor weights.
        return (k == j + 1) ? std::sqrt(static_cast<double>(j + 1)) : 0.0;
    }
    // Ladder devices couple adjacent levels only.
    return (k == j + 1) ? std::sqrt(static_cast<double>(j + 1)) : 0.0;
}

namespace {

template <typename T>
const T* find_by_label(const std::vector<T>& items, const std::string& label) {
    for (const auto& it : items) {
        if (it.label == label) return &it;
    }
    return nullptr;
}

}  // namespace

const CavitySpec& Circuit::cavity(const std::string& label) const {
    if (const auto* c = find_by_label(cavities, label)) return *c;
    throw std::out_of_range("unknown cavity " + label);
}

const DeviceSpec& Circuit::device(const std::string& label) const {
    if (const auto* d = find_by_label(devices, label)) return *d;
    throw std::out_of_range("unknown device " + label);
}

CavitySpec& Circuit::cavity(const std::string& label) {
    return const_cast<CavitySpec&>(static_cast<const Circuit*>(this)->cavity(label));
}

DeviceSpec& Circuit::device(const std::string& label) {
    return const_cast<DeviceSpec&>(static_cast<const Circuit*>(this)->device(label));
}

bool Circuit::has_cavity(const std::string& label) const {
    return find_by_label(cavities, label) != nullptr;
}

bool Circuit::has_device(const std::string& label) const {
    return find_by_label(devices, label) != nullptr;
}

std::optional<double> Circuit::coupling_strength(const std::string& cavity_label,
                                                 const std::string& device_label) const {
    for (const auto& c : couplings) {
        if (c.cavity_label == cavity_label && c.device_label == device_label) {
            return c.strength;
        }
    }
    return std::nullopt;
}

void validate_structure(const Circuit& circuit) {
    std::set<std::string> labels;
    for (const auto& c : circuit.cavities) {
        if (!labels.insert(c.label).second) {
            throw ValidationError("duplicate label " + c.label);
        }
        if (c.frequency <= 0.0) {
            throw ValidationError("cavity " + c.label + ": frequency must be > 0");
        }
        if (c.fock_dim < 2) {
            throw ValidationError("cavity " + c.label + ": fock_dim must be >= 2");
        }
    }
    for (const auto& d : circuit.devices) {
        if (!labels.insert(d.label).second) {
            throw ValidationError("duplicate label " + d.label);
        }
        if (const auto* t = std::get_if<TwoLevel>(&d.model)) {
            if (t->frequency <= 0.0) {
                throw ValidationError("device " + d.label + ": frequency must be > 0");
            }
        } else if (const auto* duf = std::get_if<Duffing>(&d.model)) {
            if (duf->levels < 3) {
                throw ValidationError("device " + d.label + ": Duffing levels must be >= 3");
            }
            if (duf->frequency <= 0.0) {
                throw ValidationError("device " + d.label + ": frequency must be > 0");
            }
        } else {
            const auto& m = std::get<Multilevel>(d.model);
            if (m.level_energies.size() < 2 || m.level_energies[0] != 0.0) {
                throw ValidationError("device " + d.label +
                                      ": level_energies must start at 0 with >= 2 levels");
            }
            for (std::size_t k = 1; k < m.level_energies.size(); ++k) {
                if (!(m.level_energies[k] > m.level_energies[k - 1])) {
                    throw ValidationError("device " + d.label +
                                          ": level_energies must be strictly increasing");
                }
            }
            if (m.coupling_weights.size() > 0) {
                const int n = static_cast<int>(m.level_energies.size());
                if (m.coupling_weights.rows() != n || m.coupling_weights.cols() != n) {
                    throw ValidationError("device " + d.label +
                                          ": coupling_weights shape mismatch");
                }
                if (!m.coupling_weights.allFinite()) {
                    throw ValidationError("device " + d.label +
                                          ": coupling_weights must be finite");
                }
            }
        }
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& c : circuit.couplings) {
        if (!circuit.has_cavity(c.cavity_label)) {
            throw ValidationError("coupling references unknown cavity " + c.cavity_label);
        }
        if (!circuit.has_device(c.device_label)) {
            throw ValidationError("coupling references unknown device " + c.device_label);
        }
        if (c.strength < 0.0) {
            throw ValidationError("coupling strength must be >= 0");
        }
        if (!seen.insert({c.cavity_label, c.device_label}).second) {
            throw ValidationError("duplicate coupling " + c.cavity_label + "--" +
                                  c.device_label);
        }
    }
}

double detuning(const Circuit& circuit, const std::string& cavity_label,
                const std::string& device_label) {
    return circuit.cavity(cavity_label).frequency -
           circuit.device(device_label).transition_frequency();
}

std::vector<Diagnostic> validate_dispersive(const Circuit& circuit) {
    validate_structure(circuit);
    std::vector<Diagnostic> out;
    for (const auto& cpl : circuit.couplings) {
        const auto& cav = circuit.cavity(cpl.cavity_label);
        const auto& dev = circuit.device(cpl.device_label);
        const double wq = dev.transition_frequency();
        const double delta = cav.frequency - wq;
        Diagnostic d;
        d.cavity_label = cpl.cavity_label;
        d.device_label = cpl.device_label;
        if (delta == 0.0) {
            d.degenerate = true;
            d.ratio = cpl.strength > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
            d.cls = cpl.strength > 0.0 ? DispersiveClass::NonDispersive
                                       : DispersiveClass::Dispersive;
            d.note = "exact cavity-device degeneracy";
        } else {
            d.ratio = cpl.strength / std::abs(delta);
            if (d.ratio < 0.15) {
                d.cls = DispersiveClass::Dispersive;
            } else if (d.ratio < 0.3) {
                d.cls = DispersiveClass::Marginal;
            } else {
                d.cls = DispersiveClass::NonDispersive;
            }
        }
        if (std::abs(delta) >= 0.2 * (cav.frequency + wq)) {
            d.rwa_strained = true;
        }
        // PT poles visible from the closed forms: 2*Delta + chi = 0 for a
        // Duffing device, and Delta_i + Delta_j + chi = 0 for any pair of
        // cavities sharing it.
        if (const auto* duf = std::get_if<Duffing>(&dev.model)) {
            const double chi2 = 2.0 * duf->anharmonicity;
            if (std::abs(2.0 * delta - chi2) < 1e-9) d.pt_pole = true;
            for (const auto& other : circuit.couplings) {
                if (other.device_label != cpl.device_label ||
                    other.cavity_label == cpl.cavity_label) {
                    continue;
                }
                const double delta_j =
                    circuit.cavity(other.cavity_label).frequency - wq;
                if (std::abs(delta + delta_j - chi2) < 1e-9) {
                    d.pt_pole = true;
                }
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

int fock_dim_for_amplitude(double alpha_abs) {
    return static_cast<int>(std::ceil(alpha_abs * alpha_abs + 5.0 * alpha_abs + 10.0));
}

namespace {

json device_to_json(const DeviceSpec& d) {
    json j;
    j["label"] = d.label;
    if (const auto* t = std::get_if<TwoLevel>(&d.model)) {
        j["type"] = "two_level";
        j["frequency"] = t->frequency;
    } else if (const auto* duf = std::get_if<Duffing>(&d.model)) {
        j["type"] = "duffing";
        j["frequency"] = duf->frequency;
        j["anharmonicity"] = duf->anharmonicity;
        j["levels"] = duf->levels;
    } else {
        const auto& m = std::get<Multilevel>(d.model);
        j["type"] = "multilevel";
        j["level_energies"] = m.level_energies;
        if (m.coupling_weights.size() > 0) {
            std::vector<std::vector<double>> rows;
            for (int r = 0; r < m.coupling_weights.rows(); ++r) {
                std::vector<double> row;
                for (int c = 0; c < m.coupling_weights.cols(); ++c) {
                    row.push_back(m.coupling_weights(r, c));
                }
                rows.push_back(std::move(row));
            }
            j["coupling_weights"] = rows;
        }
    }
    return j;
}

DeviceSpec device_from_json(const json& j) {
    DeviceSpec d;
    d.label = j.at("label").get<std::string>();
    const std::string type = j.at("type").get<std::string>();
    if (type == "two_level") {
        d.model = TwoLevel{j.at("frequency").get<double>()};
    } else if (type == "duffing") {
        Duffing duf;
        duf.frequency = j.at("frequency").get<double>();
        duf.anharmonicity = j.at("anharmonicity").get<double>();
        duf.levels = j.value("levels", 3);
        d.model = duf;
    } else if (type == "multilevel") {
        Multilevel m;
        m.level_energies = j.at("level_energies").get<std::vector<double>>();
        if (j.contains("coupling_weights")) {
            const auto rows = j["coupling_weights"].get<std::vector<std::vector<double>>>();
            const int n = static_cast<int>(rows.size());
            m.coupling_weights.resize(n, n);
            for (int r = 0; r < n; ++r) {
                if (static_cast<int>(rows[r].size()) != n) {
                    throw ValidationError("coupling_weights must be square");
                }
                for (int c = 0; c < n; ++c) m.coupling_weights(r, c) = rows[r][c];
            }
            const double asym = (m.coupling_weights - m.coupling_weights.transpose())
                                    .cwiseAbs()
                                    .maxCoeff();
            if (asym > 1e-12) {
                throw ValidationError("coupling_weights must be symmetric");
            }
        }
        d.model = m;
    } else {
        throw ValidationError("unknown device type " + type);
    }
    return d;
}

}  // namespace

Circuit parse_circuit(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    if (j.value("schema_version", 1) != 1) {
        throw ValidationError("unsupported schema_version");
    }
    Circuit circuit;
    for (const auto& c : j.value("cavities", json::array())) {
        CavitySpec spec;
        spec.label = c.at("label").get<std::string>();
        spec.frequency = c.at("frequency").get<double>();
        spec.fock_dim = c.value("fock_dim", 2);
        circuit.cavities.push_back(std::move(spec));
    }
    for (const auto& d : j.value("devices", json::array())) {
        circuit.devices.push_back(device_from_json(d));
    }
    for (const auto& c : j.value("couplings", json::array())) {
        Coupling cpl;
        cpl.cavity_label = c.at("cavity").get<std::string>();
        cpl.device_label = c.at("device").get<std::string>();
        cpl.strength = c.at("g").get<double>();
        circuit.couplings.push_back(std::move(cpl));
    }
    circuit.rwa = j.value("rwa", true);
    validate_structure(circuit);
    return circuit;
}

std::string serialize_circuit(const Circuit& circuit) {
    json j;
    j["schema_version"] = 1;
    j["cavities"] = json::array();
    for (const auto& c : circuit.cavities) {
        j["cavities"].push_back(
            {{"label", c.label}, {"frequency", c.frequency}, {"fock_dim", c.fock_dim}});
    }
    j["devices"] = json::array();
    for (const auto& d : circuit.devices) {
        j["devices"].push_back(device_to_json(d));
    }
    j["couplings"] = json::array();
    for (const auto& c : circuit.couplings) {
        j["couplings"].push_back({{"cavity", c.cavity_label},
                                  {"device", c.device_label},
                                  {"g", c.strength}});
    }
    j["rwa"] = circuit.rwa;
    return j.dump(2);
}

Circuit load_circuit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_circuit(ss.str());
}

}  // namespace kerrforge

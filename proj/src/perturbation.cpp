#include "kerrforge/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace kerrforge {

namespace {

constexpr double kDegenerateTol = 1e-9;
constexpr double kPoleTol = 1e-6;

// Bare product state in fixed subsystem order: cavities first (circuit
// order), then devices.
using Bare = std::vector<int>;

struct Enumerator {
    const Circuit& circuit;
    int num_cavities;
    int num_devices;

    std::map<Bare, std::map<Bare, long double>> neighbor_cache;

    explicit Enumerator(const Circuit& c)
        : circuit(c),
          num_cavities(static_cast<int>(c.cavities.size())),
          num_devices(static_cast<int>(c.devices.size())) {}

    int cavity_index(const std::string& label) const {
        for (int i = 0; i < num_cavities; ++i)
            if (circuit.cavities[i].label == label) return i;
        throw std::invalid_argument("unknown cavity label " + label);
    }

    int device_index(const std::string& label) const {
        for (int i = 0; i < num_devices; ++i)
            if (circuit.devices[i].label == label) return i;
        throw std::invalid_argument("unknown device label " + label);
    }

    // Extended precision: denominators are differences of these sums and
    // feed second-differenced Kerr coefficients, so double rounding here
    // would be amplified by the small-denominator cancellations.
    long double level_energy_l(const DeviceSpec& dev, int m) const {
        if (const auto* d = std::get_if<Duffing>(&dev.model)) {
            return static_cast<long double>(d->frequency) * m +
                   static_cast<long double>(d->anharmonicity) * m * (m - 1);
        }
        return dev.level_energy(m);
    }

    long double bare_energy(const Bare& s) const {
        long double e = 0.0;
        for (int i = 0; i < num_cavities; ++i)
            e += static_cast<long double>(circuit.cavities[i].frequency) *
                 s[i];
        for (int d = 0; d < num_devices; ++d)
            e += level_energy_l(circuit.devices[d], s[num_cavities + d]);
        return e;
    }

    std::string describe(const Bare& s) const {
        std::ostringstream os;
        os << "(";
        bool any = false;
        for (int i = 0; i < num_cavities; ++i) {
            if (s[i] == 0) continue;
            if (any) os << ", ";
            os << circuit.cavities[i].label << ":" << s[i];
            any = true;
        }
        for (int d = 0; d < num_devices; ++d) {
            if (s[num_cavities + d] == 0) continue;
            if (any) os << ", ";
            os << circuit.devices[d].label << ":" << s[num_cavities + d];
            any = true;
        }
        if (!any) os << "vac";
        os << ")";
        return os.str();
    }

    // Ladder weights in extended precision; user-supplied multilevel
    // weights are taken as given.
    long double weight_l(const DeviceSpec& dev, int j, int k) const {
        if (const auto* m = std::get_if<Multilevel>(&dev.model)) {
            if (m->coupling_weights.size() > 0)
                return dev.transition_weight(j, k);
        }
        if (k >= dev.levels()) return 0.0L;
        return (k == j + 1) ? sqrtl(static_cast<long double>(j) + 1.0L) : 0.0L;
    }

    // All states connected to s by one application of the RWA coupling,
    // with real matrix elements. Throws TruncationClipped when the
    // truncated ladder cuts off a matrix element the untruncated model
    // would have. Extended precision: rounding of the square-root factors
    // would survive into the second-differenced Kerr coefficients.
    const std::map<Bare, long double>& neighbors(const Bare& s) {
        auto it = neighbor_cache.find(s);
        if (it != neighbor_cache.end()) return it->second;

        std::map<Bare, long double> out;
        for (const auto& cpl : circuit.couplings) {
            if (cpl.strength == 0.0) continue;
            const int ci = cavity_index(cpl.cavity_label);
            const int di = device_index(cpl.device_label);
            const auto& cav = circuit.cavities[ci];
            const auto& dev = circuit.devices[di];
            const int n = s[ci];
            const int m = s[num_cavities + di];
            const bool duffing = std::holds_alternative<Duffing>(dev.model);

            // Photon into device: a b^dag.
            if (n > 0) {
                if (duffing && m == dev.levels() - 1) {
                    throw TruncationClipped(
                        "pt_energy: path needs level " + std::to_string(m + 1) +
                        " of device " + dev.label + " beyond its truncation");
                }
                for (int k = m + 1; k < dev.levels(); ++k) {
                    const long double w = weight_l(dev, m, k);
                    if (w == 0.0L) continue;
                    Bare t = s;
                    t[ci] = n - 1;
                    t[num_cavities + di] = k;
                    out[t] += cpl.strength *
                              sqrtl(static_cast<long double>(n)) * w;
                }
            }
            // Photon out of device: a^dag b.
            if (m > 0) {
                if (n == cav.fock_dim - 1) {
                    throw TruncationClipped(
                        "pt_energy: path needs photon number " +
                        std::to_string(n + 1) + " of cavity " + cav.label +
                        " beyond its truncation");
                }
                for (int j = 0; j < m; ++j) {
                    const long double w = weight_l(dev, j, m);
                    if (w == 0.0L) continue;
                    Bare t = s;
                    t[ci] = n + 1;
                    t[num_cavities + di] = j;
                    out[t] += cpl.strength *
                              sqrtl(static_cast<long double>(n) + 1.0L) * w;
                }
            }
        }
        return neighbor_cache.emplace(s, std::move(out)).first->second;
    }

    long double coupling_to(const Bare& from, const Bare& to) {
        const auto& nb = neighbors(from);
        auto it = nb.find(to);
        return it == nb.end() ? 0.0L : it->second;
    }
};

Bare to_bare(const Circuit& circuit, const OccupationLabel& label) {
    const int nc = static_cast<int>(circuit.cavities.size());
    const int nd = static_cast<int>(circuit.devices.size());
    Bare s(nc + nd, 0);
    for (const auto& [name, occ] : label.occupations) {
        if (occ < 0) throw std::invalid_argument("negative occupation for " + name);
        bool found = false;
        for (int i = 0; i < nc; ++i) {
            if (circuit.cavities[i].label == name) {
                if (occ >= circuit.cavities[i].fock_dim)
                    throw std::invalid_argument("occupation beyond truncation for " + name);
                s[i] = occ;
                found = true;
            }
        }
        for (int d = 0; d < nd; ++d) {
            if (circuit.devices[d].label == name) {
                if (occ >= circuit.devices[d].levels())
                    throw std::invalid_argument("occupation beyond truncation for " + name);
                s[nc + d] = occ;
                found = true;
            }
        }
        if (!found) throw std::invalid_argument("unknown subsystem label " + name);
    }
    return s;
}

}  // namespace

PTCorrection pt_energy(const Circuit& circuit, const OccupationLabel& label) {
    validate_structure(circuit);
    if (!circuit.rwa) {
        throw std::invalid_argument(
            "pt_energy: path enumeration supports RWA circuits only");
    }
    Enumerator en(circuit);
    const Bare n = to_bare(circuit, label);
    const long double En = en.bare_energy(n);

    const auto& first = en.neighbors(n);
    std::vector<std::pair<Bare, long double>> hops(first.begin(),
                                                   first.end());

    auto denom = [&](const Bare& s) {
        const long double d = En - en.bare_energy(s);
        if (std::abs(d) < kDegenerateTol) {
            throw DegenerateIntermediate(
                "pt_energy: intermediate state " + en.describe(s) +
                " is degenerate with " + en.describe(n));
        }
        return d;
    };

    // Kerr coefficients are second differences of these corrections, so
    // the accumulations run in extended precision to keep the relative
    // error of the differenced result near machine epsilon.
    PTCorrection out;
    long double sum_e2 = 0.0;   // sum |V|^2 / E_ni
    long double sum_e2b = 0.0;  // sum |V|^2 / E_ni^2
    for (const auto& [i, v] : hops) {
        const long double d = denom(i);
        sum_e2 += v * v / d;
        sum_e2b += v * v / (d * d);
    }
    out.order2 = static_cast<double>(sum_e2);

    // Order 3: sum over i, j adjacent to n with a direct j--i element.
    // Structurally zero for one-quantum hopping, kept as an audited
    // accumulator.
    for (const auto& [j, vnj] : hops) {
        for (const auto& [i, vin] : hops) {
            const long double vji = en.coupling_to(j, i);
            if (vji == 0.0L) continue;
            out.order3 += static_cast<double>(vnj * vji * vin /
                                              (denom(j) * denom(i)));
        }
    }

    // Order 4: the triple path sum factorizes over the two-hop state j,
    //   sum_j A_j^2 / E_nj  with  A_j = sum_k V_jk V_kn / E_nk,
    // since all matrix elements are real. A degenerate j with A_j = 0 is a
    // dark state (the two feeding paths interfere away) and is skipped;
    // this happens exactly at the mirrored cancellation configurations.
    long double path_sum = 0.0;
    std::map<Bare, long double> two_hop;  // j -> A_j
    for (const auto& [k, vnk] : hops) {
        const long double dk = denom(k);
        for (const auto& [j, vkj] : en.neighbors(k)) {
            if (j == n) continue;
            two_hop[j] += vkj * vnk / dk;
        }
    }
    for (const auto& [j, a] : two_hop) {
        const double amp = static_cast<double>(a);
        const long double dj = En - en.bare_energy(j);
        if (std::abs(dj) < kDegenerateTol) {
            // Keep the dark direction only when its contribution is
            // negligible; amp and dj vanish together near mirrored
            // configurations, so amp^2/dj stays bounded there.
            if (std::abs(amp) < 1e-15 || amp * amp < std::abs(dj) * 1e-9) {
                continue;
            }
            throw DegenerateIntermediate(
                "pt_energy: intermediate state " + en.describe(j) +
                " is degenerate with " + en.describe(n));
        }
        const long double term = a * a / dj;
        path_sum += term;
        out.path_ledger.push_back(
            {en.describe(n) + " -> ... -> " + en.describe(j) + " -> ... -> " +
                 en.describe(n),
             static_cast<double>(term)});
    }
    const long double renorm = -sum_e2b * sum_e2;
    out.path_ledger.push_back({"wavefunction renormalization: "
                               "-(sum |V|^2/E^2)(sum |V|^2/E)",
                               static_cast<double>(renorm)});
    out.order4_extended = path_sum + renorm;
    out.order4 = static_cast<double>(out.order4_extended);
    return out;
}

double KerrReport::cross(const std::string& a, const std::string& b) const {
    return cross_kerr(index_of(a), index_of(b));
}

double KerrReport::self(const std::string& a) const {
    return self_kerr(index_of(a));
}

int KerrReport::index_of(const std::string& label) const {
    auto it = std::find(cavity_labels.begin(), cavity_labels.end(), label);
    if (it == cavity_labels.end())
        throw std::invalid_argument("KerrReport: unknown cavity " + label);
    return static_cast<int>(it - cavity_labels.begin());
}

KerrReport kerr_from_paths(const Circuit& circuit) {
    const int nc = static_cast<int>(circuit.cavities.size());
    KerrReport rep;
    rep.method = "path-enumeration";
    rep.self_kerr = Eigen::VectorXd::Zero(nc);
    rep.cross_kerr = Eigen::MatrixXd::Zero(nc, nc);
    rep.linear_shift = Eigen::VectorXd::Zero(nc);
    for (const auto& c : circuit.cavities) rep.cavity_labels.push_back(c.label);

    auto correction = [&](std::map<std::string, int> occ) {
        return pt_energy(circuit, OccupationLabel{std::move(occ)});
    };

    // The order-2 correction is exactly linear in the photon numbers
    // (devices stay in the ground state), so the Kerr differences are
    // taken on the order-4 part alone; this avoids amplifying rounding
    // noise from the much larger linear terms.
    const PTCorrection c0 = correction({});
    std::vector<PTCorrection> c1(nc);
    for (int i = 0; i < nc; ++i) {
        const auto& li = rep.cavity_labels[i];
        c1[i] = correction({{li, 1}});
        const PTCorrection c2 = correction({{li, 2}});
        rep.self_kerr(i) =
            static_cast<double>(0.5L * (c2.order4_extended -
                                        2.0L * c1[i].order4_extended +
                                        c0.order4_extended));
        rep.linear_shift(i) = c1[i].total() - c0.total() - rep.self_kerr(i);
    }
    for (int i = 0; i < nc; ++i) {
        for (int j = i + 1; j < nc; ++j) {
            const PTCorrection cij = correction(
                {{rep.cavity_labels[i], 1}, {rep.cavity_labels[j], 1}});
            rep.cross_kerr(i, j) = static_cast<double>(
                cij.order4_extended - c1[i].order4_extended -
                c1[j].order4_extended + c0.order4_extended);
            rep.cross_kerr(j, i) = rep.cross_kerr(i, j);
        }
    }
    return rep;
}

double self_kerr_two_level(double g, double delta) {
    return -std::pow(g, 4) / std::pow(delta, 3);
}

double self_kerr_duffing(double g, double delta, double chi) {
    return chi * std::pow(g, 4) / (std::pow(delta, 3) * (delta - chi));
}

double cross_kerr_two_level(double g1, double g2, double delta1, double delta2) {
    return -2.0 * g1 * g1 * g2 * g2 * (delta1 + delta2) /
           (delta1 * delta1 * delta2 * delta2);
}

double cross_kerr_duffing(double g1, double g2, double delta1, double delta2,
                          double chi) {
    return 4.0 * chi * g1 * g1 * g2 * g2 * (delta1 + delta2) /
           (delta1 * delta1 * delta2 * delta2 * (delta1 + delta2 - 2.0 * chi));
}

namespace {

void check_pole(double denom, const std::string& what) {
    if (std::abs(denom) < kPoleTol) {
        throw PoleProximity("kerr_closed_form: denominator " + what +
                            " within 1e-6 GHz of zero");
    }
}

}  // namespace

KerrReport kerr_closed_form(const Circuit& circuit) {
    validate_structure(circuit);
    if (!circuit.rwa) {
        throw std::invalid_argument(
            "kerr_closed_form: catalogue covers RWA circuits only");
    }
    const int nc = static_cast<int>(circuit.cavities.size());
    const int nd = static_cast<int>(circuit.devices.size());
    KerrReport rep;
    rep.method = "closed-form";
    rep.self_kerr = Eigen::VectorXd::Zero(nc);
    rep.cross_kerr = Eigen::MatrixXd::Zero(nc, nc);
    rep.linear_shift = Eigen::VectorXd::Zero(nc);
    for (const auto& c : circuit.cavities) rep.cavity_labels.push_back(c.label);

    // Every fourth-order process visits at most two cavities and two
    // devices (each visited subsystem costs two of the four hops), so the
    // energy assembles exactly from per-cavity, per-pair, and per-device
    // structures below — for any coupling topology, loops included.
    for (const auto& dev : circuit.devices) {
        if (std::holds_alternative<Multilevel>(dev.model)) {
            throw std::invalid_argument(
                "kerr_closed_form: no closed form for multilevel device " +
                dev.label);
        }
    }

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nc, nd);
    // Delta_{id} in extended precision: these denominators feed small
    // cancelling residues below.
    std::vector<long double> dlv(nc * nd, 0.0L);
    auto dl = [&](int i, int d) -> long double& { return dlv[i * nd + d]; };
    std::vector<double> chi(nd, 0.0);
    std::vector<bool> anharmonic(nd, false);
    for (int d = 0; d < nd; ++d) {
        const auto& dev = circuit.devices[d];
        anharmonic[d] = std::holds_alternative<Duffing>(dev.model);
        if (anharmonic[d]) chi[d] = std::get<Duffing>(dev.model).anharmonicity;
        for (int i = 0; i < nc; ++i) {
            dl(i, d) = static_cast<long double>(circuit.cavities[i].frequency) -
                       dev.level_energy(1);
        }
    }
    for (const auto& cpl : circuit.couplings) {
        if (cpl.strength == 0.0) continue;
        const int i = rep.index_of(cpl.cavity_label);
        int d = -1;
        for (int k = 0; k < nd; ++k)
            if (circuit.devices[k].label == cpl.device_label) d = k;
        g(i, d) += cpl.strength;
        check_pole(static_cast<double>(dl(i, d)),
                   "Delta(" + cpl.cavity_label + "," + cpl.device_label + ")");
    }

    // Per-cavity order-2 sums: A_i = sum g^2/Delta, B_i = sum g^2/Delta^2.
    // Accumulations run in extended precision: the assembled Kerr
    // coefficients are small residues of cancelling terms.
    std::vector<long double> A(nc, 0.0L), B(nc, 0.0L), S(nc, 0.0L),
        L(nc, 0.0L);
    for (int i = 0; i < nc; ++i) {
        for (int d = 0; d < nd; ++d) {
            if (g(i, d) == 0.0) continue;
            const long double g2 =
                static_cast<long double>(g(i, d)) * g(i, d);
            A[i] += g2 / dl(i, d);
            B[i] += g2 / (dl(i, d) * dl(i, d));
        }
        L[i] += A[i];
    }

    // Same-cavity fourth order: S_i collects the doubly-excited device
    // states (one device twice, or two devices once each) minus the
    // wavefunction-renormalization square; each n(n-1) structure feeds
    // -1x its coefficient into the linear shift.
    for (int i = 0; i < nc; ++i) {
        for (int d = 0; d < nd; ++d) {
            if (g(i, d) == 0.0 || !anharmonic[d]) continue;
            check_pole(static_cast<double>(dl(i, d) - chi[d]),
                       "Delta - chi (" + circuit.devices[d].label + ")");
            const long double g2 =
                static_cast<long double>(g(i, d)) * g(i, d);
            const long double c4 =
                g2 * g2 /
                (dl(i, d) * dl(i, d) * (dl(i, d) - chi[d]));
            S[i] += c4;
            L[i] -= c4;
        }
        for (int d = 0; d < nd; ++d) {
            for (int e = d + 1; e < nd; ++e) {
                if (g(i, d) == 0.0 || g(i, e) == 0.0) continue;
                // (1/Dd + 1/De)^2/(Dd + De) written in its regular form;
                // the joint intermediate decouples at De = -Dd.
                const long double c4 =
                    static_cast<long double>(g(i, d)) * g(i, d) * g(i, e) *
                    g(i, e) * (dl(i, d) + dl(i, e)) /
                    (dl(i, d) * dl(i, d) * dl(i, e) * dl(i, e));
                S[i] += c4;
                L[i] -= c4;
            }
        }
        S[i] -= A[i] * B[i];
    }

    // Cavity pairs.
    for (int i = 0; i < nc; ++i) {
        for (int j = i + 1; j < nc; ++j) {
            long double x = 0.0L;

            // Photon hopping through any shared device. The bilinear part
            // (H_ij^2 - H_ji^2)/D_ij is regular at D_ij = 0 and equals
            // -(H_ij + H_ji) K_ij; only the linear part keeps the pole.
            long double hij = 0.0L, hji = 0.0L, kij = 0.0L;
            for (int d = 0; d < nd; ++d) {
                if (g(i, d) == 0.0 || g(j, d) == 0.0) continue;
                const long double gg =
                    static_cast<long double>(g(i, d)) * g(j, d);
                hij += gg / dl(i, d);
                hji += gg / dl(j, d);
                kij += gg / (dl(i, d) * dl(j, d));
            }
            if (hij != 0.0L || hji != 0.0L) {
                const long double dij =
                    static_cast<long double>(circuit.cavities[i].frequency) -
                    circuit.cavities[j].frequency;
                check_pole(static_cast<double>(dij),
                           "cavity-cavity detuning " +
                                    rep.cavity_labels[i] + "-" +
                                    rep.cavity_labels[j]);
                L[i] += hij * hij / dij;
                L[j] -= hji * hji / dij;
                x -= (hij + hji) * kij;
            }

            // One device taking a photon from each cavity (level 2).
            for (int d = 0; d < nd; ++d) {
                if (g(i, d) == 0.0 || g(j, d) == 0.0 || !anharmonic[d])
                    continue;
                const long double den = dl(i, d) + dl(j, d) - 2.0L * chi[d];
                check_pole(static_cast<double>(den), "Delta_i + Delta_j - 2 chi (" +
                                    circuit.devices[d].label + ")");
                const long double s =
                    1.0L / dl(i, d) + 1.0L / dl(j, d);
                x += 2.0L * g(i, d) * g(i, d) * g(j, d) * g(j, d) * s * s /
                     den;
            }

            // Two devices, one photon each, fed from both cavities. The
            // amplitude interferes to zero at mirrored configurations,
            // where the denominator also vanishes (dark intermediate).
            for (int d = 0; d < nd; ++d) {
                for (int e = d + 1; e < nd; ++e) {
                    long double amp = 0.0L;
                    if (g(i, d) != 0.0 && g(j, e) != 0.0) {
                        amp += static_cast<long double>(g(i, d)) * g(j, e) *
                               (1.0L / dl(i, d) + 1.0L / dl(j, e));
                    }
                    if (g(i, e) != 0.0 && g(j, d) != 0.0) {
                        amp += static_cast<long double>(g(i, e)) * g(j, d) *
                               (1.0L / dl(i, e) + 1.0L / dl(j, d));
                    }
                    if (amp == 0.0L) continue;
                    const long double den = dl(i, d) + dl(j, e);
                    const double ampd = static_cast<double>(amp);
                    if (std::abs(static_cast<double>(den)) < kPoleTol) {
                        if (ampd * ampd <
                            std::abs(static_cast<double>(den)) * 1e-9)
                            continue;
                        throw PoleProximity(
                            "kerr_closed_form: near-degenerate intermediate "
                            "with devices " + circuit.devices[d].label +
                            " and " + circuit.devices[e].label + " excited");
                    }
                    x += amp * amp / den;
                }
            }

            x -= A[i] * B[j] + A[j] * B[i];
            rep.cross_kerr(i, j) += static_cast<double>(x);
            rep.cross_kerr(j, i) += static_cast<double>(x);
        }
    }
    for (int i = 0; i < nc; ++i) {
        rep.self_kerr(i) = static_cast<double>(S[i]);
        rep.linear_shift(i) = static_cast<double>(L[i]);
    }
    return rep;
}

NonRwaCorrection pt_energy_nonrwa(double omega_c, double omega_q, double chi,
                                  double g, int n) {
    if (n < 0) throw std::invalid_argument("pt_energy_nonrwa: n < 0");
    const double delta = omega_c - omega_q;
    const double sum = omega_c + omega_q;
    for (auto [d, name] : std::initializer_list<std::pair<double, const char*>>{
             {delta, "Delta"},
             {2.0 * delta + chi, "2 Delta + chi"},
             {2.0 * omega_c + chi, "2 w_c + chi"},
             {2.0 * omega_q + chi, "2 w_q + chi"},
             {sum, "w_c + w_q"},
             {2.0 * sum + chi, "2 w_c + 2 w_q + chi"},
             {2.0 * omega_c, "2 w_c"}}) {
        if (std::abs(d) < kPoleTol) {
            throw PoleProximity(std::string("pt_energy_nonrwa: denominator ") +
                                name + " within 1e-6 GHz of zero");
        }
    }
    const double g2 = g * g;
    const double g4 = g2 * g2;
    const double nn = n;

    NonRwaCorrection out;
    out.order2 = g2 * nn / delta + g2 * (nn + 1.0) / sum;
    out.terms = {
        {"-g^4 n^2 / Delta^3", -g4 * nn * nn / std::pow(delta, 3)},
        {"2 g^4 n(n-1) / (Delta^2 (2 Delta + chi))",
         2.0 * g4 * nn * (nn - 1.0) / (delta * delta * (2.0 * delta + chi))},
        {"-g^4 n(n-1) / (Delta^2 (2 w_c + chi))",
         -g4 * nn * (nn - 1.0) / (delta * delta * (2.0 * omega_c + chi))},
        {"2 g^4 n^2 / (Delta^2 (2 w_q + chi))",
         2.0 * g4 * nn * nn / (delta * delta * (2.0 * omega_q + chi))},
        {"2 g^4 (n+1)^2 / ((2 w_q + chi)(w_c + w_q)^2)",
         2.0 * g4 * (nn + 1.0) * (nn + 1.0) /
             ((2.0 * omega_q + chi) * sum * sum)},
        {"2 g^4 (n+1)(n+2) / ((w_c + w_q)^2 (2 w_c + 2 w_q + chi))",
         2.0 * g4 * (nn + 1.0) * (nn + 2.0) / (sum * sum * (2.0 * sum + chi))},
        {"g^4 (n+1)(n+2) / (2 w_c (w_c + w_q)^2)",
         g4 * (nn + 1.0) * (nn + 2.0) / (2.0 * omega_c * sum * sum)},
        {"-g^4 (n+1)(n+2) / (2 w_c Delta (w_c + w_q))",
         -g4 * (nn + 1.0) * (nn + 2.0) / (2.0 * omega_c * delta * sum)},
    };
    out.num_rwa_terms = 2;
    for (const auto& t : out.terms) out.order4 += t.value;
    return out;
}

}  // namespace kerrforge

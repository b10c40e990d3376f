#include "kerrforge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kerrforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long kDenseDimCap = 4096;
constexpr double kKrylovTol = 1e-10;
constexpr int kKrylovMaxDim = 48;

}  // namespace

const std::vector<double>& TimeTrace::column(const std::string& name) const {
    for (const auto& [n, v] : series)
        if (n == name) return v;
    throw std::invalid_argument("TimeTrace: no column " + name);
}

Propagator::Propagator(const HamiltonianBundle& bundle, Method method)
    : space_(bundle.space) {
    if (!bundle.hamiltonian.is_hermitian()) {
        throw std::invalid_argument("Propagator: Hamiltonian is not Hermitian");
    }
    if (method == Method::Auto) {
        method = space_.total_dim() <= kDenseDimCap ? Method::Dense
                                                    : Method::Krylov;
    }
    method_ = method;
    if (method_ == Method::Dense) {
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(bundle.hamiltonian.entries);
        if (es.info() != Eigen::Success) {
            throw std::runtime_error("Propagator: eigendecomposition failed");
        }
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
    } else {
        h_ = bundle.hamiltonian.entries;
    }
}

StateVector Propagator::apply(const StateVector& psi, double t_us) const {
    if (!(psi.space == space_)) {
        throw std::invalid_argument("Propagator: state space mismatch");
    }
    const double t_ns = 1000.0 * t_us;
    if (method_ == Method::Dense) {
        VectorXc coeffs = evecs_.adjoint() * psi.amplitudes;
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
            coeffs(k) *= std::exp(Complex(0.0, -kTwoPi * evals_(k) * t_ns));
        }
        return StateVector{space_, evecs_ * coeffs};
    }
    return krylov_apply(psi, t_ns);
}

StateVector Propagator::krylov_apply(const StateVector& psi, double t_ns) const {
    // Lanczos with adaptive substepping; error estimated from the last
    // Krylov component, per-step tolerance 1e-10.
    VectorXc v = psi.amplitudes;
    const double norm0 = v.norm();
    if (norm0 == 0.0) return StateVector{space_, v};
    double remaining = t_ns;
    const double sign = remaining < 0 ? -1.0 : 1.0;
    remaining = std::abs(remaining);
    double dt = remaining;
    while (remaining > 0.0) {
        dt = std::min(dt, remaining);
        const double beta0 = v.norm();
        std::vector<VectorXc> basis;
        basis.push_back(v / beta0);
        std::vector<double> alpha, beta;
        int m = 0;
        double err = 1.0;
        Eigen::MatrixXd tri;
        VectorXc small;
        while (m < kKrylovMaxDim) {
            VectorXc w = h_ * basis[m];
            if (m > 0) w -= beta[m - 1] * basis[m - 1];
            const double a = std::real(basis[m].dot(w));
            w -= a * basis[m];
            // One round of reorthogonalization keeps the basis clean.
            for (const auto& b : basis) w -= b.dot(w) * b;
            alpha.push_back(a);
            const double bnext = w.norm();
            ++m;
            tri = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                tri(i, i) = alpha[i];
                if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
            VectorXc phases(m);
            for (int i = 0; i < m; ++i) {
                phases(i) = std::exp(
                    Complex(0.0, -sign * kTwoPi * es.eigenvalues()(i) * dt));
            }
            Eigen::VectorXd e1 = es.eigenvectors().row(0).transpose();
            small = es.eigenvectors().cast<Complex>() *
                    (phases.array() * e1.cast<Complex>().array()).matrix();
            err = (m < 2 || bnext == 0.0) ? bnext * std::abs(dt)
                                          : bnext * std::abs(small(m - 1)) *
                                                kTwoPi * std::abs(dt);
            if (bnext == 0.0) {
                err = 0.0;
                break;
            }
            if (err < kKrylovTol && m >= 3) break;
            beta.push_back(bnext);
            basis.push_back(w / bnext);
        }
        if (err >= kKrylovTol && dt > 1e-12) {
            dt *= 0.5;
            continue;
        }
        VectorXc next = VectorXc::Zero(v.size());
        for (int i = 0; i < m; ++i) next += small(i) * basis[i];
        v = beta0 * next;
        remaining -= dt;
    }
    // Guard unitarity drift.
    v *= norm0 / v.norm();
    return StateVector{space_, v};
}

std::vector<StateVector> Propagator::evolve(
    const StateVector& psi, const std::vector<double>& times_us) const {
    for (std::size_t i = 1; i < times_us.size(); ++i) {
        if (times_us[i] <= times_us[i - 1]) {
            throw std::invalid_argument("evolve: times must be strictly increasing");
        }
    }
    std::vector<StateVector> out(times_us.size(), StateVector{space_, {}});
    if (method_ == Method::Dense) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(times_us.size()); ++i) {
            out[i] = apply(psi, times_us[i]);
        }
    } else {
        StateVector current = psi;
        double t_prev = 0.0;
        for (std::size_t i = 0; i < times_us.size(); ++i) {
            current = apply(current, times_us[i] - t_prev);
            t_prev = times_us[i];
            out[i] = current;
        }
    }
    return out;
}

std::vector<double> time_grid(double t_max_us, int points) {
    if (points < 2 || t_max_us <= 0.0) {
        throw std::invalid_argument("time_grid: need points >= 2 and t_max > 0");
    }
    std::vector<double> t(points);
    for (int i = 0; i < points; ++i) t[i] = t_max_us * i / (points - 1.0);
    return t;
}

TimeTrace amplitude_trace(const std::vector<StateVector>& states,
                          const std::vector<double>& times_us,
                          const std::string& cavity_label) {
    if (states.empty() || states.size() != times_us.size()) {
        throw std::invalid_argument("amplitude_trace: empty or mismatched input");
    }
    const auto& space = states.front().space;
    OperatorMatrix a = embed(annihilation(space.dim(cavity_label)), space,
                             cavity_label);
    TimeTrace trace;
    trace.times_us = times_us;
    std::vector<double> abs_a(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        abs_a[i] = std::abs(expectation(states[i], a));
    }
    trace.series.push_back({"abs_a", std::move(abs_a)});
    return trace;
}

ReducedDensity partial_trace(const StateVector& psi,
                             const std::vector<std::string>& keep_labels) {
    if (keep_labels.empty()) {
        throw std::invalid_argument("partial_trace: keep set empty");
    }
    const auto& space = psi.space;
    std::vector<int> keep;
    for (const auto& l : keep_labels) keep.push_back(space.index_of(l));

    std::vector<std::pair<std::string, int>> kept_subs;
    long dim_keep = 1;
    for (int k = 0; k < space.num_subsystems(); ++k) {
        if (std::find(keep.begin(), keep.end(), k) != keep.end()) {
            kept_subs.push_back({space.label(k), space.dim(k)});
            dim_keep *= space.dim(k);
        }
    }
    if (static_cast<int>(kept_subs.size()) != static_cast<int>(keep_labels.size())) {
        throw std::invalid_argument("partial_trace: duplicate keep labels");
    }
    const long dim_rest = space.total_dim() / dim_keep;

    // Amplitudes as a (keep x rest) matrix; rho = A A^dag.
    MatrixXc a = MatrixXc::Zero(dim_keep, dim_rest);
    for (long flat = 0; flat < space.total_dim(); ++flat) {
        const auto occ = space.occupations(flat);
        long ik = 0, ir = 0;
        for (int k = 0; k < space.num_subsystems(); ++k) {
            if (std::find(keep.begin(), keep.end(), k) != keep.end()) {
                ik = ik * space.dim(k) + occ[k];
            } else {
                ir = ir * space.dim(k) + occ[k];
            }
        }
        a(ik, ir) = psi.amplitudes(flat);
    }
    ReducedDensity out;
    out.space = HilbertSpace(std::move(kept_subs));
    out.rho = a * a.adjoint();
    return out;
}

double purity(const ReducedDensity& rho) {
    return std::real((rho.rho * rho.rho).trace());
}

ReferenceFamily ReferenceFamily::coherent(Complex alpha) {
    return {{alpha}, {Complex(1.0, 0.0)}};
}

ReferenceFamily ReferenceFamily::cat(const std::vector<Complex>& components,
                                     const std::vector<Complex>& weights) {
    if (components.size() != weights.size() || components.empty()) {
        throw std::invalid_argument("ReferenceFamily::cat: bad component list");
    }
    return {components, weights};
}

namespace {

VectorXc reference_vector(const ReferenceFamily& family, int dim, double theta) {
    const Complex rot = std::exp(Complex(0.0, theta));
    VectorXc v = VectorXc::Zero(dim);
    for (std::size_t k = 0; k < family.components.size(); ++k) {
        v += family.weights[k] *
             coherent_amplitudes(dim, family.components[k] * rot);
    }
    const double n = v.norm();
    if (n == 0.0) throw std::invalid_argument("reference family sums to zero");
    return v / n;
}

}  // namespace

double fidelity_min_rotation(const StateVector& psi,
                             const std::string& cavity_label,
                             const ReferenceFamily& family) {
    const ReducedDensity rho = partial_trace(psi, {cavity_label});
    const int dim = rho.space.dim(0);
    auto fid = [&](double theta) {
        const VectorXc ref = reference_vector(family, dim, theta);
        const double p = std::max(0.0, std::real(ref.dot(rho.rho * ref)));
        return std::sqrt(p);
    };
    // 720-point scan, then golden-section refinement around the best point.
    const int npts = 720;
    double best_theta = 0.0, best = -1.0;
    for (int i = 0; i < npts; ++i) {
        const double theta = kTwoPi * i / npts;
        const double f = fid(theta);
        if (f > best) {
            best = f;
            best_theta = theta;
        }
    }
    double lo = best_theta - kTwoPi / npts;
    double hi = best_theta + kTwoPi / npts;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = fid(c), fd = fid(d);
    while (hi - lo > 1e-6) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = fid(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = fid(d);
        }
    }
    return std::max({best, fc, fd});
}

namespace {

WignerGrid wigner_impl(const ReducedDensity& rho_cavity,
                       const std::vector<Complex>& points, bool parallel) {
    if (rho_cavity.space.num_subsystems() != 1) {
        throw std::invalid_argument("wigner: single-mode density matrix required");
    }
    const int dim = rho_cavity.space.dim(0);
    const MatrixXc a = annihilation(dim);
    const MatrixXc par = parity_operator(dim);
    WignerGrid grid;
    grid.points = points;
    grid.values.assign(points.size(), 0.0);
    grid.clipped.assign(points.size(), false);

    auto eval = [&](std::size_t i) {
        const Complex beta = points[i];
        grid.clipped[i] = std::norm(beta) > 0.5 * dim;
        // D(beta) = exp(beta a^dag - beta* a) via the eigendecomposition of
        // the Hermitian generator -i(beta a^dag - beta* a).
        MatrixXc k = beta * a.adjoint() - std::conj(beta) * a;
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(Complex(0.0, -1.0) * k);
        VectorXc phases(dim);
        for (int m = 0; m < dim; ++m) {
            phases(m) = std::exp(Complex(0.0, es.eigenvalues()(m)));
        }
        const MatrixXc d =
            es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        const MatrixXc shifted = d.adjoint() * rho_cavity.rho * d;
        grid.values[i] =
            (2.0 / std::numbers::pi) * std::real((shifted * par).trace());
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(points.size()); ++i) {
            eval(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < points.size(); ++i) eval(i);
    }
    return grid;
}

}  // namespace

WignerGrid wigner(const ReducedDensity& rho_cavity,
                  const std::vector<Complex>& points) {
    return wigner_impl(rho_cavity, points, true);
}

WignerGrid wigner_serial(const ReducedDensity& rho_cavity,
                         const std::vector<Complex>& points) {
    return wigner_impl(rho_cavity, points, false);
}

std::vector<Complex> square_grid(double extent, int side) {
    if (side < 2 || extent <= 0.0) {
        throw std::invalid_argument("square_grid: need side >= 2, extent > 0");
    }
    std::vector<Complex> pts;
    pts.reserve(static_cast<std::size_t>(side) * side);
    for (int iy = 0; iy < side; ++iy) {
        const double im = -extent + 2.0 * extent * iy / (side - 1.0);
        for (int ix = 0; ix < side; ++ix) {
            const double re = -extent + 2.0 * extent * ix / (side - 1.0);
            pts.push_back(Complex(re, im));
        }
    }
    return pts;
}

std::vector<Revival> detect_revivals(const TimeTrace& trace,
                                     const std::string& column,
                                     double floor_fraction) {
    const auto& v = trace.column(column);
    const auto& t = trace.times_us;
    if (v.size() < 3) return {};
    const double v0 = v.front();
    const double floor = floor_fraction * v0;
    std::vector<Revival> peaks;
    double min_since = v0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        min_since = std::min(min_since, v[i]);
        if (v[i] >= v[i - 1] && v[i] > v[i + 1] && v[i] >= floor &&
            min_since < 0.5 * v[i]) {
            // Quadratic interpolation through the three samples.
            const double denom = v[i - 1] - 2.0 * v[i] + v[i + 1];
            double shift = 0.0;
            if (denom != 0.0) {
                shift = 0.5 * (v[i - 1] - v[i + 1]) / denom;
                shift = std::clamp(shift, -0.5, 0.5);
            }
            const double dt = t[i + 1] - t[i];
            Revival r;
            r.time_us = t[i] + shift * dt;
            r.amplitude = v[i] - 0.25 * (v[i - 1] - v[i + 1]) * shift;
            peaks.push_back(r);
            min_since = v[i];
        }
    }
    return peaks;
}

double full_revival_time(const TimeTrace& trace, const std::string& column,
                         double floor_fraction) {
    const auto peaks = detect_revivals(trace, column, floor_fraction);
    if (peaks.size() < 2) {
        throw std::runtime_error(
            "full_revival_time: fewer than two amplitude peaks detected");
    }
    return peaks[1].time_us;
}

}  // namespace kerrforge

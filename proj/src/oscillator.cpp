#include "qjump/oscillator.hpp"

#include <cmath>

#include "qjump/errors.hpp"

namespace qjump::oscillator {

namespace {

constexpr Complex kI(0.0, 1.0);

struct Moments {
    ComplexVector psi;
    ComplexVector xpsi;
    ComplexVector ppsi;
    double mean_x = 0.0;
    double mean_p = 0.0;
};

Moments moments(const StateVector& psi, const ComplexMatrix& x, const ComplexMatrix& p) {
    Moments m;
    m.psi = psi.amplitudes();
    m.xpsi = x * m.psi;
    m.ppsi = p * m.psi;
    m.mean_x = m.psi.dot(m.xpsi).real();
    m.mean_p = m.psi.dot(m.ppsi).real();
    return m;
}

// Columns u_p, u_x with u_a = (A_a - <A_a>) psi.
Eigen::Matrix<Complex, Eigen::Dynamic, 2> centered_images(const Moments& m) {
    Eigen::Matrix<Complex, Eigen::Dynamic, 2> u(m.psi.size(), 2);
    u.col(kP) = m.ppsi - m.mean_p * m.psi;
    u.col(kX) = m.xpsi - m.mean_x * m.psi;
    return u;
}

void check_params(const OscillatorParams& params) {
    if (params.levels < 2) throw InvalidGenerator("oscillator truncation needs at least 2 levels");
    if (!(params.mass > 0.0) || !(params.omega > 0.0) || !(params.hbar > 0.0)) {
        throw InvalidGenerator("oscillator mass, omega and hbar must be positive");
    }
}

}  // namespace

Eigen::Matrix2cd OscillatorParams::make_diffusion(double d11, double d22, double re_d12, double im_d12) {
    Eigen::Matrix2cd d;
    d(kP, kP) = d11;
    d(kX, kX) = d22;
    d(kP, kX) = Complex(re_d12, im_d12);
    d(kX, kP) = Complex(re_d12, -im_d12);
    return d;
}

OscillatorParams OscillatorParams::position_diffusion_default() {
    OscillatorParams p;
    p.diffusion = make_diffusion(0.0, 0.5, 0.0, 0.0);
    return p;
}

Operators build_operators(const OscillatorParams& params) {
    check_params(params);
    const Eigen::Index n = params.levels;
    Operators ops;
    ops.annihilation = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) ops.annihilation(k - 1, k) = std::sqrt(static_cast<double>(k));
    const ComplexMatrix a = ops.annihilation;
    const ComplexMatrix ad = a.adjoint();
    ops.number = ad * a;
    ops.position = std::sqrt(params.hbar / (2.0 * params.mass * params.omega)) * (a + ad);
    ops.momentum = kI * std::sqrt(params.mass * params.hbar * params.omega / 2.0) * (ad - a);
    ops.hamiltonian = params.hbar * params.omega
                      * (ops.number + 0.5 * ComplexMatrix::Identity(n, n));
    return ops;
}

GeneratorSpec oscillator_generator_unchecked(const OscillatorParams& params) {
    const Operators ops = build_operators(params);
    GeneratorSpec g;
    g.dim = params.levels;
    g.hbar = params.hbar;
    g.hamiltonian = ops.hamiltonian + (0.5 * params.friction()) * anticommutator(ops.position, ops.momentum);
    g.couplings = {ops.momentum, ops.position};
    g.coeff = params.diffusion;
    return g;
}

GeneratorSpec oscillator_generator(const OscillatorParams& params) {
    GeneratorSpec g = oscillator_generator_unchecked(params);
    return GeneratorSpec(g.hbar, std::move(g.hamiltonian), std::move(g.couplings), std::move(g.coeff));
}

ComplexMatrix literal_generator(const OscillatorParams& params, const ComplexMatrix& rho) {
    const Operators ops = build_operators(params);
    const double hbar = params.hbar;
    const double lambda = params.friction();
    const ComplexMatrix* a[2] = {&ops.momentum, &ops.position};

    ComplexMatrix out = (-kI / hbar) * commutator(ops.hamiltonian, rho);
    out += (-kI * lambda / hbar) * commutator(ops.position, anticommutator(ops.momentum, rho));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double re_d = params.diffusion(i, j).real();
            if (re_d == 0.0) continue;
            out -= (re_d / (hbar * hbar)) * commutator(*a[i], commutator(*a[j], rho));
        }
    }
    return out;
}

Eigen::Matrix2cd sigma(const StateVector& psi, const ComplexMatrix& x, const ComplexMatrix& p) {
    const Moments m = moments(psi, x, p);
    const auto u = centered_images(m);
    Eigen::Matrix2cd s;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) s(i, j) = u.col(i).dot(u.col(j));
    }
    return s;
}

Eigen::Matrix2d symmetrized_sigma(const Eigen::Matrix2cd& s) {
    return s.real();
}

double hasse_defect(const StateVector& psi, const OscillatorParams& params) {
    const Operators ops = build_operators(params);
    const Eigen::Matrix2cd s = sigma(psi, ops.position, ops.momentum);
    Complex contraction(0.0, 0.0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) contraction += params.diffusion(i, j).real() * s(i, j);
    }
    return contraction.real() - 0.5 * params.hbar * params.hbar * params.friction();
}

ComplexMatrix closed_form_modified_rate_operator(const StateVector& psi, const OscillatorParams& params) {
    const Operators ops = build_operators(params);
    const auto u = centered_images(moments(psi, ops.position, ops.momentum));
    const double scale = 2.0 / (params.hbar * params.hbar);
    ComplexMatrix w = ComplexMatrix::Zero(psi.dim(), psi.dim());
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            w.noalias() += (scale * params.diffusion(i, j)) * (u.col(i) * u.col(j).adjoint());
        }
    }
    return w;
}

RateReport closed_form_channels(const StateVector& psi, const OscillatorParams& params) {
    const Operators ops = build_operators(params);
    const Moments m = moments(psi, ops.position, ops.momentum);
    const auto u = centered_images(m);
    const double scale = 2.0 / (params.hbar * params.hbar);
    const Eigen::Matrix2cd& d = params.diffusion;
    RateReport report;

    if (d(kP, kP) == Complex(0.0) && d(kP, kX) == Complex(0.0)) {
        const double var_x = u.col(kX).squaredNorm();
        report.total = scale * d(kX, kX).real() * var_x;
        if (var_x > 1e-24 && report.total > 1e-14) {
            report.channels.push_back({report.total, StateVector(u.col(kX) / std::sqrt(var_x))});
        }
        return report;
    }

    Eigen::Matrix2cd s;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) s(i, j) = u.col(i).dot(u.col(j));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> gram(s);
    Eigen::Vector2d root = gram.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::Vector2d inv_root;
    for (int k = 0; k < 2; ++k) inv_root[k] = root[k] > 1e-12 ? 1.0 / root[k] : 0.0;
    const Eigen::Matrix2cd s_half = gram.eigenvectors() * root.asDiagonal() * gram.eigenvectors().adjoint();
    const Eigen::Matrix2cd s_inv_half = gram.eigenvectors() * inv_root.asDiagonal() * gram.eigenvectors().adjoint();

    const Eigen::Matrix2cd reduced = s_half * (scale * d) * s_half;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> red(0.5 * (reduced + reduced.adjoint()));
    report.total = red.eigenvalues().sum();
    const double floor = std::max(1e-12 * report.total, 1e-14);
    for (int k = 0; k < 2; ++k) {
        const double rate = red.eigenvalues()[k];
        if (rate < floor) continue;
        const Eigen::Vector2cd c = s_inv_half * red.eigenvectors().col(k);
        report.channels.push_back({rate, StateVector(u * c)});
    }
    return report;
}

ComplexVector explicit_frictional_rhs(const StateVector& psi, const OscillatorParams& params) {
    const Operators ops = build_operators(params);
    const Moments m = moments(psi, ops.position, ops.momentum);
    const double hbar = params.hbar;
    const double lambda = params.friction();
    const ComplexVector& y = m.psi;

    const ComplexVector hy = ops.hamiltonian * y;
    const double mean_h = y.dot(hy).real();
    const ComplexVector xpy = ops.position * m.ppsi;
    const Complex mean_xp = y.dot(xpy);

    ComplexVector out = (-kI / hbar) * (hy - mean_h * y);
    out += (-kI * lambda / hbar) * (xpy + m.mean_p * m.xpsi - m.mean_x * m.ppsi - mean_xp * y);

    const auto u = centered_images(m);
    const Eigen::Matrix2cd s = sigma(psi, ops.position, ops.momentum);
    const ComplexMatrix* a[2] = {&ops.momentum, &ops.position};
    const double means[2] = {m.mean_p, m.mean_x};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double re_d = params.diffusion(i, j).real();
            if (re_d == 0.0) continue;
            // (A_i - <A_i>)(A_j - <A_j>) psi - sigma_ij psi
            const ComplexVector term = (*a[i]) * u.col(j) - means[i] * u.col(j) - s(i, j) * y;
            out -= (re_d / (hbar * hbar)) * term;
        }
    }
    return out;
}

ComplexMatrix frictional_hamiltonian(const StateVector& psi, const OscillatorParams& params) {
    const Operators ops = build_operators(params);
    const Moments m = moments(psi, ops.position, ops.momentum);
    const Eigen::Index n = psi.dim();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const double hbar = params.hbar;
    const double lambda = params.friction();
    const ComplexMatrix xp_sym = anticommutator(ops.position, ops.momentum);
    const double mean_sym = m.psi.dot(xp_sym * m.psi).real();

    ComplexMatrix h = ops.hamiltonian;
    h += lambda * (0.5 * xp_sym - 0.5 * mean_sym * id + m.mean_p * ops.position - m.mean_x * ops.momentum);

    const Eigen::Matrix2cd s = sigma(psi, ops.position, ops.momentum);
    const ComplexMatrix shifted[2] = {ops.momentum - m.mean_p * id, ops.position - m.mean_x * id};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double re_d = params.diffusion(i, j).real();
            if (re_d == 0.0) continue;
            h -= (kI / hbar) * re_d * (shifted[i] * shifted[j] - s(i, j) * id);
        }
    }
    return h;
}

double top_occupancy(const StateVector& psi) {
    const Eigen::Index n = psi.dim();
    double occ = std::norm(psi[n - 1]);
    if (n >= 2) occ += std::norm(psi[n - 2]);
    return occ;
}

bool truncation_safe(const StateVector& psi, double threshold) {
    return top_occupancy(psi) <= threshold;
}

StateVector fock_state(Eigen::Index levels, Eigen::Index n) {
    return StateVector::basis(levels, n);
}

StateVector coherent_state(Eigen::Index levels, Complex alpha) {
    ComplexVector c(levels);
    c[0] = std::exp(-0.5 * std::norm(alpha));
    for (Eigen::Index k = 1; k < levels; ++k) c[k] = c[k - 1] * alpha / std::sqrt(static_cast<double>(k));
    return StateVector(std::move(c));
}

}  // namespace qjump::oscillator

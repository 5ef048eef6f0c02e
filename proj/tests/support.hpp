#pragma once

// Test-only helpers and independent oracles. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qjump/linalg.hpp"

namespace qjump::testing {

using cd = std::complex<double>;

inline ComplexMatrix random_hermitian(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal;
    ComplexMatrix r(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) r(i, j) = cd(normal(rng), normal(rng));
    }
    return 0.5 * scale * (r + r.adjoint());
}

/// Random amplitudes on the first `support` levels only.
inline StateVector random_state(Eigen::Index n, std::mt19937_64& rng, Eigen::Index support = -1) {
    std::normal_distribution<double> normal;
    if (support < 0) support = n;
    ComplexVector v = ComplexVector::Zero(n);
    for (Eigen::Index i = 0; i < support; ++i) v[i] = cd(normal(rng), normal(rng));
    return StateVector(std::move(v));
}

/// Random density matrix of full rank.
inline ComplexMatrix random_density(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    ComplexMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cd(normal(rng), normal(rng));
    }
    ComplexMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

/// Ladder operators written out element by element (m = omega = 1 scaled by
/// hbar): x_{n,n+1} = sqrt(hbar (n+1) / (2 m omega)), p_{n,n+1} = -i sqrt(m hbar omega (n+1) / 2).
struct FockOracle {
    ComplexMatrix x, p, h0;
    FockOracle(Eigen::Index n, double m = 1.0, double omega = 1.0, double hbar = 1.0) {
        x = ComplexMatrix::Zero(n, n);
        p = ComplexMatrix::Zero(n, n);
        h0 = ComplexMatrix::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            h0(k, k) = hbar * omega * (static_cast<double>(k) + 0.5);
            if (k + 1 < n) {
                const double s = std::sqrt(static_cast<double>(k + 1));
                x(k, k + 1) = x(k + 1, k) = std::sqrt(hbar / (2.0 * m * omega)) * s;
                p(k, k + 1) = cd(0.0, -std::sqrt(m * hbar * omega / 2.0) * s);
                p(k + 1, k) = cd(0.0, std::sqrt(m * hbar * omega / 2.0) * s);
            }
        }
    }
};

/// Literal damped-oscillator generator, three terms, double commutator with
/// 1/hbar^2. d11, d22, re12 are Re D; lambda is the friction constant.
inline ComplexMatrix literal_oscillator_generator(const FockOracle& f, double hbar, double lambda,
                                                  double d11, double d22, double re12,
                                                  const ComplexMatrix& rho) {
    auto comm = [](const ComplexMatrix& a, const ComplexMatrix& b) -> ComplexMatrix { return a * b - b * a; };
    auto anti = [](const ComplexMatrix& a, const ComplexMatrix& b) -> ComplexMatrix { return a * b + b * a; };
    const cd i(0.0, 1.0);
    ComplexMatrix out = -i / hbar * comm(f.h0, rho);
    out += -i * lambda / hbar * comm(f.x, anti(f.p, rho));
    out -= d11 / (hbar * hbar) * comm(f.p, comm(f.p, rho));
    out -= d22 / (hbar * hbar) * comm(f.x, comm(f.x, rho));
    out -= re12 / (hbar * hbar) * (comm(f.p, comm(f.x, rho)) + comm(f.x, comm(f.p, rho)));
    return out;
}

/// Squeezed vacuum with squeezing r along x (sigma_xx = hbar e^{-2r} / (2 m omega)):
/// c_{2n} = (-tanh r)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh r).
inline ComplexVector squeezed_vacuum(Eigen::Index levels, double r) {
    ComplexVector c = ComplexVector::Zero(levels);
    const double t = std::tanh(r);
    double coeff = 1.0 / std::sqrt(std::cosh(r));
    for (Eigen::Index n = 0; 2 * n < levels; ++n) {
        if (n > 0) {
            // ratio c_{2n}/c_{2n-2} = -t sqrt((2n)(2n-1)) / (2n)
            coeff *= -t * std::sqrt(static_cast<double>(2 * n) * (2 * n - 1)) / (2.0 * n);
        }
        c[2 * n] = coeff;
    }
    return c;
}

/// Kolmogorov-Smirnov statistic of samples against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// One-sample KS critical value at the 1% level (asymptotic).
inline double ks_critical_1pct(std::size_t n) {
    return 1.628 / std::sqrt(static_cast<double>(n));
}

inline double up_to_phase_overlap(const ComplexVector& a, const ComplexVector& b) {
    return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

}  // namespace qjump::testing

#include "qjump/unraveling.hpp"

#include <cmath>
#include <string>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

constexpr double kClampTolerance = 1e-10;
constexpr double kNegativeRate = 1e-6;
constexpr double kRelativeRateFloor = 1e-12;
constexpr double kAbsoluteRateFloor = 1e-14;
constexpr double kOverlapThreshold = 1e-6;

void require_dim(const GeneratorSpec& g, Eigen::Index dim, const char* what) {
    if (dim != g.dim) {
        throw DimensionMismatch(std::string(what) + ": state dimension " + std::to_string(dim)
                                + " does not match generator dimension " + std::to_string(g.dim));
    }
}

// sum_ab gamma_ab (<A_b A_a> - <A_a><A_b>) for y/|y|
double decay_rate_moments(const ComplexMatrix& gamma, const std::vector<ComplexVector>& u,
                          const ComplexVector& y, double norm2) {
    const auto k = static_cast<Eigen::Index>(u.size());
    Complex acc(0.0, 0.0);
    for (Eigen::Index a = 0; a < k; ++a) {
        const double ea = y.dot(u[a]).real() / norm2;
        for (Eigen::Index b = 0; b < k; ++b) {
            const double eb = y.dot(u[b]).real() / norm2;
            acc += gamma(a, b) * (u[b].dot(u[a]) / norm2 - ea * eb);
        }
    }
    return acc.real();
}

ComplexMatrix gamma_of(const GeneratorSpec& g) {
    return (2.0 / (g.hbar * g.hbar)) * g.coeff;
}

}  // namespace

double RateReport::channel_sum() const {
    double s = 0.0;
    for (const auto& c : channels) s += c.rate;
    return s;
}

double total_decay_rate(const GeneratorSpec& g, const StateVector& psi) {
    require_dim(g, psi.dim(), "total_decay_rate");
    const ComplexVector& y = psi.amplitudes();
    std::vector<ComplexVector> u;
    u.reserve(g.couplings.size());
    for (const auto& a : g.couplings) u.push_back(a * y);
    const double w = decay_rate_moments(gamma_of(g), u, y, y.squaredNorm());
    if (w < 0.0) {
        if (w < -kClampTolerance) {
            throw NegativeRate("total decay rate " + std::to_string(w) + " is negative");
        }
        return 0.0;
    }
    return w;
}

ComplexMatrix transition_rate_operator(const GeneratorSpec& g, const StateVector& psi) {
    require_dim(g, psi.dim(), "transition_rate_operator");
    const ComplexMatrix proj = psi.projector();
    const ComplexMatrix l = apply_generator(g, proj);
    const Complex mean = psi.amplitudes().dot(l * psi.amplitudes());
    return l - l * proj - proj * l + 2.0 * mean * proj;
}

ComplexMatrix modified_rate_operator(const GeneratorSpec& g, const StateVector& psi) {
    require_dim(g, psi.dim(), "modified_rate_operator");
    const ComplexMatrix proj = psi.projector();
    const ComplexMatrix l = apply_generator(g, proj);
    const Complex mean = psi.amplitudes().dot(l * psi.amplitudes());
    ComplexMatrix w = l - l * proj - proj * l + mean * proj;
    const double min_eig = hermitian_eigenvalues(w).minCoeff();
    if (min_eig < -kNegativeRate) {
        throw NegativeRate("W' has eigenvalue " + std::to_string(min_eig)
                           + "; the generator is not of Lindblad form");
    }
    return w;
}

RateReport jump_channels(const GeneratorSpec& g, const StateVector& psi) {
    const ComplexMatrix w = modified_rate_operator(g, psi);
    RateReport report;
    report.total = w.trace().real();
    const double floor = std::max(kRelativeRateFloor * report.total, kAbsoluteRateFloor);
    for (auto& pair : hermitian_eigendecomposition(w)) {
        if (pair.value < -kNegativeRate) {
            throw NegativeRate("W' eigenvalue " + std::to_string(pair.value));
        }
        const double rate = std::max(pair.value, 0.0);
        if (rate < floor) continue;
        if (std::abs(pair.vector.dot(psi.amplitudes())) > kOverlapThreshold) continue;
        report.channels.push_back({rate, StateVector(std::move(pair.vector))});
    }
    return report;
}

ComplexVector frictional_rhs(const GeneratorSpec& g, const StateVector& psi) {
    require_dim(g, psi.dim(), "frictional_rhs");
    return FlowKernel(g).rhs(psi.amplitudes());
}

FlowKernel::FlowKernel(const GeneratorSpec& g)
    : g_(&g), k_(static_cast<Eigen::Index>(g.couplings.size())), gamma_(gamma_of(g)) {
    const Eigen::Index d = g.dim;
    stacked_.resize((k_ + 1) * d, d);
    ComplexMatrix effective = Complex(0.0, -1.0 / g.hbar) * g.hamiltonian;
    for (Eigen::Index a = 0; a < k_; ++a) {
        for (Eigen::Index b = 0; b < k_; ++b) {
            if (gamma_(a, b) == Complex(0.0, 0.0)) continue;
            effective.noalias() -= (0.5 * gamma_(a, b)) * (g.couplings[b] * g.couplings[a]);
        }
        stacked_.middleRows((a + 1) * d, d) = g.couplings[a];
    }
    stacked_.topRows(d) = effective;
}

double FlowKernel::evaluate(const ComplexVector& y, ComplexVector& out, Workspace& ws) const {
    const Eigen::Index d = g_->dim;
    if (y.size() != d) throw DimensionMismatch("frictional rhs: dimension mismatch");
    const double norm2 = y.squaredNorm();

    // L[Y] y = M y + sum_a c_a A_a y + conj(<M>) y, with c_a = sum_b gamma_ab <A_b>
    ws.stacked.noalias() = stacked_ * y;
    ws.means.resize(k_);
    for (Eigen::Index a = 0; a < k_; ++a) {
        ws.means[a] = y.dot(ws.stacked.segment((a + 1) * d, d)).real() / norm2;
    }
    out = ws.stacked.head(d);
    const Complex m_mean = y.dot(out) / norm2;
    double l_mean = 0.0;
    for (Eigen::Index a = 0; a < k_; ++a) {
        const auto ua = ws.stacked.segment((a + 1) * d, d);
        Complex c(0.0, 0.0);
        for (Eigen::Index b = 0; b < k_; ++b) {
            const Complex gab = gamma_(a, b);
            if (gab == Complex(0.0, 0.0)) continue;
            c += gab * ws.means[b];
            const auto ub = ws.stacked.segment((b + 1) * d, d);
            l_mean += (gab * (ws.means[a] * ws.means[b] - ub.dot(ua) / norm2)).real();
        }
        out.noalias() += c * ua;
    }
    out += (std::conj(m_mean) - l_mean) * y;
    return -l_mean;
}

ComplexVector FlowKernel::rhs(const ComplexVector& y) const {
    Workspace ws;
    ComplexVector out;
    evaluate(y, out, ws);
    return out;
}

double FlowKernel::decay_rate(const ComplexVector& y) const {
    std::vector<ComplexVector> u(static_cast<std::size_t>(k_));
    for (Eigen::Index a = 0; a < k_; ++a) u[a] = g_->couplings[a] * y;
    return decay_rate_moments(gamma_, u, y, y.squaredNorm());
}

}  // namespace qjump

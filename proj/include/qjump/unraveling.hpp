#pragma once

#include <vector>

#include "qjump/generator.hpp"
#include "qjump/linalg.hpp"

namespace qjump {

/// One eigenpair of W' with nonzero rate.
struct JumpChannel {
    double rate = 0.0;
    StateVector target;
};

struct RateReport {
    double total = 0.0;
    std::vector<JumpChannel> channels;

    double channel_sum() const;
};

/// -<L[psi psi^dagger]>. Uses only K matrix-vector products.
double total_decay_rate(const GeneratorSpec& g, const StateVector& psi);

/// W = L - {L - <L>, psi psi^dagger}, L = L[psi psi^dagger].
ComplexMatrix transition_rate_operator(const GeneratorSpec& g, const StateVector& psi);

/// W' = L - {L, psi psi^dagger} + <L> psi psi^dagger. Throws NegativeRate when
/// an eigenvalue is below -1e-6.
ComplexMatrix modified_rate_operator(const GeneratorSpec& g, const StateVector& psi);

/// Eigendecomposition of W'. Eigenpairs with rate below max(1e-12 tr W', 1e-14)
/// or with |<phi|psi>| > 1e-6 are dropped; eigenvalues in [-1e-6, 0) are
/// clamped first. `total` is tr W'.
RateReport jump_channels(const GeneratorSpec& g, const StateVector& psi);

/// (L[psi psi^dagger] - <L[psi psi^dagger]>) psi
ComplexVector frictional_rhs(const GeneratorSpec& g, const StateVector& psi);

/// Precomputed pieces of the frictional flow for repeated evaluation.
///
/// For y not normalized every expectation is taken in y/|y|, which keeps the
/// flow homogeneous and norm preserving off the unit sphere (needed by the
/// intermediate Runge-Kutta stages).
class FlowKernel {
public:
    /// Scratch buffers; one per thread.
    struct Workspace {
        ComplexVector stacked;
        Eigen::VectorXd means;
    };

    explicit FlowKernel(const GeneratorSpec& g);

    const GeneratorSpec& generator() const { return *g_; }

    ComplexVector rhs(const ComplexVector& y) const;
    /// Writes the flow at y into `out` and returns the (unclamped) total decay
    /// rate of y/|y|, which falls out of the same moments.
    double evaluate(const ComplexVector& y, ComplexVector& out, Workspace& ws) const;
    /// Total decay rate of y/|y|, unclamped.
    double decay_rate(const ComplexVector& y) const;

private:
    const GeneratorSpec* g_;
    Eigen::Index k_ = 0;
    // rows [0, d): -(i/hbar) H - (1/hbar^2) sum_ab D_ab A_b A_a; then A_1..A_K
    ComplexMatrix stacked_;
    // (2/hbar^2) D
    ComplexMatrix gamma_;
};

}  // namespace qjump

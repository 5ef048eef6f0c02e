#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qjump/linalg.hpp"

namespace qjump {

/// Markovian generator in GKS form:
///
///   L[rho] = -(i/hbar)[H, rho]
///            + (2/hbar^2) sum_ab D_ab (A_a rho A_b - 1/2 {A_b A_a, rho})
///
/// with Hermitian couplings A_a and a Hermitian positive-semidefinite
/// coefficient matrix D. For A = (p, x) the antisymmetric part of D carries
/// the friction constant lambda = (2/hbar) Im D_12.
struct GeneratorSpec {
    Eigen::Index dim = 0;
    double hbar = 1.0;
    ComplexMatrix hamiltonian;
    std::vector<ComplexMatrix> couplings;
    ComplexMatrix coeff;

    GeneratorSpec() = default;
    /// Validates the invariants; throws InvalidGenerator.
    GeneratorSpec(double hbar, ComplexMatrix hamiltonian, std::vector<ComplexMatrix> couplings,
                  ComplexMatrix coeff);

    std::size_t coupling_count() const { return couplings.size(); }
    /// (2/hbar) Im D_12 when there are exactly two couplings.
    std::optional<double> friction_constant() const;
};

/// Hermitian, unit-trace, positive-semidefinite operator.
class DensityOperator {
public:
    /// Throws InvalidState when any invariant fails.
    explicit DensityOperator(ComplexMatrix matrix);
    static DensityOperator pure(const StateVector& psi);

    Eigen::Index dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

private:
    ComplexMatrix matrix_;
};

/// L[rho]. rho must be Hermitian; unit trace is not required.
ComplexMatrix apply_generator(const GeneratorSpec& g, const ComplexMatrix& rho);

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    std::string detail;
};

struct GeneratorReport {
    std::vector<CheckResult> checks;
    std::optional<double> friction_constant;

    bool all_passed() const;
};

/// Diagnostics for a possibly invalid spec. Never throws; each check reports
/// separately. Probes use a fixed internal seed.
GeneratorReport validate_generator(const GeneratorSpec& g);

}  // namespace qjump

#include "qjump/generator.hpp"

#include <cmath>
#include <random>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

constexpr double kHermitianTolerance = 1e-10;
constexpr double kPsdTolerance = 1e-10;

struct StructureIssue {
    std::string message;
};

std::vector<StructureIssue> structural_issues(double hbar, const ComplexMatrix& h,
                                              const std::vector<ComplexMatrix>& couplings,
                                              const ComplexMatrix& coeff) {
    std::vector<StructureIssue> issues;
    if (!(hbar > 0.0) || !std::isfinite(hbar)) issues.push_back({"hbar must be positive"});
    if (h.rows() == 0 || h.rows() != h.cols()) {
        issues.push_back({"hamiltonian must be a non-empty square matrix"});
        return issues;
    }
    const auto d = h.rows();
    for (std::size_t a = 0; a < couplings.size(); ++a) {
        if (couplings[a].rows() != d || couplings[a].cols() != d) {
            issues.push_back({"coupling " + std::to_string(a) + " has wrong dimension"});
        }
    }
    const auto k = static_cast<Eigen::Index>(couplings.size());
    if (coeff.rows() != k || coeff.cols() != k) {
        issues.push_back({"coefficient matrix must be K x K with K = number of couplings"});
    }
    return issues;
}

}  // namespace

GeneratorSpec::GeneratorSpec(double hbar_, ComplexMatrix hamiltonian_,
                             std::vector<ComplexMatrix> couplings_, ComplexMatrix coeff_)
    : dim(hamiltonian_.rows()), hbar(hbar_), hamiltonian(std::move(hamiltonian_)),
      couplings(std::move(couplings_)), coeff(std::move(coeff_)) {
    const auto issues = structural_issues(hbar, hamiltonian, couplings, coeff);
    if (!issues.empty()) throw InvalidGenerator(issues.front().message);
    if (hermiticity_defect(hamiltonian) > kHermitianTolerance) {
        throw InvalidGenerator("hamiltonian is not Hermitian");
    }
    for (std::size_t a = 0; a < couplings.size(); ++a) {
        if (hermiticity_defect(couplings[a]) > kHermitianTolerance) {
            throw InvalidGenerator("coupling " + std::to_string(a) + " is not Hermitian");
        }
    }
    if (coeff.size() > 0) {
        if (hermiticity_defect(coeff) > kHermitianTolerance) {
            throw InvalidGenerator("coefficient matrix is not Hermitian");
        }
        const double min_eig = hermitian_eigenvalues(coeff).minCoeff();
        if (min_eig < -kPsdTolerance) {
            throw InvalidGenerator("coefficient matrix is not positive semidefinite (min eigenvalue "
                                   + std::to_string(min_eig) + ")");
        }
    }
}

std::optional<double> GeneratorSpec::friction_constant() const {
    if (couplings.size() != 2) return std::nullopt;
    return 2.0 / hbar * coeff(0, 1).imag();
}

DensityOperator::DensityOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
        throw InvalidState("density operator must be a non-empty square matrix");
    }
    if (hermiticity_defect(matrix_) > 1e-10) throw InvalidState("density operator is not Hermitian");
    if (std::abs(matrix_.trace() - 1.0) > 1e-10) throw InvalidState("density operator trace is not 1");
    if (hermitian_eigenvalues(matrix_).minCoeff() < -1e-8) {
        throw InvalidState("density operator is not positive semidefinite");
    }
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
    return DensityOperator(psi.projector());
}

ComplexMatrix apply_generator(const GeneratorSpec& g, const ComplexMatrix& rho) {
    if (rho.rows() != g.dim || rho.cols() != g.dim) {
        throw DimensionMismatch("apply_generator: rho has dimension " + std::to_string(rho.rows())
                                + ", generator has " + std::to_string(g.dim));
    }
    const Complex minus_i_over_hbar(0.0, -1.0 / g.hbar);
    ComplexMatrix out = minus_i_over_hbar * commutator(g.hamiltonian, rho);

    const double rate_scale = 2.0 / (g.hbar * g.hbar);
    const auto k = static_cast<Eigen::Index>(g.couplings.size());
    std::vector<ComplexMatrix> a_rho(g.couplings.size());
    std::vector<ComplexMatrix> rho_a(g.couplings.size());
    for (Eigen::Index a = 0; a < k; ++a) {
        a_rho[a] = g.couplings[a] * rho;
        rho_a[a] = rho * g.couplings[a];
    }
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            const Complex c = rate_scale * g.coeff(a, b);
            if (c == Complex(0.0, 0.0)) continue;
            // A_a rho A_b - 1/2 A_b A_a rho - 1/2 rho A_b A_a
            out.noalias() += c * (a_rho[a] * g.couplings[b]);
            out.noalias() -= (0.5 * c) * (g.couplings[b] * a_rho[a]);
            out.noalias() -= (0.5 * c) * (rho_a[b] * g.couplings[a]);
        }
    }
    return out;
}

bool GeneratorReport::all_passed() const {
    for (const auto& c : checks) {
        if (!c.passed) return false;
    }
    return true;
}

GeneratorReport validate_generator(const GeneratorSpec& g) {
    GeneratorReport report;
    const auto issues = structural_issues(g.hbar, g.hamiltonian, g.couplings, g.coeff);
    if (!issues.empty()) {
        for (const auto& issue : issues) report.checks.push_back({"structure", false, 0.0, issue.message});
        return report;
    }

    const double h_defect = hermiticity_defect(g.hamiltonian);
    report.checks.push_back({"hamiltonian_hermitian", h_defect <= kHermitianTolerance, h_defect, ""});
    double a_defect = 0.0;
    for (const auto& a : g.couplings) a_defect = std::max(a_defect, hermiticity_defect(a));
    report.checks.push_back({"couplings_hermitian", a_defect <= kHermitianTolerance, a_defect, ""});

    if (g.coeff.size() > 0) {
        const double d_defect = hermiticity_defect(g.coeff);
        report.checks.push_back({"coeff_hermitian", d_defect <= kHermitianTolerance, d_defect, ""});
        const double min_eig = hermitian_eigenvalues(0.5 * (g.coeff + g.coeff.adjoint())).minCoeff();
        report.checks.push_back({"coeff_psd", min_eig >= -kPsdTolerance, min_eig,
                                 "minimum eigenvalue of D"});
    }

    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> normal;
    double worst_trace = 0.0;
    double worst_herm = 0.0;
    for (int probe = 0; probe < 10; ++probe) {
        ComplexMatrix r(g.dim, g.dim);
        for (Eigen::Index i = 0; i < g.dim; ++i) {
            for (Eigen::Index j = 0; j < g.dim; ++j) r(i, j) = Complex(normal(rng), normal(rng));
        }
        const ComplexMatrix rho = 0.5 * (r + r.adjoint());
        const ComplexMatrix out = apply_generator(g, rho);
        const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
        worst_trace = std::max(worst_trace, std::abs(out.trace()) / scale);
        worst_herm = std::max(worst_herm, hermiticity_defect(out) / scale);
    }
    report.checks.push_back({"output_traceless", worst_trace <= 1e-10, worst_trace, "10 random Hermitian probes"});
    report.checks.push_back({"output_hermitian", worst_herm <= 1e-10, worst_herm, "10 random Hermitian probes"});

    report.friction_constant = g.friction_constant();
    return report;
}

}  // namespace qjump

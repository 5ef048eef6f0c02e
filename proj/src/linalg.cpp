#include "qjump/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

constexpr double kHermitianTolerance = 1e-10;
constexpr double kNonzeroAmplitude = 1e-10;
constexpr double kDegenerateRelative = 1e-12;

void fix_phase(ComplexVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]);
        if (mag > kNonzeroAmplitude) {
            v *= std::conj(v[i]) / mag;
            v[i] = Complex(std::abs(v[i]), 0.0);
            return;
        }
    }
}

bool lexicographic_less(const ComplexVector& a, const ComplexVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch(std::string(what) + ": matrix is not square");
    }
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& m) {
    require_square(m, "hermiticity_defect");
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) throw InvalidState("state vector has zero dimension");
    if (!amplitudes_.allFinite()) throw InvalidState("state vector has non-finite amplitudes");
    const double norm = amplitudes_.norm();
    if (!(norm > 1e-12)) throw InvalidState("state vector is not normalizable");
    amplitudes_ /= norm;
}

StateVector StateVector::basis(Eigen::Index dim, Eigen::Index n) {
    if (n < 0 || n >= dim) throw InvalidState("basis index out of range");
    ComplexVector v = ComplexVector::Zero(dim);
    v[n] = 1.0;
    return StateVector(std::move(v));
}

ComplexMatrix StateVector::projector() const {
    return amplitudes_ * amplitudes_.adjoint();
}

std::vector<EigenPair> hermitian_eigendecomposition(const ComplexMatrix& m) {
    require_square(m, "hermitian_eigendecomposition");
    const double defect = hermiticity_defect(m);
    if (defect > kHermitianTolerance) {
        throw NonHermitianInput("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
    }
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NonHermitianInput("eigendecomposition did not converge");
    }

    std::vector<EigenPair> pairs;
    pairs.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        ComplexVector v = solver.eigenvectors().col(k);
        fix_phase(v);
        pairs.push_back({solver.eigenvalues()[k], std::move(v)});
    }

    const double scale = pairs.empty() ? 0.0
        : std::max(std::abs(pairs.front().value), std::abs(pairs.back().value));
    const double tie = kDegenerateRelative * std::max(scale, 1.0);
    std::stable_sort(pairs.begin(), pairs.end(), [tie](const EigenPair& a, const EigenPair& b) {
        if (std::abs(a.value - b.value) > tie) return a.value < b.value;
        return lexicographic_less(a.vector, b.vector);
    });
    return pairs;
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
    require_square(m, "hermitian_eigenvalues");
    const double defect = hermiticity_defect(m);
    if (defect > kHermitianTolerance) {
        throw NonHermitianInput("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
    }
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

Complex expectation(const ComplexMatrix& m, const StateVector& psi) {
    if (m.rows() != psi.dim() || m.cols() != psi.dim()) {
        throw DimensionMismatch("expectation: operator and state dimensions differ");
    }
    return psi.amplitudes().dot(m * psi.amplitudes());
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("trace_distance: operand dimensions differ");
    }
    return 0.5 * hermitian_eigenvalues(a - b).cwiseAbs().sum();
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a * b + b * a;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a * b - b * a;
}

double overlap_probability(const ComplexVector& a, const ComplexVector& b) {
    return std::norm(a.dot(b));
}

}  // namespace qjump

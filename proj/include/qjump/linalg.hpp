#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qjump {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Largest entry of |M - M^dagger|.
double hermiticity_defect(const ComplexMatrix& m);

/// Normalized state vector. The norm invariant is established on construction
/// and preserved because the amplitudes are only reachable read-only.
class StateVector {
public:
    /// Normalizes `amplitudes`; throws InvalidState if the norm is <= 1e-12
    /// or an entry is not finite.
    explicit StateVector(ComplexVector amplitudes);

    static StateVector basis(Eigen::Index dim, Eigen::Index n);

    Eigen::Index dim() const { return amplitudes_.size(); }
    const ComplexVector& amplitudes() const { return amplitudes_; }
    Complex operator[](Eigen::Index i) const { return amplitudes_[i]; }

    /// psi psi^dagger
    ComplexMatrix projector() const;

private:
    ComplexVector amplitudes_;
};

struct EigenPair {
    double value;
    ComplexVector vector;
};

/// Eigenpairs of a Hermitian matrix, sorted by ascending eigenvalue.
///
/// Each eigenvector has its first nonzero amplitude (modulus > 1e-10) made
/// real and positive, so results are reproducible. Eigenvalues that agree to
/// within 1e-12 (relative to the spectral scale) are ordered by lexicographic
/// comparison of the phase-fixed vectors. Throws NonHermitianInput if
/// max |M - M^dagger| > 1e-10.
std::vector<EigenPair> hermitian_eigendecomposition(const ComplexMatrix& m);

/// Real eigenvalues only, ascending.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m);

/// psi^dagger M psi
Complex expectation(const ComplexMatrix& m, const StateVector& psi);

/// 1/2 sum |eig(a - b)| for Hermitian a, b of equal dimension.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Anticommutator {a, b}.
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);
/// Commutator [a, b].
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// |<a|b>|^2 for normalized vectors.
double overlap_probability(const ComplexVector& a, const ComplexVector& b);

}  // namespace qjump

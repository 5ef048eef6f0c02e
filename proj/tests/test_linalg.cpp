#include <doctest.h>

#include <random>

#include "qjump/errors.hpp"
#include "qjump/linalg.hpp"
#include "support.hpp"

using namespace qjump;
using qjump::testing::cd;

TEST_SUITE("linalg") {

TEST_CASE("state vector normalizes and rejects the null vector") {
    ComplexVector v(2);
    v << 3.0, cd(0.0, 4.0);
    const StateVector s(v);
    CHECK(s.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(s[1] - cd(0.0, 0.8)) < 1e-15);
    CHECK_THROWS_AS(StateVector(ComplexVector::Zero(3)), InvalidState);
    CHECK_THROWS_AS(StateVector::basis(3, 3), InvalidState);
}

TEST_CASE("eigendecomposition of the identity") {
    const auto pairs = hermitian_eigendecomposition(ComplexMatrix::Identity(2, 2));
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].value == doctest::Approx(1.0));
    CHECK(pairs[1].value == doctest::Approx(1.0));
    CHECK(std::abs(pairs[0].vector.dot(pairs[1].vector)) < 1e-12);
}

TEST_CASE("eigendecomposition of a diagonal matrix") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = -3.0;
    m(1, 1) = 5.0;
    const auto pairs = hermitian_eigendecomposition(m);
    CHECK(pairs[0].value == doctest::Approx(-3.0));
    CHECK(pairs[1].value == doctest::Approx(5.0));
    CHECK(std::abs(pairs[0].vector[0] - 1.0) < 1e-14);
    CHECK(std::abs(pairs[1].vector[1] - 1.0) < 1e-14);
}

TEST_CASE("Pauli-x eigenpairs match the closed form") {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    const auto pairs = hermitian_eigendecomposition(m);
    CHECK(pairs[0].value == doctest::Approx(-1.0));
    CHECK(pairs[1].value == doctest::Approx(1.0));
    // phase fixed: first amplitude real positive
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(pairs[0].vector[0] - r) < 1e-14);
    CHECK(std::abs(pairs[0].vector[1] + r) < 1e-14);
    CHECK(std::abs(pairs[1].vector[0] - r) < 1e-14);
    CHECK(std::abs(pairs[1].vector[1] - r) < 1e-14);
}

TEST_CASE("non-Hermitian input is rejected") {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(hermitian_eigendecomposition(m), NonHermitianInput);
    CHECK_THROWS_AS(hermitian_eigendecomposition(ComplexMatrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("random Hermitian round trip up to dim 64") {
    std::mt19937_64 rng(11);
    for (Eigen::Index n : {1, 2, 5, 17, 32, 64}) {
        const ComplexMatrix m = testing::random_hermitian(n, rng);
        const auto pairs = hermitian_eigendecomposition(m);
        ComplexMatrix rebuilt = ComplexMatrix::Zero(n, n);
        ComplexMatrix v(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            rebuilt += pairs[k].value * pairs[k].vector * pairs[k].vector.adjoint();
            v.col(k) = pairs[k].vector;
            if (k > 0) CHECK(pairs[k - 1].value <= pairs[k].value);
            // first amplitude above 1e-10 is real positive
            for (Eigen::Index i = 0; i < n; ++i) {
                if (std::abs(pairs[k].vector[i]) > 1e-10) {
                    CHECK(pairs[k].vector[i].imag() == 0.0);
                    CHECK(pairs[k].vector[i].real() > 0.0);
                    break;
                }
            }
        }
        CHECK((rebuilt - m).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((v.adjoint() * v - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("eigendecomposition is bitwise repeatable") {
    std::mt19937_64 rng(5);
    const ComplexMatrix m = testing::random_hermitian(24, rng);
    const auto a = hermitian_eigendecomposition(m);
    const auto b = hermitian_eigendecomposition(m);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].value == b[k].value);
        CHECK(a[k].vector == b[k].vector);
    }
}

TEST_CASE("expectation values") {
    std::mt19937_64 rng(3);
    const StateVector psi = testing::random_state(4, rng);
    CHECK(std::abs(expectation(ComplexMatrix::Identity(4, 4), psi) - 1.0) < 1e-14);

    ComplexMatrix proj1 = ComplexMatrix::Zero(2, 2);
    proj1(1, 1) = 1.0;
    CHECK(std::abs(expectation(proj1, StateVector::basis(2, 0))) == 0.0);

    ComplexMatrix number = ComplexMatrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) number(k, k) = k;
    CHECK(std::abs(expectation(number, StateVector::basis(4, 2)) - 2.0) < 1e-15);

    const ComplexMatrix h = testing::random_hermitian(4, rng);
    CHECK(std::abs(expectation(h, psi).imag()) <= 1e-12);
    CHECK_THROWS_AS(expectation(ComplexMatrix::Identity(3, 3), psi), DimensionMismatch);
}

TEST_CASE("trace distance examples") {
    std::mt19937_64 rng(9);
    const ComplexMatrix rho = testing::random_density(3, rng);
    CHECK(trace_distance(rho, rho) <= 1e-15);

    const ComplexMatrix e0 = StateVector::basis(2, 0).projector();
    const ComplexMatrix e1 = StateVector::basis(2, 1).projector();
    CHECK(trace_distance(e0, e1) == doctest::Approx(1.0).epsilon(1e-14));

    ComplexMatrix mixed = ComplexMatrix::Identity(2, 2) * 0.5;
    CHECK(trace_distance(e0, mixed) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(trace_distance(e0, ComplexMatrix::Identity(3, 3)), DimensionMismatch);
}

TEST_CASE("trace distance is a metric on random triples") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = testing::random_density(6, rng);
        const auto b = testing::random_density(6, rng);
        const auto c = testing::random_density(6, rng);
        const double ab = trace_distance(a, b);
        CHECK(ab >= 0.0);
        CHECK(std::abs(ab - trace_distance(b, a)) <= 1e-12);
        CHECK(ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-10);
    }
}

}

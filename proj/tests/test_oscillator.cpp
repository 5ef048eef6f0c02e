#include <doctest.h>

#include <random>

#include "qjump/errors.hpp"
#include "qjump/oscillator.hpp"
#include "qjump/unraveling.hpp"
#include "support.hpp"

using namespace qjump;
using namespace qjump::oscillator;
using qjump::testing::cd;

namespace {

OscillatorParams full_params(Eigen::Index n = 20, double hbar = 1.0) {
    OscillatorParams p;
    p.levels = n;
    p.hbar = hbar;
    p.diffusion = OscillatorParams::make_diffusion(0.3, 0.5, 0.1, 0.05);
    return p;
}

StateVector safe_state(Eigen::Index n, std::mt19937_64& rng) {
    return testing::random_state(n, rng, n / 2);
}

}  // namespace

TEST_SUITE("oscillator") {

TEST_CASE("operators match explicit matrix elements") {
    for (double hbar : {1.0, 2.0}) {
        OscillatorParams p;
        p.levels = 7;
        p.mass = 1.5;
        p.omega = 0.8;
        p.hbar = hbar;
        const auto ops = build_operators(p);
        const testing::FockOracle f(7, 1.5, 0.8, hbar);
        CHECK((ops.position - f.x).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((ops.momentum - f.p).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((ops.hamiltonian - f.h0).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("two-level position operator and energy spectrum") {
    OscillatorParams p;
    p.levels = 2;
    const auto ops = build_operators(p);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(ops.position(0, 1) - r) <= 1e-15);
    CHECK(std::abs(ops.position(1, 0) - r) <= 1e-15);
    CHECK(std::abs(ops.position(0, 0)) == 0.0);

    p.levels = 10;
    const auto e = hermitian_eigenvalues(build_operators(p).hamiltonian);
    for (int k = 0; k < 10; ++k) CHECK(e[k] == doctest::Approx(k + 0.5).epsilon(1e-14));
    CHECK_THROWS_AS(build_operators(OscillatorParams{.levels = 1}), InvalidGenerator);
}

TEST_CASE("canonical commutator away from the top level") {
    const auto ops = build_operators(OscillatorParams{.levels = 12});
    const ComplexMatrix c = commutator(ops.position, ops.momentum);
    for (int k = 0; k < 11; ++k) CHECK(std::abs(c(k, k) - cd(0.0, 1.0)) <= 1e-13);
    CHECK(std::abs(c(11, 11) - cd(0.0, -11.0)) <= 1e-12);
}

TEST_CASE("coherent state amplitudes") {
    const auto psi = coherent_state(30, cd(1.0, 0.0));
    double fact = 1.0;
    for (int n = 0; n < 8; ++n) {
        if (n > 0) fact *= n;
        CHECK(std::abs(psi[n] - std::exp(-0.5) / std::sqrt(fact)) <= 1e-12);
    }
    CHECK(truncation_safe(psi));
    CHECK(std::abs(fock_state(5, 3)[3] - 1.0) == 0.0);
}

TEST_CASE("generator reproduces the literal three-term form") {
    std::mt19937_64 rng(61);
    for (double hbar : {1.0, 2.0}) {
        const auto p = full_params(12, hbar);
        const auto g = oscillator_generator(p);
        const testing::FockOracle f(12, 1.0, 1.0, hbar);
        const double lambda = 2.0 / hbar * 0.05;
        CHECK(p.friction() == doctest::Approx(lambda));
        for (int trial = 0; trial < 5; ++trial) {
            // holds on the whole truncated space, not only on safe states
            const auto rho = testing::random_density(12, rng);
            const ComplexMatrix lit = testing::literal_oscillator_generator(f, hbar, lambda, 0.3, 0.5, 0.1, rho);
            CHECK((apply_generator(g, rho) - lit).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((literal_generator(p, rho) - lit).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("ground state under position diffusion") {
    const auto p = OscillatorParams::position_diffusion_default();
    const auto g = oscillator_generator(p);
    const auto psi = fock_state(20, 0);
    CHECK(total_decay_rate(g, psi) == doctest::Approx(0.5).epsilon(1e-13));
    const auto report = jump_channels(g, psi);
    REQUIRE(report.channels.size() == 1);
    CHECK(report.channels[0].rate == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(report.channels[0].target[1]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("first excited state") {
    const auto p = OscillatorParams::position_diffusion_default();
    const auto g = oscillator_generator(p);
    const auto psi = fock_state(20, 1);
    // <1|x^2|1> = 3/2
    CHECK(total_decay_rate(g, psi) == doctest::Approx(1.5).epsilon(1e-13));
    const auto report = jump_channels(g, psi);
    REQUIRE(report.channels.size() == 1);
    const auto& t = report.channels[0].target;
    CHECK(std::norm(t[0]) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(std::norm(t[2]) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("squeezed vacuum with sigma_xx = 1/4") {
    const StateVector psi(testing::squeezed_vacuum(40, 0.5 * std::log(2.0)));
    OscillatorParams p40 = OscillatorParams::position_diffusion_default();
    p40.levels = 40;
    const auto g40 = oscillator_generator(p40);
    const auto ops = build_operators(p40);
    const auto s = sigma(psi, ops.position, ops.momentum);
    CHECK(s(kX, kX).real() == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(total_decay_rate(g40, psi) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("sigma is Hermitian PSD with the commutator in its imaginary part") {
    std::mt19937_64 rng(67);
    for (double hbar : {1.0, 2.0}) {
        const auto p = full_params(20, hbar);
        const auto ops = build_operators(p);
        for (int trial = 0; trial < 5; ++trial) {
            const auto psi = safe_state(20, rng);
            const auto s = sigma(psi, ops.position, ops.momentum);
            CHECK((s - s.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(s).eigenvalues().minCoeff() >= -1e-12);
            CHECK(s(kP, kX).imag() == doctest::Approx(-hbar / 2.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("closed-form W' and channels agree with the generic route") {
    std::mt19937_64 rng(71);
    for (double hbar : {1.0, 2.0}) {
        for (const auto& p : {full_params(20, hbar), OscillatorParams::position_diffusion_default()}) {
            OscillatorParams q = p;
            q.hbar = hbar;
            const auto g = oscillator_generator(q);
            for (int trial = 0; trial < 4; ++trial) {
                const auto psi = safe_state(20, rng);
                const ComplexMatrix wp = modified_rate_operator(g, psi);
                CHECK((wp - closed_form_modified_rate_operator(psi, q)).cwiseAbs().maxCoeff() <= 1e-11);

                const auto generic = jump_channels(g, psi);
                const auto closed = closed_form_channels(psi, q);
                REQUIRE(generic.channels.size() == closed.channels.size());
                CHECK(closed.channels.size() <= 2);
                for (std::size_t k = 0; k < closed.channels.size(); ++k) {
                    CHECK(closed.channels[k].rate == doctest::Approx(generic.channels[k].rate).epsilon(1e-9));
                    CHECK(testing::up_to_phase_overlap(closed.channels[k].target.amplitudes(),
                                                       generic.channels[k].target.amplitudes())
                          == doctest::Approx(1.0).epsilon(1e-9));
                }

                // total rate from the covariance
                const auto ops = build_operators(q);
                const auto s = sigma(psi, ops.position, ops.momentum);
                double resum = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) resum += q.diffusion(a, b).real() * s(a, b).real();
                const double expected = 2.0 / (hbar * hbar) * resum - q.friction();
                CHECK(total_decay_rate(g, psi) == doctest::Approx(expected).epsilon(1e-11));
                CHECK(2.0 / (hbar * hbar) * hasse_defect(psi, q) == doctest::Approx(expected).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("explicit flow and frictional Hamiltonian") {
    std::mt19937_64 rng(73);
    for (double hbar : {1.0, 2.0}) {
        const auto p = full_params(20, hbar);
        const auto g = oscillator_generator(p);
        for (int trial = 0; trial < 4; ++trial) {
            // zero amplitude on the top level makes [x, p] psi = i hbar psi exact
            const auto psi = safe_state(20, rng);
            const ComplexVector generic = frictional_rhs(g, psi);
            CHECK((explicit_frictional_rhs(psi, p) - generic).norm() <= 1e-11);
            const double e0 = expectation(build_operators(p).hamiltonian, psi).real();
            const ComplexMatrix h_fr = frictional_hamiltonian(psi, p) - e0 * ComplexMatrix::Identity(20, 20);
            const ComplexVector via_h = cd(0.0, -1.0 / hbar) * (h_fr * psi.amplitudes());
            CHECK((via_h - generic).norm() <= 1e-11);
        }
    }
}

TEST_CASE("diffusion-only defect is positive") {
    const auto p = OscillatorParams::position_diffusion_default();
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 10; ++trial) CHECK(hasse_defect(safe_state(20, rng), p) > 0.0);
    CHECK(hasse_defect(fock_state(20, 0), p) == doctest::Approx(0.25));
}

TEST_CASE("invalid diffusion is reported by validation, not construction") {
    OscillatorParams p;
    p.diffusion = OscillatorParams::make_diffusion(0.1, 0.1, 0.0, 0.5);
    CHECK_THROWS_AS(oscillator_generator(p), InvalidGenerator);
    const auto report = validate_generator(oscillator_generator_unchecked(p));
    CHECK_FALSE(report.all_passed());
}

}

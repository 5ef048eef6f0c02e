#include <doctest.h>

#include <random>

#include "qjump/ensemble.hpp"
#include "qjump/errors.hpp"
#include "qjump/oscillator.hpp"
#include "support.hpp"

using namespace qjump;
using qjump::testing::cd;

namespace {

GeneratorSpec flip_qubit(double d, double field = 0.0) {
    ComplexMatrix sx(2, 2), sz(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    sz << 1.0, 0.0, 0.0, -1.0;
    ComplexMatrix c(1, 1);
    c(0, 0) = d;
    return GeneratorSpec(1.0, field * sz, {sx}, c);
}

GeneratorSpec random_spec(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    ComplexMatrix g(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) g(i, j) = cd(normal(rng), normal(rng));
    return GeneratorSpec(1.0, testing::random_hermitian(d, rng),
                         {testing::random_hermitian(d, rng), testing::random_hermitian(d, rng)},
                         0.1 * g * g.adjoint());
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("ensemble density of one and two states") {
    const std::vector<StateVector> one{StateVector::basis(3, 1)};
    CHECK((ensemble_density(one).matrix() - one[0].projector()).cwiseAbs().maxCoeff() == 0.0);
    const std::vector<StateVector> two{StateVector::basis(2, 0), StateVector::basis(2, 1)};
    CHECK((ensemble_density(two).matrix() - 0.5 * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff()
          <= 1e-15);
    CHECK_THROWS_AS(ensemble_density(std::span<const StateVector>{}), EmptyEnsemble);
}

TEST_CASE("master integration against the closed-form qubit relaxation") {
    const double d = 0.4;
    const auto g = flip_qubit(d);
    const double dt = 1e-3;
    integrate_master(g, DensityOperator::pure(StateVector::basis(2, 0)), dt, 1000,
                     [&](std::int64_t k, const ComplexMatrix& rho) {
                         const double t = static_cast<double>(k) * dt;
                         // populations relax at 4 d
                         CHECK(rho(0, 0).real() == doctest::Approx(0.5 * (1.0 + std::exp(-4.0 * d * t))).epsilon(1e-10));
                     });
}

TEST_CASE("master step preserves trace over many steps") {
    std::mt19937_64 rng(97);
    const auto g = random_spec(5, rng);
    DensityOperator rho(testing::random_density(5, rng));
    for (int k = 0; k < 10000; ++k) rho = master_step(g, rho, 1e-3);
    CHECK(std::abs(rho.matrix().trace() - 1.0) <= 1e-10);
    CHECK(hermiticity_defect(rho.matrix()) <= 1e-14);
}

TEST_CASE("master step agrees with the one-step mixture to second order") {
    std::mt19937_64 rng(101);
    const auto g = random_spec(6, rng);
    const auto psi = testing::random_state(6, rng);
    const double e1 = single_step_equivalence_test(g, psi, 1e-3);
    const double e2 = single_step_equivalence_test(g, psi, 5e-4);
    CHECK(e1 > 0.0);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));

    // for a linear flow RK4 is the fourth-order Taylor polynomial
    const auto rho = DensityOperator::pure(psi);
    const double eps = 1e-2;
    ComplexMatrix term = rho.matrix();
    ComplexMatrix taylor = term;
    for (int k = 1; k <= 4; ++k) {
        term = eps / k * apply_generator(g, term);
        taylor += term;
    }
    CHECK((master_step(g, rho, eps).matrix() - taylor).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("ensemble against the oracle for the flip qubit") {
    const double d = 0.5;
    const auto g = flip_qubit(d, 0.3);
    ComplexMatrix pz = ComplexMatrix::Zero(2, 2);
    pz(0, 0) = 1.0;
    EnsembleConfig cfg;
    cfg.n_trajectories = 4000;
    cfg.base.dt = 1e-3;
    cfg.base.t_final = 1.0;
    cfg.base.seed = 5;
    cfg.base.observables = {{"p0", pz}};
    cfg.snapshot_times = {0.5, 1.0};
    const auto report = run_ensemble(g, StateVector::basis(2, 0), cfg, 2);
    REQUIRE(report.snapshots.size() == 2);
    for (const auto& s : report.snapshots) {
        const double exact = 0.5 * (1.0 + std::exp(-4.0 * d * s.time));
        CHECK(s.observable_oracle[0] == doctest::Approx(exact).epsilon(1e-9));
        CHECK(std::abs(s.observable_mean[0] - exact) < 5.0 * s.observable_stderr[0]);
        CHECK(s.trace_distance < 0.05);
        CHECK(std::isfinite(s.stat_error));
    }
    CHECK(report.jump_count > 0);
}

TEST_CASE("ensemble is independent of the thread count") {
    std::mt19937_64 rng(103);
    const auto g = random_spec(4, rng);
    const auto psi = testing::random_state(4, rng);
    EnsembleConfig cfg;
    cfg.n_trajectories = 300;
    cfg.base.dt = 1e-2;
    cfg.base.t_final = 1.0;
    cfg.base.seed = 11;
    cfg.base.observables = {{"h", g.hamiltonian}};
    cfg.snapshot_times = {0.3, 1.0};
    const auto a = run_ensemble(g, psi, cfg, 1);
    const auto b = run_ensemble(g, psi, cfg, 5);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(a.snapshots[k].trace_distance == b.snapshots[k].trace_distance);
        CHECK(a.snapshots[k].stat_error == b.snapshots[k].stat_error);
        CHECK(a.snapshots[k].rho_mc == b.snapshots[k].rho_mc);
        CHECK(a.snapshots[k].observable_mean == b.snapshots[k].observable_mean);
    }
    CHECK(a.jump_count == b.jump_count);
}

TEST_CASE("single trajectory ensemble and snapshot validation") {
    const auto g = flip_qubit(0.5);
    EnsembleConfig cfg;
    cfg.n_trajectories = 1;
    cfg.base.dt = 1e-2;
    cfg.base.t_final = 1.0;
    cfg.snapshot_times = {0.5};
    const auto r = run_ensemble(g, StateVector::basis(2, 0), cfg);
    CHECK(std::isnan(r.snapshots[0].stat_error));

    cfg.snapshot_times = {0.5, 0.4};
    CHECK_THROWS_AS(run_ensemble(g, StateVector::basis(2, 0), cfg), InvalidConfig);
    cfg.snapshot_times = {0.505};
    CHECK_THROWS_AS(run_ensemble(g, StateVector::basis(2, 0), cfg), InvalidConfig);
    cfg.snapshot_times = {2.0};
    CHECK_THROWS_AS(run_ensemble(g, StateVector::basis(2, 0), cfg), InvalidConfig);
    cfg.snapshot_times = {0.5};
    cfg.n_trajectories = 0;
    CHECK_THROWS_AS(run_ensemble(g, StateVector::basis(2, 0), cfg), InvalidConfig);
}

}

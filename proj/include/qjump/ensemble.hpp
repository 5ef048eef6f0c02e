#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qjump/generator.hpp"
#include "qjump/trajectory.hpp"

namespace qjump {

/// (1/M) sum_i psi_i psi_i^dagger. Throws EmptyEnsemble for M = 0.
DensityOperator ensemble_density(std::span<const StateVector> states);

/// One RK4 step of rho' = L[rho]. Throws PositivityLost if the result has an
/// eigenvalue below -1e-6.
DensityOperator master_step(const GeneratorSpec& g, const DensityOperator& rho, double dt);

/// RK4 integration on the grid k dt, k = 0..steps; `visit(k, rho)` at each
/// point. Positivity is checked at the visited points only.
void integrate_master(const GeneratorSpec& g, const DensityOperator& rho0, double dt,
                      std::int64_t steps,
                      const std::function<void(std::int64_t, const ComplexMatrix&)>& visit);

/// Max-entry residual between the master-equation step psi psi^dagger + eps L
/// and the jump mixture (1 - eps w) psi(eps) psi(eps)^dagger + eps sum_n w_n
/// phi_n phi_n^dagger. Second order in eps.
double single_step_equivalence_test(const GeneratorSpec& g, const StateVector& psi, double eps);

struct EnsembleConfig {
    std::size_t n_trajectories = 1;
    /// trajectory_index is ignored; trajectories use indices 0..M-1.
    TrajectoryConfig base;
    std::vector<double> snapshot_times;
};

struct SnapshotResult {
    double time = 0.0;
    std::int64_t step = 0;
    double trace_distance = 0.0;
    /// Jackknife standard error of trace_distance over 10 contiguous blocks
    /// (NaN when M < 2).
    double stat_error = 0.0;
    std::vector<double> observable_mean;
    std::vector<double> observable_stderr;
    std::vector<double> observable_oracle;
    ComplexMatrix rho_mc;
    ComplexMatrix rho_oracle;
};

struct ConvergenceReport {
    std::vector<std::string> observable_names;
    std::vector<SnapshotResult> snapshots;
    std::size_t n_trajectories = 0;
    std::int64_t jump_count = 0;
    std::int64_t rate_warnings = 0;
};

/// Monte Carlo estimate of rho at the snapshot times against the RK4 master
/// oracle on the same grid. Results do not depend on `threads` (0 = hardware
/// concurrency).
ConvergenceReport run_ensemble(const GeneratorSpec& g, const StateVector& psi0,
                               const EnsembleConfig& cfg, unsigned threads = 1);

}  // namespace qjump

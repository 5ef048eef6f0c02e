#include "qjump/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "qjump/errors.hpp"
#include "qjump/unraveling.hpp"

namespace qjump {

namespace {

constexpr std::size_t kJackknifeGroups = 10;
constexpr std::size_t kBlockSize = 64;

ComplexMatrix rk4_master(const GeneratorSpec& g, const ComplexMatrix& rho, double dt) {
    const ComplexMatrix k1 = apply_generator(g, rho);
    const ComplexMatrix k2 = apply_generator(g, rho + (0.5 * dt) * k1);
    const ComplexMatrix k3 = apply_generator(g, rho + (0.5 * dt) * k2);
    const ComplexMatrix k4 = apply_generator(g, rho + dt * k3);
    ComplexMatrix next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return 0.5 * (next + next.adjoint());
}

void check_positivity(const ComplexMatrix& rho) {
    const double min_eig = hermitian_eigenvalues(rho).minCoeff();
    if (min_eig < -1e-6) {
        throw PositivityLost("master step produced eigenvalue " + std::to_string(min_eig));
    }
}

struct SnapshotAccumulator {
    ComplexMatrix rho_sum;
    std::vector<double> obs_sum;
    std::vector<double> obs_sq_sum;
};

struct BlockResult {
    std::size_t group = 0;
    std::size_t first = 0;
    std::size_t last = 0;
    std::vector<SnapshotAccumulator> snapshots;
    std::int64_t jumps = 0;
    std::int64_t warnings = 0;
};

std::vector<SnapshotAccumulator> empty_accumulators(std::size_t count, Eigen::Index dim,
                                                    std::size_t n_obs) {
    std::vector<SnapshotAccumulator> acc(count);
    for (auto& a : acc) {
        a.rho_sum = ComplexMatrix::Zero(dim, dim);
        a.obs_sum.assign(n_obs, 0.0);
        a.obs_sq_sum.assign(n_obs, 0.0);
    }
    return acc;
}

void add_into(std::vector<SnapshotAccumulator>& into, const std::vector<SnapshotAccumulator>& from) {
    for (std::size_t s = 0; s < into.size(); ++s) {
        into[s].rho_sum += from[s].rho_sum;
        for (std::size_t j = 0; j < into[s].obs_sum.size(); ++j) {
            into[s].obs_sum[j] += from[s].obs_sum[j];
            into[s].obs_sq_sum[j] += from[s].obs_sq_sum[j];
        }
    }
}

std::vector<std::int64_t> snapshot_steps(const EnsembleConfig& cfg, std::int64_t grid_steps) {
    std::vector<std::int64_t> steps;
    double previous = -std::numeric_limits<double>::infinity();
    for (double t : cfg.snapshot_times) {
        if (!(t > previous)) throw InvalidConfig("snapshot_times must be strictly increasing");
        previous = t;
        const double ratio = t / cfg.base.dt;
        const auto k = static_cast<std::int64_t>(std::llround(ratio));
        if (std::abs(ratio - static_cast<double>(k)) > 1e-9 * std::max(1.0, ratio)) {
            throw InvalidConfig("snapshot time " + std::to_string(t) + " is not a grid point");
        }
        if (k < 0 || k > grid_steps) {
            throw InvalidConfig("snapshot time " + std::to_string(t) + " is outside [0, t_final]");
        }
        steps.push_back(k);
    }
    return steps;
}

}  // namespace

DensityOperator ensemble_density(std::span<const StateVector> states) {
    if (states.empty()) throw EmptyEnsemble("ensemble_density needs at least one state");
    const Eigen::Index d = states.front().dim();
    ComplexMatrix rho = ComplexMatrix::Zero(d, d);
    for (const auto& psi : states) {
        if (psi.dim() != d) throw DimensionMismatch("ensemble states have different dimensions");
        rho.noalias() += psi.amplitudes() * psi.amplitudes().adjoint();
    }
    rho /= static_cast<double>(states.size());
    return DensityOperator(0.5 * (rho + rho.adjoint()));
}

DensityOperator master_step(const GeneratorSpec& g, const DensityOperator& rho, double dt) {
    if (rho.dim() != g.dim) throw DimensionMismatch("master_step: dimension mismatch");
    ComplexMatrix next = rk4_master(g, rho.matrix(), dt);
    check_positivity(next);
    try {
        return DensityOperator(std::move(next));
    } catch (const InvalidState& e) {
        throw PositivityLost(e.what());
    }
}

void integrate_master(const GeneratorSpec& g, const DensityOperator& rho0, double dt,
                      std::int64_t steps,
                      const std::function<void(std::int64_t, const ComplexMatrix&)>& visit) {
    if (rho0.dim() != g.dim) throw DimensionMismatch("integrate_master: dimension mismatch");
    ComplexMatrix rho = rho0.matrix();
    visit(0, rho);
    for (std::int64_t k = 1; k <= steps; ++k) {
        rho = rk4_master(g, rho, dt);
        visit(k, rho);
    }
}

double single_step_equivalence_test(const GeneratorSpec& g, const StateVector& psi, double eps) {
    const ComplexMatrix proj = psi.projector();
    const ComplexMatrix master = proj + eps * apply_generator(g, proj);

    const RateReport report = jump_channels(g, psi);
    const double w = report.total;
    const StateVector flowed = deterministic_step(g, psi, eps);
    ComplexMatrix mixture = (1.0 - eps * w) * flowed.projector();
    for (const auto& ch : report.channels) {
        mixture += (eps * ch.rate) * ch.target.projector();
    }
    return (master - mixture).cwiseAbs().maxCoeff();
}

ConvergenceReport run_ensemble(const GeneratorSpec& g, const StateVector& psi0,
                               const EnsembleConfig& cfg, unsigned threads) {
    if (cfg.n_trajectories < 1) throw InvalidConfig("n_trajectories must be at least 1");
    if (psi0.dim() != g.dim) throw DimensionMismatch("run_ensemble: initial state dimension mismatch");
    for (const auto& obs : cfg.base.observables) {
        if (obs.op.rows() != g.dim || obs.op.cols() != g.dim) {
            throw DimensionMismatch("observable '" + obs.name + "' has wrong dimension");
        }
    }
    const std::int64_t grid_steps = cfg.base.step_count();
    const std::vector<std::int64_t> snaps = snapshot_steps(cfg, grid_steps);
    const std::int64_t horizon = snaps.empty() ? 0 : snaps.back();
    const std::size_t n_obs = cfg.base.observables.size();
    const std::size_t m = cfg.n_trajectories;

    std::vector<int> slot_of_step(static_cast<std::size_t>(horizon + 1), -1);
    for (std::size_t s = 0; s < snaps.size(); ++s) slot_of_step[static_cast<std::size_t>(snaps[s])] = static_cast<int>(s);

    // Work is split into blocks that never straddle a jackknife group, and
    // every reduction below runs in block order, so the result is independent
    // of scheduling.
    const std::size_t groups = std::min(kJackknifeGroups, m);
    std::vector<BlockResult> blocks;
    for (std::size_t gi = 0; gi < groups; ++gi) {
        const std::size_t lo = gi * m / groups;
        const std::size_t hi = (gi + 1) * m / groups;
        for (std::size_t first = lo; first < hi; first += kBlockSize) {
            BlockResult b;
            b.group = gi;
            b.first = first;
            b.last = std::min(hi, first + kBlockSize);
            blocks.push_back(std::move(b));
        }
    }

    const FlowKernel kernel(g);
    auto run_block = [&](BlockResult& block) {
        block.snapshots = empty_accumulators(snaps.size(), g.dim, n_obs);
        for (std::size_t traj = block.first; traj < block.last; ++traj) {
            block.warnings += propagate(
                kernel, psi0, cfg.base.dt, horizon, cfg.base.seed, traj,
                [&](std::int64_t step, const StateVector& psi) {
                    const int slot = slot_of_step[static_cast<std::size_t>(step)];
                    if (slot < 0) return;
                    auto& acc = block.snapshots[static_cast<std::size_t>(slot)];
                    acc.rho_sum.noalias() += psi.amplitudes() * psi.amplitudes().adjoint();
                    for (std::size_t j = 0; j < n_obs; ++j) {
                        const double v = expectation(cfg.base.observables[j].op, psi).real();
                        acc.obs_sum[j] += v;
                        acc.obs_sq_sum[j] += v * v;
                    }
                },
                [&](const JumpEvent&) { ++block.jumps; });
        }
    };

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, blocks.size()));
    if (workers <= 1) {
        for (auto& b : blocks) run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < blocks.size(); i = next++) {
                    try {
                        run_block(blocks[i]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = blocks.size();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<std::vector<SnapshotAccumulator>> group_acc(groups);
    std::vector<std::size_t> group_size(groups, 0);
    for (auto& acc : group_acc) acc = empty_accumulators(snaps.size(), g.dim, n_obs);
    ConvergenceReport report;
    report.n_trajectories = m;
    for (const auto& b : blocks) {
        add_into(group_acc[b.group], b.snapshots);
        group_size[b.group] += b.last - b.first;
        report.jump_count += b.jumps;
        report.rate_warnings += b.warnings;
    }
    auto total = empty_accumulators(snaps.size(), g.dim, n_obs);
    for (const auto& acc : group_acc) add_into(total, acc);

    std::vector<ComplexMatrix> oracle(snaps.size());
    integrate_master(g, DensityOperator::pure(psi0), cfg.base.dt, horizon,
                     [&](std::int64_t step, const ComplexMatrix& rho) {
                         const int slot = slot_of_step[static_cast<std::size_t>(step)];
                         if (slot >= 0) {
                             check_positivity(rho);
                             oracle[static_cast<std::size_t>(slot)] = rho;
                         }
                     });

    for (const auto& obs : cfg.base.observables) report.observable_names.push_back(obs.name);
    const double md = static_cast<double>(m);
    for (std::size_t s = 0; s < snaps.size(); ++s) {
        SnapshotResult r;
        r.step = snaps[s];
        r.time = static_cast<double>(snaps[s]) * cfg.base.dt;
        r.rho_mc = total[s].rho_sum / md;
        r.rho_mc = 0.5 * (r.rho_mc + r.rho_mc.adjoint()).eval();
        r.rho_oracle = oracle[s];
        r.trace_distance = trace_distance(r.rho_mc, r.rho_oracle);

        if (groups >= 2) {
            std::vector<double> loo(groups);
            double mean = 0.0;
            for (std::size_t gi = 0; gi < groups; ++gi) {
                const ComplexMatrix rest = (total[s].rho_sum - group_acc[gi][s].rho_sum)
                                           / static_cast<double>(m - group_size[gi]);
                loo[gi] = trace_distance(0.5 * (rest + rest.adjoint()), r.rho_oracle);
                mean += loo[gi];
            }
            mean /= static_cast<double>(groups);
            double var = 0.0;
            for (double v : loo) var += (v - mean) * (v - mean);
            r.stat_error = std::sqrt(var * static_cast<double>(groups - 1) / static_cast<double>(groups));
        } else {
            r.stat_error = std::numeric_limits<double>::quiet_NaN();
        }

        for (std::size_t j = 0; j < n_obs; ++j) {
            const double mean = total[s].obs_sum[j] / md;
            r.observable_mean.push_back(mean);
            if (m >= 2) {
                const double var = std::max(0.0, (total[s].obs_sq_sum[j] - md * mean * mean) / (md - 1.0));
                r.observable_stderr.push_back(std::sqrt(var / md));
            } else {
                r.observable_stderr.push_back(std::numeric_limits<double>::quiet_NaN());
            }
            r.observable_oracle.push_back((r.rho_oracle * cfg.base.observables[j].op).trace().real());
        }
        report.snapshots.push_back(std::move(r));
    }
    return report;
}

}  // namespace qjump

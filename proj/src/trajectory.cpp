#include "qjump/trajectory.hpp"

#include <cmath>
#include <string>

#include "qjump/errors.hpp"
#include "qjump/rng.hpp"

namespace qjump {

namespace {

constexpr double kNormDriftLimit = 1e-3;

// RK4 with reusable buffers. `k1` must already hold the flow at psi.
class Stepper {
public:
    explicit Stepper(const FlowKernel& kernel) : kernel_(kernel) {}

    /// Flow at psi into k1; returns the total decay rate of psi.
    double begin(const StateVector& psi) { return kernel_.evaluate(psi.amplitudes(), k1_, ws_); }

    StateVector finish(const StateVector& psi, double dt) {
        const ComplexVector& y = psi.amplitudes();
        stage_ = y + (0.5 * dt) * k1_;
        kernel_.evaluate(stage_, k2_, ws_);
        stage_ = y + (0.5 * dt) * k2_;
        kernel_.evaluate(stage_, k3_, ws_);
        stage_ = y + dt * k3_;
        kernel_.evaluate(stage_, k4_, ws_);
        ComplexVector next = y + (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
        const double drift = std::abs(next.norm() - 1.0);
        if (!(drift <= kNormDriftLimit)) {
            throw StepTooLarge("norm drifted by " + std::to_string(drift) + " in one step of dt = "
                               + std::to_string(dt));
        }
        return StateVector(std::move(next));
    }

private:
    const FlowKernel& kernel_;
    FlowKernel::Workspace ws_;
    ComplexVector k1_, k2_, k3_, k4_, stage_;
};

void check_rate(double w, double dt, JumpDiagnostics* diagnostics) {
    const double p = w * dt;
    if (p > kRateErrorThreshold) {
        throw StepTooLarge("jump probability per step w*dt = " + std::to_string(p)
                           + " exceeds 0.5; reduce dt");
    }
    if (diagnostics != nullptr) {
        diagnostics->rate = w;
        diagnostics->probability = p;
        diagnostics->warned = p > kRateWarnThreshold;
    }
}

std::optional<Jump> select_channel(const GeneratorSpec& g, const StateVector& psi, double w,
                                   double u2) {
    RateReport report = jump_channels(g, psi);
    if (report.channels.empty()) {
        if (w > 1e-9) {
            throw EmptyChannels("jump fired at rate " + std::to_string(w)
                                + " but W' has no admissible channel");
        }
        return std::nullopt;
    }
    const double sum = report.channel_sum();
    const double target = u2 * sum;
    std::size_t chosen = report.channels.size() - 1;
    double cumulative = 0.0;
    for (std::size_t n = 0; n < report.channels.size(); ++n) {
        cumulative += report.channels[n].rate;
        if (target < cumulative) {
            chosen = n;
            break;
        }
    }
    JumpEvent event;
    event.channel_rate = report.channels[chosen].rate;
    event.pre_state_norm_check = psi.amplitudes().norm();
    event.target_index = static_cast<int>(chosen);
    return Jump{std::move(report.channels[chosen].target), event};
}

}  // namespace

std::int64_t TrajectoryConfig::step_count() const {
    if (!(dt > 0.0) || !(t_final > 0.0)) throw InvalidConfig("dt and t_final must be positive");
    if (dt > t_final) throw InvalidConfig("dt must not exceed t_final");
    const double ratio = t_final / dt;
    const auto n = static_cast<std::int64_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
        throw InvalidConfig("t_final is not an integer multiple of dt");
    }
    return n;
}

StateVector deterministic_step(const GeneratorSpec& g, const StateVector& psi, double dt) {
    if (psi.dim() != g.dim) throw DimensionMismatch("deterministic_step: dimension mismatch");
    const FlowKernel kernel(g);
    Stepper stepper(kernel);
    stepper.begin(psi);
    return stepper.finish(psi, dt);
}

std::optional<Jump> maybe_jump(const GeneratorSpec& g, const StateVector& psi, double dt,
                               double u1, double u2, JumpDiagnostics* diagnostics) {
    const double w = total_decay_rate(g, psi);
    check_rate(w, dt, diagnostics);
    if (u1 >= w * dt) return std::nullopt;
    return select_channel(g, psi, w, u2);
}

int propagate(const FlowKernel& kernel, const StateVector& psi0, double dt, std::int64_t steps,
              std::uint64_t seed, std::uint64_t trajectory_index,
              const std::function<void(std::int64_t, const StateVector&)>& visit,
              const std::function<void(const JumpEvent&)>& on_jump) {
    const GeneratorSpec& g = kernel.generator();
    if (psi0.dim() != g.dim) throw DimensionMismatch("trajectory: initial state dimension mismatch");
    RngStream rng(seed, trajectory_index);
    StateVector psi = psi0;
    int warnings = 0;
    Stepper stepper(kernel);
    visit(0, psi);
    for (std::int64_t step = 1; step <= steps; ++step) {
        double w = stepper.begin(psi);
        if (w < -1e-10) throw NegativeRate("total decay rate " + std::to_string(w) + " is negative");
        if (w < 0.0) w = 0.0;
        JumpDiagnostics diag;
        check_rate(w, dt, &diag);
        if (diag.warned) ++warnings;

        const double u1 = rng.next_uniform();
        std::optional<Jump> jump;
        if (u1 < w * dt) jump = select_channel(g, psi, w, rng.next_uniform());
        if (jump) {
            jump->event.time = static_cast<double>(step) * dt;
            if (on_jump) on_jump(jump->event);
            psi = std::move(jump->state);
        } else {
            psi = stepper.finish(psi, dt);
        }
        visit(step, psi);
    }
    return warnings;
}

TrajectoryRecord run_trajectory(const GeneratorSpec& g, const StateVector& psi0,
                                const TrajectoryConfig& cfg) {
    const std::int64_t steps = cfg.step_count();
    for (const auto& obs : cfg.observables) {
        if (obs.op.rows() != g.dim || obs.op.cols() != g.dim) {
            throw DimensionMismatch("observable '" + obs.name + "' has wrong dimension");
        }
    }
    const FlowKernel kernel(g);
    TrajectoryRecord record;
    record.times.reserve(static_cast<std::size_t>(steps + 1));
    record.observables.reserve(static_cast<std::size_t>(steps + 1));
    record.rate_warnings = propagate(
        kernel, psi0, cfg.dt, steps, cfg.seed, cfg.trajectory_index,
        [&](std::int64_t step, const StateVector& psi) {
            record.times.push_back(static_cast<double>(step) * cfg.dt);
            std::vector<double> row;
            row.reserve(cfg.observables.size());
            for (const auto& obs : cfg.observables) row.push_back(expectation(obs.op, psi).real());
            record.observables.push_back(std::move(row));
            if (step == steps) record.final_state = psi;
        },
        [&](const JumpEvent& e) { record.jumps.push_back(e); });
    return record;
}

}  // namespace qjump

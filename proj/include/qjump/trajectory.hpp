#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qjump/generator.hpp"
#include "qjump/linalg.hpp"
#include "qjump/unraveling.hpp"

namespace qjump {

struct NamedObservable {
    std::string name;
    ComplexMatrix op;
};

struct TrajectoryConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t trajectory_index = 0;
    std::vector<NamedObservable> observables;

    /// Grid size t_final / dt; throws InvalidConfig unless it is an integer
    /// to within 1e-9 relative.
    std::int64_t step_count() const;
};

struct JumpEvent {
    double time = 0.0;
    double channel_rate = 0.0;
    double pre_state_norm_check = 0.0;
    int target_index = 0;
};

struct TrajectoryRecord {
    std::vector<double> times;
    /// observables[k][j] = <O_j> at times[k]
    std::vector<std::vector<double>> observables;
    std::vector<JumpEvent> jumps;
    std::optional<StateVector> final_state;
    /// Steps with 0.1 < w dt <= 0.5.
    int rate_warnings = 0;
};

/// w dt above this fails the step; above kRateWarnThreshold it is reported.
inline constexpr double kRateErrorThreshold = 0.5;
inline constexpr double kRateWarnThreshold = 0.1;

/// One RK4 step of the frictional flow followed by renormalization.
/// Throws StepTooLarge if the norm drifted by more than 1e-3 before
/// renormalizing.
StateVector deterministic_step(const GeneratorSpec& g, const StateVector& psi, double dt);

struct Jump {
    StateVector state;
    JumpEvent event;
};

struct JumpDiagnostics {
    double rate = 0.0;
    double probability = 0.0;
    bool warned = false;
};

/// Bernoulli jump test for one step: fires when u1 < w dt, then picks a
/// channel by cumulative scan with u2. The returned event has time 0; the
/// caller stamps it. Throws StepTooLarge when w dt > 0.5 and EmptyChannels
/// when a jump fires but W' offers no channel.
std::optional<Jump> maybe_jump(const GeneratorSpec& g, const StateVector& psi, double dt,
                               double u1, double u2, JumpDiagnostics* diagnostics = nullptr);

TrajectoryRecord run_trajectory(const GeneratorSpec& g, const StateVector& psi0,
                                const TrajectoryConfig& cfg);

/// Raw path access for ensemble accumulation: `visit(step, psi)` is called at
/// step 0 and after every step up to `steps`. Jumps go to `on_jump` if set.
/// Returns the number of rate warnings.
int propagate(const FlowKernel& kernel, const StateVector& psi0, double dt, std::int64_t steps,
              std::uint64_t seed, std::uint64_t trajectory_index,
              const std::function<void(std::int64_t, const StateVector&)>& visit,
              const std::function<void(const JumpEvent&)>& on_jump = {});

}  // namespace qjump

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qjump/config.hpp"

namespace qjump {

struct CommandOptions {
    std::optional<std::filesystem::path> out_dir;
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;
};

/// Applies --out and --seed to a parsed config.
RunConfig with_overrides(RunConfig cfg, const CommandOptions& options);

/// observables_<i>.csv and jumps_<i>.csv for each requested trajectory
/// index (events_<i>.csv too when log_steps is set).
int cmd_trajectory(const RunConfig& cfg, const CommandOptions& options, std::ostream& log);

/// convergence.csv, plus rho_mc_<k>.txt / rho_oracle_<k>.txt when
/// dump_density is set.
int cmd_ensemble(const RunConfig& cfg, const CommandOptions& options, std::ostream& log);

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Invariant suite on the configured model: generator validity, sum rule,
/// W and W' identities, channel reconstruction, norm conservation, the
/// single-step order check and, for the oscillator, closed-form agreement.
std::vector<VerifyCheck> run_verification(const RunConfig& cfg);

/// Prints one PASS/FAIL line per check; returns 1 if any check failed.
int cmd_verify(const RunConfig& cfg, std::ostream& out);

}  // namespace qjump

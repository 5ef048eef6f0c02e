#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qjump/errors.hpp"
#include "qjump/generator.hpp"
#include "qjump/oscillator.hpp"
#include "qjump/trajectory.hpp"

namespace qjump {

struct ConfigIssue {
    int line = 0;  // 0 when the problem is a missing key
    std::string message;
};

/// Carries every problem found, not only the first.
class ConfigError : public InvalidConfig {
public:
    ConfigError(std::string kind, std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

/// Malformed text: bad section header, missing '=', unparsable number.
class ParseError : public ConfigError {
public:
    explicit ParseError(std::vector<ConfigIssue> issues) : ConfigError("parse error", std::move(issues)) {}
};

/// Well-formed text describing an invalid run.
class ValidationError : public ConfigError {
public:
    explicit ValidationError(std::vector<ConfigIssue> issues)
        : ConfigError("validation error", std::move(issues)) {}
};

struct RunConfig {
    std::string model_name;
    std::optional<oscillator::OscillatorParams> oscillator;
    GeneratorSpec generator;

    std::optional<StateVector> initial_state;
    std::string initial_description;
    double initial_top_occupancy = 0.0;

    double dt = 1e-3;
    double t_final = 1.0;
    std::vector<double> snapshot_times;
    std::size_t n_trajectories = 1;
    std::uint64_t seed = 0;
    std::vector<NamedObservable> observables;
    std::vector<std::uint64_t> trajectory_indices{0};
    bool dump_density = false;
    bool log_steps = false;
    std::filesystem::path output_dir = "out";
    std::vector<std::string> warnings;

    TrajectoryConfig trajectory_config(std::uint64_t index) const;
};

struct ParseOptions {
    /// When false, an inconsistent generator (non-Hermitian, non-PSD D) is
    /// stored as given instead of being rejected, so it can be diagnosed.
    bool validate_generator = true;
};

/// Parses the sectioned key = value format documented in README.md.
/// Throws ParseError or ValidationError listing every problem with its line.
RunConfig parse_config(std::string_view text, const ParseOptions& options = {});
RunConfig load_config(const std::filesystem::path& path, const ParseOptions& options = {});

/// Parses "re,im re,im ..." into a row-major n x n matrix.
std::optional<ComplexMatrix> parse_matrix(std::string_view text, Eigen::Index n);

}  // namespace qjump

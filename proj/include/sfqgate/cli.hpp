// cli.hpp: Configuration and subcommands of the sfqgate tool.

#pragma once

#include "sfqgate/encoding.hpp"
#include "sfqgate/io.hpp"
#include "sfqgate/ramp_optimizer.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sfq {

// Bad flags, config fields or sweep lists (exit status 1).
class UsageError : public DomainError {
public:
    using DomainError::DomainError;
};

struct RunConfig {
    CircuitParams circuit;
    double t1_us = 1200.0;
    double t2_us = 800.0;
    GateSpec gate;
    std::optional<int> n_train_max; // default: 31 inductive, 127 capacitive
    std::string sweep_kind = "target";
    std::vector<double> sweep_values;
    std::string out_dir = ".";
    std::string format = "csv";
    std::uint64_t seed = 0;
    int trial_budget = 0;
    int threads = 0; // 0 uses every hardware thread

    void validate() const;
    CoherenceRates rates() const;
    OptimizerSettings settings() const;
    EncodingParams encoding(int clock_multiple) const;
};

// Command-line values that take precedence over the config document.
struct ConfigOverrides {
    std::optional<std::string> coupling;
    std::optional<double> theta_kick;
    std::optional<double> theta_targ;
    std::vector<int> clocks;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::vector<double> values;
};

// Unknown or mistyped fields raise UsageError naming the field.
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::optional<std::string>& path, const ConfigOverrides& overrides);

int cmd_model_info(const RunConfig& config, std::ostream& out);
int cmd_optimize(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, const std::string& which, std::ostream& out);
int cmd_budget(const RunConfig& config, const std::string& schedule_path, std::ostream& out);
int cmd_encode(const RunConfig& config, const std::string& schedule_path, std::ostream& out);

// Parses argv and dispatches; returns the process exit status (0 ok, 1 usage, 2 numerical failure).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sfq

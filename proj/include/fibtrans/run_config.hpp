#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fibtrans/trace_polynomials.hpp"

namespace fibtrans {

enum class DeltaRule { Absolute, LambdaSquared };

struct RunConfig {
    std::string command;
    std::vector<double> lambdas;
    std::vector<double> omegas;
    int omega_samples = 0;
    std::uint64_t seed = 20240101;
    int k_min = 8;
    int k_max = 12;
    double delta = 0.125;
    DeltaRule delta_rule = DeltaRule::LambdaSquared;
    long L = 200;
    std::vector<double> T_values;
    double T_min = 3.0;
    double T_max = 20.0;
    int T_count = 10;
    std::vector<double> p_values;
    std::vector<long> N_values;
    std::vector<long> sites;
    std::vector<double> energies;
    double eta = 0.05;
    double lambda_small = 0.5;
    double epsilon = 0.05;
    long n_max = 2000;
    int zero_count = 10;
    double window_fraction = 0.1;
    Precision precision = Precision::Double;
    // Outside-probability route: "time", "resolvent" or "both".
    std::string route = "time";
    std::string output_dir = "fibtrans-out";
    int jobs = 1;

    bool operator==(const RunConfig&) const = default;

    /// delta itself, or delta * lambda^2 under the lambda-squared rule.
    double delta_for(double lambda) const;
    /// Explicit omegas, else omega_samples uniform draws from the seed, else {0}.
    std::vector<double> omega_list() const;
    /// Explicit T values, else a geometric grid from T_min to T_max.
    std::vector<double> T_grid() const;

    /// Canonical file form; parse_config(to_text()) reproduces the config exactly.
    std::string to_text() const;
};

struct ConfigEntry {
    std::string value;
    std::string origin;  // "file:line" or "--flag"
};

using ConfigEntries = std::map<std::string, std::vector<ConfigEntry>>;

/// Splits "key = value" lines; '#' starts a comment; repeated keys accumulate.
ConfigEntries parse_entries(std::string_view text, std::string_view source);

/// Entries from `over` replace same-key entries from `base`.
ConfigEntries overlay(ConfigEntries base, const ConfigEntries& over);

/// Builds and validates a config. Errors name the offending line or flag.
RunConfig build_config(const ConfigEntries& entries);

RunConfig parse_config(std::string_view text, std::string_view source = "config");

/// All recognised keys.
const std::vector<std::string>& config_keys();

}  // namespace fibtrans

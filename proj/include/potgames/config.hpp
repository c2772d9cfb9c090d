#pragma once

#include <optional>
#include <string>
#include <vector>

namespace potgames {

/// One experiment, fully described: subcommand plus every parameter that
/// affects the run. Serializes to TOML or JSON (chosen by file extension)
/// and parses back losslessly; unknown keys are rejected.
struct ExperimentConfig {
    std::string subcommand;
    std::optional<long> T;
    std::optional<double> horizon;
    std::optional<int> k;
    std::optional<int> kmax;
    std::optional<double> max_step;
    std::optional<double> c;
    std::optional<long> iters;
    std::optional<double> t;
    std::optional<std::string> final_spec;  // key "final"
    std::optional<std::string> potential;
    std::optional<std::string> adversary;
    std::optional<std::string> learner;
    std::optional<std::string> kind;
    std::vector<double> eps;
    std::optional<double> nu;
    std::optional<int> experts;
    std::optional<int> seeds;
    std::optional<std::string> losses;
    std::vector<std::string> probes;
    std::optional<long> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;

    bool operator==(const ExperimentConfig&) const = default;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_toml_text(const std::string& text);

    std::string to_json() const;
    std::string to_toml() const;
    /// Writes TOML or JSON depending on the path extension.
    void save(const std::string& path) const;
};

}  // namespace potgames

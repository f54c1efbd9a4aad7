#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace jmgt {

enum class Scenario {
    roots,
    kernels,
    linear_decay,
    simulate,
    nonlinear_decay,
    norms,
    inequalities,
    scaling_pipeline,
    calibrate,
    compare,
    acceptance
};

const char* scenario_name(Scenario s) noexcept;
/// ConfigError("scenario") for unknown names.
Scenario scenario_from_name(const std::string& name);
const std::vector<Scenario>& all_scenarios();

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;  ///< acceptance: at least one criterion failed
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitInvariant = 4;

enum class OptionType { number, integer, text, flag };

struct OptionInfo {
    std::string key;
    OptionType type = OptionType::number;
    nlohmann::json default_value;
    std::string help;
};

/// Keys accepted by a scenario, sorted by key. Shared keys (model, grid,
/// seed) come first in the help text but share the same table.
std::vector<OptionInfo> scenario_options(Scenario s);

struct ExperimentConfig {
    Scenario scenario = Scenario::roots;
    /// Every accepted key with its resolved, type-checked value.
    nlohmann::json values;
    std::string output_dir;
    int threads = 0;  ///< 0 keeps the runtime default

    double number(const std::string& key) const;
    long long integer(const std::string& key) const;
    std::string text(const std::string& key) const;
    bool flag(const std::string& key) const;
};

/// Parse a JSON config file. ConfigError("config") when unreadable or not an object.
nlohmann::json load_config_file(const std::string& path);

/// Precedence: defaults < config file < JMGT_OUTPUT_DIR / JMGT_THREADS < flags.
/// `file` may carry "scenario", "output" and "threads" besides option keys;
/// unknown keys raise ConfigError naming the key. Flag values are strings and
/// are converted with the option's type.
ExperimentConfig resolve_config(Scenario s, const nlohmann::json& file,
                                const std::map<std::string, std::string>& flags);

struct RunResult {
    int exit_code = kExitOk;
    std::string message;
    nlohmann::json results;
    std::vector<std::string> files;  ///< written files, relative to the output dir
};

/// Runs the scenario and writes its CSV/JSON artifacts, manifest.json
/// (deterministic: config, hash, versions, CSV schemas, results) and
/// run_info.json (wall time, threads). ConfigError propagates; numerical
/// non-convergence is reported through exit_code.
RunResult run_experiment(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

struct FieldDiff {
    std::string path;
    double a = 0.0;
    double b = 0.0;
    double abs_diff = 0.0;
    double rel_diff = 0.0;
    bool within_tolerance = true;
};

struct CompareReport {
    std::string scenario;
    bool config_equal = false;
    std::vector<FieldDiff> diffs;         ///< numeric leaves of "results" that differ
    std::vector<std::string> mismatched;  ///< non-numeric leaves that differ or exist on one side only
    bool within_tolerance() const;
};

/// Field-wise comparison of two manifests (file paths or run directories).
/// ConfigError when the scenarios differ.
CompareReport compare_runs(const std::string& manifest_a, const std::string& manifest_b, double rtol = 1e-9,
                           double atol = 0.0);

nlohmann::json to_json(const CompareReport& r);

}  // namespace jmgt

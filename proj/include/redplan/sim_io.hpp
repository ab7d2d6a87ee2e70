#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "redplan/churn_sim.hpp"

namespace redplan::sim {

using ordered_json = nlohmann::ordered_json;

// Configuration documents use snake_case SimConfig field names with
// unit-suffixed duration keys. Unknown keys are rejected.
SimConfig config_from_json(const ordered_json& doc);
SimConfig load_config(const std::string& path);  // throws std::runtime_error

// `--set key=value` style override; `code.kind`, `code.k`, ... address the
// nested code object. Setting one of object_count / target_utilization
// clears the other. Throws std::invalid_argument on unknown keys or bad
// values.
void apply_override(SimConfig& config, const std::string& key,
                    const std::string& value);

ordered_json config_to_json(const SimConfig& config);
ordered_json summary_to_json(const SimConfig& config, const SimMetrics& metrics);

std::string timeseries_csv(const std::vector<TimePoint>& series);

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

enum class SweepVariable { K, D, A, P, Rho, B, M };

SweepVariable sweep_variable_from_string(const std::string& name);
std::string to_string(SweepVariable v);

struct SweepSpec {
    SweepVariable variable = SweepVariable::D;
    std::vector<double> values;
    SimConfig fixed;       // base parameter record; fixed.seed is the seed base
    int repetitions = 1;   // seeds per point

    void validate() const;  // throws std::invalid_argument
};

SweepSpec sweep_from_json(const ordered_json& doc);
SweepSpec load_sweep(const std::string& path);

struct SweepRow {
    std::string variable;
    double value = 0.0;
    std::uint64_t seed = 0;
    double rho_target = 0.0;
    double rho_hat = 0.0;
    double mean_repair_s = 0.0;
    double p95_repair_s = 0.0;
    long long objects = 0;
    double wasted_frac = 0.0;
    std::string error;  // empty on success
};

// Runs every (value, seed) point, up to `threads` concurrently. Rows come
// back ordered by point index; failed points carry the error text instead of
// aborting the sweep. Point i uses seed fixed.seed + i.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads = 0);

std::string sweep_csv(const std::vector<SweepRow>& rows);

// Shortest round-trip decimal rendering, used by every CSV/JSON writer so
// that identical runs serialize byte-identically.
std::string format_double(double v);

}  // namespace redplan::sim

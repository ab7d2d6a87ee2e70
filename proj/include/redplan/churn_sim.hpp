#pragma once

#include <cstdint>
#include <vector>

#include "redplan/regen_code.hpp"

namespace redplan::sim {

// Code selection for a run. n <= 0 means "derive n from (k, a, p)".
struct CodeSpec {
    CodeKind kind = CodeKind::MSR;
    int n = 0;
    int k = 20;
    int d = 20;
};

struct SimConfig {
    std::uint64_t seed = 1;
    int initial_nodes = 500;
    double mean_lifetime_days = 100.0;
    double availability = 0.75;
    double base_time_hours = 24.0;
    CodeSpec code;
    double retrieve_target = 0.999999;
    double object_size = 120.0 * 1024 * 1024;  // bytes
    long long object_count = 0;                // exactly one of object_count /
    double target_utilization = 0.0;           // target_utilization is set
    double upload_rate = 20.0 * 1024;          // bytes/second
    int max_concurrent_uploads = 1;
    int max_concurrent_downloads = 3;
    double duration_days = 200.0;
    double warmup_days = 30.0;
    double metrics_interval_hours = 24.0;

    // Test hooks, not part of the config document schema.
    bool check_invariants = false;  // per-event capacity/placement checks
    bool immortal_nodes = false;    // no departures or arrivals
    bool always_online = false;     // no off-line sessions

    void validate() const;  // throws std::invalid_argument
};

struct RepairTimeStats {
    double mean_s = 0.0;
    double median_s = 0.0;
    double p95_s = 0.0;
    long long count = 0;
};

struct SimMetrics {
    double measured_utilization = 0.0;  // rho-hat over [warmup, duration]
    RepairTimeStats repair_time_stats;
    double useful_bytes = 0.0;
    double wasted_bytes = 0.0;
    long long failed_restarts = 0;
    long long objects_below_k = 0;  // at end of run
    long long loss_events = 0;      // repair firings that found < k live blocks
    double blocks_per_object_mean = 0.0;
    long long blocks_per_object_min = 0;
    long long blocks_per_object_max = 0;
    double disk_bytes_total = 0.0;
    long long completed_repairs = 0;
    // Churn calibration, measured after warmup.
    double measured_availability = 0.0;
    double measured_mean_lifetime_days = 0.0;
    double mean_population = 0.0;
    // Resolved run parameters.
    long long resolved_objects = 0;
    int resolved_n = 0;
    double theoretical_utilization = 0.0;  // W/omega for the resolved run
};

struct TimePoint {
    double t_days = 0.0;
    double rho_hat = 0.0;  // over the preceding interval
    double mean_repair_s = 0.0;
    double p95_repair_s = 0.0;
    double wasted_frac = 0.0;
    long long nodes_online = 0;
    long long objects_below_k = 0;
};

struct SimResult {
    SimMetrics metrics;
    std::vector<TimePoint> series;
};

// Runs one deterministic simulation. Pure function of the config: identical
// configs (including seed) produce identical results.
SimResult run(const SimConfig& config);

}  // namespace redplan::sim

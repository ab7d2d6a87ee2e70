#pragma once

#include <optional>

#include "redplan/regen_code.hpp"

namespace redplan {

// Population-level parameters feeding the bandwidth formulas. The traffic
// window cancels algebraically and is not a parameter.
struct SystemModel {
    double node_count = 0.0;       // N, average number of live nodes
    double mean_lifetime_s = 0.0;  // E[L]
    double availability = 0.0;     // a
    double object_count = 0.0;     // O
    double object_size = 0.0;      // M, bytes
    double per_node_upload = 0.0;  // omega, bytes/second

    void validate() const;  // throws std::invalid_argument
};

enum class ReportKind { MSR, MBR, Replication, HybridMSR };

struct CostReport {
    double redundancy = 0.0;          // R
    double per_node_bandwidth = 0.0;  // W, bytes/second
    ReportKind kind = ReportKind::MSR;
    int n = 0;
    int k = 0;
    int d = 0;
};

// Stretch factor needed to reach retrieve probability p:
//   MSR: eta/k        MBR: 2d*eta / (k*(2d-k+1))     with eta = eta[k,a,p].
// MSR is d-independent; for MBR d must satisfy k <= d <= eta-1.
double redundancy(CodeKind kind, int k, int d, double a, double p);

// W with the system-scale factor O*M/(N*E[L]) set to one.
double bandwidth_unit(CodeKind kind, int k, int d, double a, double p);

// Minimum sustained upload rate per on-line node so proactive repairs keep
// pace with churn: W = gamma * eta * O / (a * N * E[L]).
double per_node_bandwidth(CodeKind kind, int k, int d, double a, double p,
                          const SystemModel& sys);

// Smallest d in [k, eta-1] for which an MSR code needs no more per-node
// bandwidth than replication at the same (a, p); nullopt when no valid d
// qualifies. The comparison is exact integer arithmetic, non-strict.
std::optional<int> min_repair_degree_msr(int k, double a, double p);

// 1 - R_code / R_replication, against replication at the same p. For MBR the
// communication savings coincide with the storage savings.
double storage_savings(CodeKind kind, int k, int d, double a, double p);

// Per-node bandwidth when every lost block is rebuilt from a whole replica,
// transferring alpha instead of gamma.
double hybrid_repair_bandwidth_unit(CodeKind kind, int k, int d, double a, double p);
double hybrid_repair_bandwidth(CodeKind kind, int k, int d, double a, double p,
                               const SystemModel& sys);

// Whether replicas-at-p_low plus MSR-blocks-at-p beat plain replication at p.
// Both conditions reduce to eta[1,a,p_low]*k + eta[k,a,p] < eta[1,a,p]*k and
// are evaluated in exact integer arithmetic.
bool hybrid_storage_feasible(int k, double a, double p, double p_low);
bool hybrid_bandwidth_feasible(int k, double a, double p, double p_low);

// Supremum p_low keeping the hybrid scheme cheaper than replication: the step
// boundary 1-(1-a)^r* of the largest feasible replica count r*; nullopt when
// even one replica is too many.
std::optional<double> max_p_low(int k, double a, double p);

// Object count O that makes per_node_bandwidth equal rho * upload_rate,
// rounded down. Throws no_solution_error when the formula yields < 1.
long long objects_for_utilization(CodeKind kind, int k, int d, double a, double p,
                                  double rho, double node_count, double mean_lifetime_s,
                                  double object_size, double upload_rate);

}  // namespace redplan

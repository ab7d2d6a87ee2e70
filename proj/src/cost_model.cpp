#include "redplan/cost_model.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "redplan/errors.hpp"
#include "redplan/reliability.hpp"

namespace redplan {

void SystemModel::validate() const {
    if (!(node_count > 0.0)) throw std::invalid_argument("node count must be positive");
    if (!(mean_lifetime_s > 0.0)) throw std::invalid_argument("mean lifetime must be positive");
    if (!(availability > 0.0 && availability <= 1.0))
        throw std::invalid_argument("availability must be in (0,1]");
    if (!(object_count > 0.0)) throw std::invalid_argument("object count must be positive");
    if (!(object_size > 0.0)) throw std::invalid_argument("object size must be positive");
    if (!(per_node_upload > 0.0)) throw std::invalid_argument("upload rate must be positive");
}

namespace {

void check_degrees(CodeKind kind, int k, int d, int eta) {
    if (k < 1) throw std::invalid_argument("retrieve degree k must be >= 1");
    if (d < k) throw infeasible_degree_error("repair degree d must be >= k");
    if (kind == CodeKind::MBR && d > eta - 1)
        throw infeasible_degree_error("repair degree d must be <= n-1 for MBR");
}

}  // namespace

double redundancy(CodeKind kind, int k, int d, double a, double p) {
    const int eta = blocks_required(k, a, p);
    check_degrees(kind, k, d, eta);
    if (kind == CodeKind::MSR) return double(eta) / k;
    return 2.0 * d * eta / (double(k) * (2 * d - k + 1));
}

double bandwidth_unit(CodeKind kind, int k, int d, double a, double p) {
    const int eta = blocks_required(k, a, p);
    check_degrees(kind, k, d, eta);
    if (kind == CodeKind::MSR)
        return double(d) * eta / (a * k * (d - k + 1));
    return 2.0 * d * eta / (a * k * (2 * d - k + 1));
}

double per_node_bandwidth(CodeKind kind, int k, int d, double a, double p,
                          const SystemModel& sys) {
    sys.validate();
    return bandwidth_unit(kind, k, d, a, p) * sys.object_count * sys.object_size /
           (sys.node_count * sys.mean_lifetime_s);
}

std::optional<int> min_repair_degree_msr(int k, double a, double p) {
    if (k <= 1) throw std::invalid_argument("min repair degree search needs k > 1");
    const std::int64_t eta = blocks_required(k, a, p);
    const std::int64_t eta_repl = blocks_required(1, a, p);
    // Replication needs no more bandwidth than the code when
    //   eta[1,a,p] >= d*eta / (k*(d-k+1));  cross-multiplied this is exact.
    for (std::int64_t d = k; d <= eta - 1; ++d)
        if (eta_repl * k * (d - k + 1) >= d * eta) return int(d);
    return std::nullopt;
}

double storage_savings(CodeKind kind, int k, int d, double a, double p) {
    const double repl = blocks_required(1, a, p);
    return 1.0 - redundancy(kind, k, d, a, p) / repl;
}

double hybrid_repair_bandwidth_unit(CodeKind kind, int k, int d, double a, double p) {
    const int eta = blocks_required(k, a, p);
    check_degrees(kind, k, d, eta);
    if (kind == CodeKind::MSR) return double(eta) / (k * a);
    return 2.0 * d * eta / (double(k) * a * (2 * d - k + 1));
}

double hybrid_repair_bandwidth(CodeKind kind, int k, int d, double a, double p,
                               const SystemModel& sys) {
    sys.validate();
    return hybrid_repair_bandwidth_unit(kind, k, d, a, p) * sys.object_count *
           sys.object_size / (sys.node_count * sys.mean_lifetime_s);
}

namespace {

// eta[1,a,p_low]*k + eta[k,a,p] < eta[1,a,p]*k, evaluated exactly. The
// storage condition is this inequality; the bandwidth condition is the same
// inequality with both sides scaled by 1/a.
bool hybrid_feasible_core(int k, double a, double p, double p_low) {
    if (k <= 1) throw std::invalid_argument("hybrid feasibility needs k > 1");
    const std::int64_t replicas = replicas_required(a, p_low);
    const std::int64_t eta = blocks_required(k, a, p);
    const std::int64_t eta_repl = blocks_required(1, a, p);
    return replicas * k + eta < eta_repl * k;
}

}  // namespace

bool hybrid_storage_feasible(int k, double a, double p, double p_low) {
    return hybrid_feasible_core(k, a, p, p_low);
}

bool hybrid_bandwidth_feasible(int k, double a, double p, double p_low) {
    return hybrid_feasible_core(k, a, p, p_low);
}

std::optional<double> max_p_low(int k, double a, double p) {
    if (k <= 1) throw std::invalid_argument("max_p_low needs k > 1");
    const std::int64_t eta = blocks_required(k, a, p);
    const std::int64_t eta_repl = blocks_required(1, a, p);
    // Largest r with r*k + eta < eta_repl*k.
    const std::int64_t q = eta_repl * k - eta;
    if (q <= 0) return std::nullopt;
    std::int64_t r = (q % k == 0) ? q / k - 1 : q / k;
    if (r < 1) return std::nullopt;
    return 1.0 - std::pow(1.0 - a, double(r));
}

long long objects_for_utilization(CodeKind kind, int k, int d, double a, double p,
                                  double rho, double node_count, double mean_lifetime_s,
                                  double object_size, double upload_rate) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must be in (0,1]");
    const double w_unit = bandwidth_unit(kind, k, d, a, p);
    const double objects =
        rho * upload_rate * node_count * mean_lifetime_s / (w_unit * object_size);
    if (objects < 1.0)
        throw no_solution_error("utilization target yields fewer than one object");
    return (long long)std::floor(objects);
}

}  // namespace redplan

#include "redplan/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "redplan/errors.hpp"

namespace redplan {

AvailabilityModel AvailabilityModel::from_availability(double a, double base_time_hours) {
    if (!(a > 0.0 && a <= 1.0))
        throw std::invalid_argument("availability must be in (0,1]");
    if (!(base_time_hours > 0.0))
        throw std::invalid_argument("base time must be positive");
    AvailabilityModel m;
    m.mean_online_hours = base_time_hours * a;
    m.mean_offline_hours = base_time_hours * (1.0 - a);
    m.availability = a;
    return m;
}

void AvailabilityModel::validate() const {
    if (!(mean_online_hours > 0.0))
        throw std::invalid_argument("mean on-line duration must be positive");
    if (mean_offline_hours < 0.0)
        throw std::invalid_argument("mean off-line duration must be non-negative");
    const double derived = mean_online_hours / (mean_online_hours + mean_offline_hours);
    if (std::abs(derived - availability) > 1e-12)
        throw std::invalid_argument("availability inconsistent with session durations");
}

void RetrieveTarget::validate(bool with_p_low) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("retrieve probability must be in (0,1)");
    if (with_p_low) {
        if (!(p_low > 0.0 && p_low < 1.0))
            throw std::invalid_argument("p_low must be in (0,1)");
        if (p_low > p)
            throw std::invalid_argument("p_low must not exceed p");
    }
}

namespace {

// lgamma(i + 1) for i up to kTableSize - 1, built once.
constexpr int kTableSize = 12002;

const double* log_factorials() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kTableSize);
        t[0] = 0.0;
        for (int i = 1; i < kTableSize; ++i) t[i] = t[i - 1] + std::log(double(i));
        return t;
    }();
    return table.data();
}

double lfact(int i) {
    if (i < kTableSize) return log_factorials()[i];
    return std::lgamma(double(i) + 1.0);
}

// P[X < k] = P[X <= k-1]. Terms are summed in increasing i; every term is
// positive so there is no cancellation.
double binomial_lower_tail(int n, int k, double a) {
    if (a <= 0.0) return 1.0;
    if (a >= 1.0) return 0.0;
    const double la = std::log(a);
    const double l1a = std::log1p(-a);
    const double lgn = lfact(n);
    double sum = 0.0;
    for (int i = 0; i < k; ++i)
        sum += std::exp(lgn - lfact(i) - lfact(n - i) + double(i) * la + double(n - i) * l1a);
    return std::min(sum, 1.0);
}

}  // namespace

double retrieve_probability(int n, int k, double a) {
    if (k < 1) throw std::invalid_argument("retrieve degree k must be >= 1");
    if (k > n) throw std::invalid_argument("retrieve degree k must not exceed n");
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("availability must be in [0,1]");
    return std::max(0.0, 1.0 - binomial_lower_tail(n, k, a));
}

int blocks_required(int k, double a, double p, int ceiling) {
    if (k < 1) throw std::invalid_argument("retrieve degree k must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("retrieve probability must be in (0,1)");
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("availability must be in [0,1]");
    if (a == 1.0) return k;
    if (a == 0.0) throw no_solution_error("no block count reaches the target at zero availability");
    for (int n = k; n <= ceiling; ++n)
        if (retrieve_probability(n, k, a) >= p) return n;
    throw no_solution_error("block-count search exceeded ceiling");
}

int replicas_required(double a, double p_low, int ceiling) {
    return blocks_required(1, a, p_low, ceiling);
}

}  // namespace redplan

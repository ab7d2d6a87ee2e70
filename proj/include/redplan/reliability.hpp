#pragma once

#include <limits>

namespace redplan {

// On/off session model of a storage node. Availability is the stationary
// fraction of time a live node spends on-line.
struct AvailabilityModel {
    double mean_online_hours = 0.0;
    double mean_offline_hours = 0.0;
    double availability = 0.0;

    static AvailabilityModel from_availability(double a, double base_time_hours);
    void validate() const;  // throws std::invalid_argument
};

// Target retrieve probabilities. p_low is only meaningful in hybrid contexts
// (probability of finding a whole replica on-line).
struct RetrieveTarget {
    double p = 0.0;
    double p_low = 0.0;

    void validate(bool with_p_low = false) const;
};

inline constexpr int kDefaultBlockCeiling = 10000;

// P[X >= k] for X ~ Binomial(n, a): the probability that at least k of n
// blocks are on-line. Computed through the lower tail with log-factorials so
// it stays accurate for n in the hundreds and probabilities near one.
double retrieve_probability(int n, int k, double a);

// Smallest n >= k with retrieve_probability(n, k, a) >= p. Throws
// no_solution_error when the search passes `ceiling` blocks.
int blocks_required(int k, double a, double p, int ceiling = kDefaultBlockCeiling);

// Replica count for a plain replication scheme: blocks_required with k = 1.
int replicas_required(double a, double p_low, int ceiling = kDefaultBlockCeiling);

}  // namespace redplan

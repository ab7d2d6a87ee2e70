#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "redplan/errors.hpp"
#include "redplan/reliability.hpp"

using namespace redplan;

namespace {

// Exhaustive binomial upper tail computed with plain long-double pmf terms;
// independent of the log-factorial implementation under test.
double naive_retrieve_probability(int n, int k, double a) {
    long double sum = 0.0L;
    for (int i = k; i <= n; ++i) {
        long double c = 1.0L;
        for (int j = 0; j < i; ++j) c = c * (long double)(n - j) / (long double)(j + 1);
        sum += c * std::pow((long double)a, i) * std::pow(1.0L - (long double)a, n - i);
    }
    return double(sum);
}

}  // namespace

TEST_CASE("retrieve probability matches exhaustive pmf summation") {
    for (int n = 1; n <= 25; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (int ai = 1; ai <= 9; ++ai) {
                const double a = ai / 10.0;
                const double expected = naive_retrieve_probability(n, k, a);
                CHECK(std::abs(retrieve_probability(n, k, a) - expected) <= 1e-12);
            }
        }
    }
}

TEST_CASE("retrieve probability edge cases") {
    CHECK(retrieve_probability(10, 1, 1.0) == doctest::Approx(1.0));
    CHECK(retrieve_probability(10, 1, 0.0) == doctest::Approx(0.0));
    CHECK(retrieve_probability(5, 5, 0.5) == doctest::Approx(1.0 / 32.0));
    CHECK(retrieve_probability(1, 1, 0.75) == doctest::Approx(0.75));
    // monotone in n
    for (int n = 20; n < 60; ++n)
        CHECK(retrieve_probability(n + 1, 20, 0.75) >= retrieve_probability(n, 20, 0.75));
}

TEST_CASE("blocks_required hits the quoted six-nines operating point") {
    CHECK(blocks_required(20, 0.75, 0.999999) == 47);
}

TEST_CASE("blocks_required over the reference grid") {
    const double avail[] = {0.5, 0.75, 0.9, 0.92, 0.95, 0.97, 0.99};
    const int expected_k50[] = {159, 95, 71, 69, 64, 61, 57};
    const int expected_k20[] = {81, 47, 34, 32, 29, 27, 25};
    const int expected_k5[] = {36, 20, 13, 12, 11, 10, 8};
    for (int i = 0; i < 7; ++i) {
        CHECK(blocks_required(50, avail[i], 0.999999) == expected_k50[i]);
        CHECK(blocks_required(20, avail[i], 0.999999) == expected_k20[i]);
        CHECK(blocks_required(5, avail[i], 0.999999) == expected_k5[i]);
    }
}

TEST_CASE("blocks_required boundary semantics") {
    // The threshold comparison is inclusive: the first n whose tail meets p.
    const int n = blocks_required(5, 0.6, 0.999);
    CHECK(retrieve_probability(n, 5, 0.6) >= 0.999);
    CHECK(retrieve_probability(n - 1, 5, 0.6) < 0.999);
    // Perfectly available nodes need exactly k blocks.
    CHECK(blocks_required(20, 1.0, 0.999999) == 20);
    // p below the single-block success probability needs only k blocks.
    CHECK(blocks_required(1, 0.9, 0.5) == 1);
}

TEST_CASE("blocks_required failure modes") {
    CHECK_THROWS_AS(blocks_required(1, 0.0, 0.9), no_solution_error);
    CHECK_THROWS_AS(blocks_required(5, 0.01, 0.999999, 200), no_solution_error);
    CHECK_THROWS_AS(blocks_required(0, 0.5, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(blocks_required(5, 1.2, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(blocks_required(5, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("replicas_required reproduces the replication table") {
    struct Row {
        double p_low;
        int r_a50, r_a75, r_a99;
    };
    const Row rows[] = {
        {0.99, 7, 4, 1},
        {0.98, 6, 3, 1},
        {0.95, 5, 3, 1},
    };
    for (const Row& row : rows) {
        CHECK(replicas_required(0.5, row.p_low) == row.r_a50);
        CHECK(replicas_required(0.75, row.p_low) == row.r_a75);
        CHECK(replicas_required(0.99, row.p_low) == row.r_a99);
    }
    // Six-nines replica counts used throughout the cost comparisons.
    CHECK(replicas_required(0.5, 0.999999) == 20);
    CHECK(replicas_required(0.75, 0.999999) == 10);
    CHECK(replicas_required(0.9, 0.999999) == 6);
    CHECK(replicas_required(0.92, 0.999999) == 6);
    CHECK(replicas_required(0.95, 0.999999) == 5);
    CHECK(replicas_required(0.97, 0.999999) == 4);
    CHECK(replicas_required(0.99, 0.999999) == 3);
}

TEST_CASE("availability model from stationary fraction") {
    const auto m = AvailabilityModel::from_availability(0.75, 24.0);
    CHECK(m.mean_online_hours == doctest::Approx(18.0));
    CHECK(m.mean_offline_hours == doctest::Approx(6.0));
    CHECK(m.availability == doctest::Approx(0.75));
    m.validate();
    CHECK_THROWS_AS(AvailabilityModel::from_availability(0.0, 24.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(AvailabilityModel::from_availability(0.75, 0.0),
                    std::invalid_argument);
}

TEST_CASE("retrieve target validation") {
    RetrieveTarget t{0.999999, 0.99};
    t.validate(true);
    CHECK_THROWS_AS((RetrieveTarget{1.5, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RetrieveTarget{0.9, 0.0}.validate(true)), std::invalid_argument);
}

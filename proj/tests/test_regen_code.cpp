#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "redplan/regen_code.hpp"

using namespace redplan;

namespace {
constexpr double kMiB = 1024.0 * 1024.0;
}

TEST_CASE("minimum-storage operating point") {
    const CodeConfig cfg{47, 20, 36, 120.0 * kMiB};
    const CodePoint pt = msr_point(cfg);
    CHECK(pt.alpha == doctest::Approx(6.0 * kMiB));
    CHECK(pt.gamma == doctest::Approx(6.0 * kMiB * 36.0 / 17.0));
    CHECK(pt.beta == doctest::Approx(pt.gamma / 36.0));
    CHECK(stretch_factor(cfg, pt) == doctest::Approx(47.0 / 20.0));
}

TEST_CASE("minimum-bandwidth operating point") {
    const CodeConfig cfg{47, 20, 36, 120.0 * kMiB};
    const CodePoint pt = mbr_point(cfg);
    CHECK(pt.alpha == doctest::Approx(6.0 * kMiB * 72.0 / 53.0));
    CHECK(pt.gamma == doctest::Approx(pt.alpha));
    CHECK(pt.beta == doctest::Approx(pt.alpha / 36.0));
}

TEST_CASE("replication is the k=d=1 special case of MSR") {
    const CodeConfig cfg{4, 1, 1, 100.0};
    const CodePoint pt = msr_point(cfg);
    CHECK(pt.alpha == doctest::Approx(100.0));  // each block is a full copy
    CHECK(pt.gamma == doctest::Approx(100.0));  // repair copies one replica
    CHECK(classify(cfg) == CodeClass::Replication);
}

TEST_CASE("MDS is the k=d>1 special case of MSR") {
    const CodeConfig cfg{10, 5, 5, 100.0};
    const CodePoint pt = msr_point(cfg);
    CHECK(pt.alpha == doctest::Approx(20.0));
    CHECK(pt.gamma == doctest::Approx(100.0));  // whole-object repair traffic
    CHECK(classify(cfg) == CodeClass::MDS);
    CHECK(classify(CodeConfig{47, 20, 36, 1.0}) == CodeClass::General);
}

TEST_CASE("beta never exceeds alpha, for either kind") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> pick_n(2, 201);
    int checked = 0;
    while (checked < 2000) {
        const int n = pick_n(rng);
        std::uniform_int_distribution<int> pick_k(1, n - 1);
        const int k = pick_k(rng);
        std::uniform_int_distribution<int> pick_d(k, n - 1);
        const int d = pick_d(rng);
        const CodeConfig cfg{n, k, d, 1.0};
        const CodePoint msr = msr_point(cfg);
        const CodePoint mbr = mbr_point(cfg);
        CHECK(msr.beta <= msr.alpha * (1 + 1e-12));
        CHECK(mbr.beta <= mbr.alpha * (1 + 1e-12));
        // Defining relations.
        CHECK(msr.gamma == doctest::Approx(msr.beta * d));
        CHECK(mbr.gamma == doctest::Approx(mbr.alpha));
        // MBR stores more per node but moves fewer repair bytes.
        CHECK(mbr.alpha >= msr.alpha * (1 - 1e-12));
        CHECK(mbr.gamma <= msr.gamma * (1 + 1e-12));
        ++checked;
    }
}

TEST_CASE("gamma shrinks as the repair degree grows (MSR)") {
    double prev = 1e300;
    for (int d = 20; d <= 46; ++d) {
        const CodePoint pt = msr_point(CodeConfig{47, 20, d, 1.0});
        CHECK(pt.gamma <= prev);
        prev = pt.gamma;
    }
}

TEST_CASE("configuration validation") {
    CHECK_THROWS_AS((CodeConfig{10, 0, 5, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((CodeConfig{10, 5, 4, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((CodeConfig{10, 5, 10, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((CodeConfig{10, 5, 5, 0.0}.validate()), std::invalid_argument);
    CodeConfig{10, 5, 9, 1.0}.validate();
}

TEST_CASE("names") {
    CHECK(std::string(to_string(CodeKind::MSR)) == "msr");
    CHECK(std::string(to_string(CodeKind::MBR)) == "mbr");
    CHECK(std::string(to_string(CodeClass::MDS)) == "mds");
}

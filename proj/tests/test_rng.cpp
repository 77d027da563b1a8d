#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "usvr/rng.hpp"

using namespace usvr;

TEST_CASE("rng streams are deterministic for a fixed seed") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(42), d(43);
    bool all_equal = true;
    for (int i = 0; i < 10; ++i) all_equal &= c.next_u64() == d.next_u64();
    CHECK_FALSE(all_equal);
}

TEST_CASE("uniform01 stays in [0,1) and covers the range") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("below(n) produces every residue") {
    Rng rng(11);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const std::uint64_t v = rng.below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    for (int c : counts) CHECK(c > 7000 / 7 / 2);
}

TEST_CASE("normal draws match requested moments loosely") {
    Rng rng(13);
    const int n = 50000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(3.0, 2.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(3.0).epsilon(0.02));
    CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("derive_seed separates trials and streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t trial = 0; trial < 50; ++trial)
        for (std::uint64_t stream = 0; stream < 6; ++stream)
            seen.insert(derive_seed(12345, trial, stream));
    CHECK(seen.size() == 50 * 6);
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("mix64 is injective on a sample and changes all words") {
    std::set<std::uint64_t> outs;
    for (std::uint64_t i = 0; i < 1000; ++i) outs.insert(mix64(i));
    CHECK(outs.size() == 1000);
}

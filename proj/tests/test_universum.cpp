#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "usvr/errors.hpp"
#include "usvr/rng.hpp"
#include "usvr/universum.hpp"

using namespace usvr;

namespace {

Dataset toy_train(std::uint64_t seed, int n, int d) {
    Rng rng(seed);
    Dataset ds;
    ds.inputs.resize(n, d);
    ds.targets.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) ds.inputs(i, j) = rng.uniform(-1.0, 1.0);
        ds.targets[i] = rng.uniform(-3.0, 3.0);
    }
    return ds;
}

bool row_in_inputs(const Eigen::MatrixXd& inputs, const Eigen::RowVectorXd& row) {
    for (Eigen::Index i = 0; i < inputs.rows(); ++i)
        if (inputs.row(i) == row) return true;
    return false;
}

std::vector<double> sorted_row(const Eigen::RowVectorXd& row) {
    std::vector<double> v(row.data(), row.data() + row.size());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("target statistics use the population standard deviation") {
    Dataset ds;
    ds.inputs = Eigen::MatrixXd::Zero(4, 1);
    ds.targets.resize(4);
    ds.targets << 1.0, 2.0, 3.0, 4.0;
    const YStats s = compute_y_stats(ds);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.std == doctest::Approx(std::sqrt(1.25)));

    Dataset empty;
    empty.inputs.resize(0, 1);
    empty.targets.resize(0);
    CHECK_THROWS_AS(compute_y_stats(empty), DomainError);
}

TEST_CASE("swap strategy crosses targets over the mean") {
    const Dataset ds = toy_train(17, 20, 3);
    const YStats stats = compute_y_stats(ds);
    const UniversumSet u = strategy1_swap(ds, 15, 99);  // odd size allowed
    REQUIRE(u.m() == 15);
    REQUIRE(u.dim() == 3);

    std::vector<double> pool(ds.targets.data(), ds.targets.data() + ds.n());
    for (Eigen::Index r = 0; r < u.m(); ++r) {
        // Even rows pair an above-mean input with a below-mean target and
        // odd rows the reverse.
        if (r % 2 == 0)
            CHECK(u.targets[r] <= stats.mean);
        else
            CHECK(u.targets[r] >= stats.mean);
        CHECK(row_in_inputs(ds.inputs, u.inputs.row(r)));
        CHECK(std::find(pool.begin(), pool.end(), u.targets[r]) != pool.end());
    }
}

TEST_CASE("resample strategy keeps inputs and redraws targets") {
    const Dataset ds = toy_train(23, 12, 2);
    const UniversumSet u = strategy2_resample_y(ds, 4000, 5);
    REQUIRE(u.m() == 4000);
    for (Eigen::Index r = 0; r < 50; ++r) CHECK(row_in_inputs(ds.inputs, u.inputs.row(r)));

    const YStats stats = compute_y_stats(ds);
    const double mean = u.targets.mean();
    const double sd = std::sqrt((u.targets.array() - mean).square().mean());
    CHECK(std::abs(mean - stats.mean) < 0.1 * stats.std);  // ~6 sigma at m=4000
    CHECK(sd == doctest::Approx(stats.std).epsilon(0.1));
}

TEST_CASE("permute strategy shuffles features within a single row") {
    const Dataset ds = toy_train(31, 10, 5);
    const UniversumSet u = strategy3_permute_x(ds, 40, 7);
    REQUIRE(u.m() == 40);
    for (Eigen::Index r = 0; r < u.m(); ++r) {
        const std::vector<double> features = sorted_row(u.inputs.row(r));
        bool matched = false;
        for (Eigen::Index i = 0; i < ds.n() && !matched; ++i)
            matched = ds.targets[i] == u.targets[r] &&
                      sorted_row(ds.inputs.row(i)) == features;
        CHECK(matched);
    }
}

TEST_CASE("combined strategy permutes features and redraws targets") {
    const Dataset ds = toy_train(41, 8, 4);
    const UniversumSet u = strategy4_both(ds, 30, 11);
    REQUIRE(u.m() == 30);
    std::vector<double> pool(ds.targets.data(), ds.targets.data() + ds.n());
    int fresh_targets = 0;
    for (Eigen::Index r = 0; r < u.m(); ++r) {
        const std::vector<double> features = sorted_row(u.inputs.row(r));
        bool matched = false;
        for (Eigen::Index i = 0; i < ds.n() && !matched; ++i)
            matched = sorted_row(ds.inputs.row(i)) == features;
        CHECK(matched);
        if (std::find(pool.begin(), pool.end(), u.targets[r]) == pool.end()) ++fresh_targets;
    }
    CHECK(fresh_targets == 30);  // Gaussian draws never coincide with the pool
}

TEST_CASE("hypercube universum flips the sign of the block sum") {
    const UniversumSet u = hypercube_universum1(25, 123);
    REQUIRE(u.m() == 25);
    REQUIRE(u.dim() == 30);
    for (Eigen::Index r = 0; r < u.m(); ++r) {
        CHECK(u.inputs.row(r).minCoeff() >= 0.0);
        CHECK(u.inputs.row(r).maxCoeff() < 1.0);
        CHECK(u.targets[r] == -hypercube_target(u.inputs.row(r)));
    }
}

TEST_CASE("generation is deterministic in the seed") {
    const Dataset ds = toy_train(3, 9, 3);
    CHECK(strategy1_swap(ds, 10, 42).inputs == strategy1_swap(ds, 10, 42).inputs);
    CHECK(strategy2_resample_y(ds, 10, 42).targets ==
          strategy2_resample_y(ds, 10, 42).targets);
    CHECK(strategy3_permute_x(ds, 10, 42).inputs == strategy3_permute_x(ds, 10, 42).inputs);
    CHECK(strategy4_both(ds, 10, 42).targets == strategy4_both(ds, 10, 42).targets);
    CHECK(hypercube_universum1(10, 42).inputs == hypercube_universum1(10, 42).inputs);
    CHECK(strategy2_resample_y(ds, 10, 42).targets !=
          strategy2_resample_y(ds, 10, 43).targets);
}

TEST_CASE("larger draws extend smaller ones row for row") {
    // Size sweeps rely on nesting: the first m rows of a larger set drawn
    // with the same seed are exactly the smaller set.
    const Dataset ds = toy_train(13, 11, 4);
    const int small = 20, large = 64;

    const auto check_prefix = [&](const UniversumSet& big, const UniversumSet& little) {
        REQUIRE(little.m() == small);
        CHECK(big.inputs.topRows(small) == little.inputs);
        CHECK(big.targets.head(small) == little.targets);
    };
    check_prefix(strategy1_swap(ds, large, 9), strategy1_swap(ds, small, 9));
    check_prefix(strategy2_resample_y(ds, large, 9), strategy2_resample_y(ds, small, 9));
    check_prefix(strategy3_permute_x(ds, large, 9), strategy3_permute_x(ds, small, 9));
    check_prefix(strategy4_both(ds, large, 9), strategy4_both(ds, small, 9));
    check_prefix(hypercube_universum1(large, 9), hypercube_universum1(small, 9));
}

TEST_CASE("argument validation") {
    const Dataset ds = toy_train(1, 4, 2);
    CHECK_THROWS_AS(strategy1_swap(ds, -1, 0), DomainError);
    CHECK_THROWS_AS(hypercube_universum1(-2, 0), DomainError);
    Dataset empty;
    empty.inputs.resize(0, 2);
    empty.targets.resize(0);
    CHECK_THROWS_AS(strategy3_permute_x(empty, 5, 0), DomainError);
    CHECK(strategy2_resample_y(ds, 0, 0).m() == 0);
}

#include "usvr/universum.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "usvr/errors.hpp"
#include "usvr/rng.hpp"

namespace usvr {

namespace {

void check_args(const Dataset& train, int m) {
    if (train.n() < 1) throw DomainError("universum generation needs a non-empty training set");
    if (m < 0) throw DomainError("universum size must be non-negative");
}

}  // namespace

YStats compute_y_stats(const Dataset& train) {
    if (train.n() < 1) throw DomainError("y stats need at least one sample");
    YStats s;
    s.mean = train.targets.mean();
    s.std = std::sqrt((train.targets.array() - s.mean).square().sum() / double(train.n()));
    return s;
}

UniversumSet strategy1_swap(const Dataset& train, int m, std::uint64_t seed) {
    check_args(train, m);
    const YStats stats = compute_y_stats(train);
    std::vector<int> upper, lower;
    for (Eigen::Index i = 0; i < train.n(); ++i) {
        if (train.targets[i] >= stats.mean) upper.push_back(static_cast<int>(i));
        if (train.targets[i] <= stats.mean) lower.push_back(static_cast<int>(i));
    }
    Rng rng(seed);
    UniversumSet u;
    u.inputs.resize(m, train.dim());
    u.targets.resize(m);
    Eigen::Index row = 0;
    while (row < m) {
        const int hi = upper[static_cast<size_t>(rng.below(upper.size()))];
        const int lo = lower[static_cast<size_t>(rng.below(lower.size()))];
        u.inputs.row(row) = train.inputs.row(hi);
        u.targets[row] = train.targets[lo];
        ++row;
        if (row < m) {
            u.inputs.row(row) = train.inputs.row(lo);
            u.targets[row] = train.targets[hi];
            ++row;
        }
    }
    return u;
}

UniversumSet strategy2_resample_y(const Dataset& train, int m, std::uint64_t seed) {
    check_args(train, m);
    const YStats stats = compute_y_stats(train);
    Rng rng(seed);
    UniversumSet u;
    u.inputs.resize(m, train.dim());
    u.targets.resize(m);
    for (Eigen::Index row = 0; row < m; ++row) {
        const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(train.n())));
        u.inputs.row(row) = train.inputs.row(i);
        u.targets[row] = rng.normal(stats.mean, stats.std);
    }
    return u;
}

UniversumSet strategy3_permute_x(const Dataset& train, int m, std::uint64_t seed) {
    check_args(train, m);
    Rng rng(seed);
    UniversumSet u;
    u.inputs.resize(m, train.dim());
    u.targets.resize(m);
    std::vector<int> perm(static_cast<size_t>(train.dim()));
    for (Eigen::Index row = 0; row < m; ++row) {
        const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(train.n())));
        std::iota(perm.begin(), perm.end(), 0);
        for (size_t k = perm.size(); k > 1; --k)
            std::swap(perm[k - 1], perm[static_cast<size_t>(rng.below(k))]);
        for (Eigen::Index j = 0; j < train.dim(); ++j)
            u.inputs(row, j) = train.inputs(i, perm[static_cast<size_t>(j)]);
        u.targets[row] = train.targets[i];
    }
    return u;
}

UniversumSet strategy4_both(const Dataset& train, int m, std::uint64_t seed) {
    check_args(train, m);
    const YStats stats = compute_y_stats(train);
    Rng rng(seed);
    UniversumSet u;
    u.inputs.resize(m, train.dim());
    u.targets.resize(m);
    std::vector<int> perm(static_cast<size_t>(train.dim()));
    for (Eigen::Index row = 0; row < m; ++row) {
        const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(train.n())));
        std::iota(perm.begin(), perm.end(), 0);
        for (size_t k = perm.size(); k > 1; --k)
            std::swap(perm[k - 1], perm[static_cast<size_t>(rng.below(k))]);
        for (Eigen::Index j = 0; j < train.dim(); ++j)
            u.inputs(row, j) = train.inputs(i, perm[static_cast<size_t>(j)]);
        u.targets[row] = rng.normal(stats.mean, stats.std);
    }
    return u;
}

UniversumSet hypercube_universum1(int m, std::uint64_t seed) {
    if (m < 0) throw DomainError("universum size must be non-negative");
    Rng rng(seed);
    UniversumSet u;
    u.inputs.resize(m, HypercubeConfig::dim);
    u.targets.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (int j = 0; j < HypercubeConfig::dim; ++j) u.inputs(i, j) = rng.uniform01();
        u.targets[i] = -hypercube_target(u.inputs.row(i));
    }
    return u;
}

}  // namespace usvr

#pragma once

// Shared generators for randomized solver and reduction tests.

#include <memory>

#include <Eigen/Core>

#include "usvr/dataset.hpp"
#include "usvr/kernel.hpp"
#include "usvr/qp.hpp"
#include "usvr/rng.hpp"
#include "usvr/usvr.hpp"

namespace testsup {

/// Random dual problem with n training rows and m universum rows over a
/// random linear or RBF kernel, random box parameters and random flags.
inline usvr::QpProblem random_problem(std::uint64_t seed) {
    usvr::Rng rng(seed);
    const int n = 2 + static_cast<int>(rng.below(5));   // 2..6
    const int m = static_cast<int>(rng.below(4));       // 0..3
    const int d = 1 + static_cast<int>(rng.below(3));   // 1..3
    const int N = n + m;

    Eigen::MatrixXd X(N, d);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
    const usvr::KernelSpec kernel = rng.below(2) == 0
                                        ? usvr::KernelSpec::linear()
                                        : usvr::KernelSpec::rbf(rng.uniform(0.3, 2.0));

    usvr::QpProblem p;
    p.gram = std::make_shared<const Eigen::MatrixXd>(usvr::gram(kernel, X, X));
    p.n_train = n;
    p.y.resize(N);
    p.rho.resize(N);
    p.cost.resize(N);
    p.shift_alpha = Eigen::VectorXd::Zero(N);
    p.shift_beta = Eigen::VectorXd::Zero(N);

    const double c = rng.uniform(0.5, 5.0);
    const double cstar = rng.uniform(0.0, 3.0);
    const double eps = rng.uniform(0.0, 1.0);
    const double delta = rng.uniform(0.0, 1.5);
    for (int i = 0; i < N; ++i) {
        p.y[i] = rng.uniform(-2.0, 2.0);
        if (i < n) {
            p.rho[i] = eps;
            p.cost[i] = c;
        } else {
            p.rho[i] = -delta;
            p.cost[i] = cstar;
            switch (rng.below(3)) {
                case 0: p.shift_alpha[i] = cstar; break;
                case 1: p.shift_beta[i] = cstar; break;
                default: break;
            }
        }
    }
    return p;
}

/// Random small regression dataset plus universum for reduction tests.
struct RandomFitCase {
    usvr::Dataset train;
    usvr::UniversumSet universum;
    usvr::SvrHyperParams params;
};

inline RandomFitCase random_fit_case(std::uint64_t seed) {
    usvr::Rng rng(seed);
    RandomFitCase fc;
    const int n = 6 + static_cast<int>(rng.below(10));
    const int m = 2 + static_cast<int>(rng.below(6));
    const int d = 1 + static_cast<int>(rng.below(4));
    fc.train.inputs.resize(n, d);
    fc.train.targets.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) fc.train.inputs(i, j) = rng.uniform(-1.0, 1.0);
        fc.train.targets[i] = rng.uniform(-2.0, 2.0);
    }
    fc.universum.inputs.resize(m, d);
    fc.universum.targets.resize(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) fc.universum.inputs(i, j) = rng.uniform(-1.0, 1.0);
        fc.universum.targets[i] = rng.uniform(-2.0, 2.0);
    }
    fc.params.c = rng.uniform(0.5, 4.0);
    fc.params.epsilon = rng.uniform(0.0, 0.5);
    fc.params.kernel = rng.below(2) == 0 ? usvr::KernelSpec::linear()
                                         : usvr::KernelSpec::rbf(rng.uniform(0.3, 2.0));
    return fc;
}

}  // namespace testsup

#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "usvr/errors.hpp"
#include "usvr/rng.hpp"
#include "usvr/svr.hpp"

using namespace usvr;

namespace {

Dataset random_dataset(std::uint64_t seed, int n, int d) {
    Rng rng(seed);
    Dataset ds;
    ds.inputs.resize(n, d);
    ds.targets.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) ds.inputs(i, j) = rng.uniform(-1.0, 1.0);
        ds.targets[i] = rng.uniform(-2.0, 2.0);
    }
    return ds;
}

}  // namespace

TEST_CASE("epsilon_loss is the shifted absolute value") {
    CHECK(epsilon_loss(0.5, 1.0) == 0.0);
    CHECK(epsilon_loss(1.5, 1.0) == doctest::Approx(0.5));
    CHECK(epsilon_loss(-2.0, 0.5) == doctest::Approx(1.5));
    CHECK(epsilon_loss(0.0, 0.0) == 0.0);
    CHECK(epsilon_loss(-0.25, 0.0) == doctest::Approx(0.25));
}

TEST_CASE("zero-epsilon fit with a loose box interpolates the data") {
    const Dataset ds = random_dataset(314, 8, 2);
    SvrHyperParams params;
    params.c = 1e3;
    params.epsilon = 0.0;
    params.kernel = KernelSpec::rbf(0.7);

    const auto [model, diag] = fit_svr(ds, params, 1e-6);
    const Eigen::VectorXd f = model.predict(ds.inputs);
    CHECK((f - ds.targets).lpNorm<Eigen::Infinity>() <= 1e-3);
    CHECK(model.info.converged);
    CHECK(model.info.outer_iterations == 0);
    CHECK(model.info.c == params.c);
    CHECK(model.info.epsilon == params.epsilon);

    // Slack bookkeeping matches the epsilon-insensitive loss pointwise.
    REQUIRE(diag.training_slacks.size() == ds.n());
    double total = 0.0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        const double loss = epsilon_loss(ds.targets[i] - f[i], params.epsilon);
        CHECK(diag.training_slacks[i] == doctest::Approx(loss).epsilon(1e-9));
        total += diag.training_slacks[i];
    }
    CHECK(diag.empirical_risk == doctest::Approx(total));
    CHECK(diag.universum_zeta.size() == 0);
    CHECK(diag.universum_zeta_star.size() == 0);
}

TEST_CASE("constant targets collapse to a bias-only model") {
    Dataset ds = random_dataset(99, 6, 3);
    ds.targets.setConstant(2.5);
    SvrHyperParams params;
    params.c = 10.0;
    params.epsilon = 0.0;
    params.kernel = KernelSpec::linear();

    const auto [model, diag] = fit_svr(ds, params, 1e-8);
    CHECK(model.support_inputs.rows() == 0);
    CHECK(model.bias == doctest::Approx(2.5));
    const Eigen::MatrixXd probe = random_dataset(7, 4, 3).inputs;
    const Eigen::VectorXd f = model.predict(probe);
    for (Eigen::Index i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(2.5));
    CHECK(diag.empirical_risk == doctest::Approx(0.0));
}

TEST_CASE("epsilon wider than the target spread leaves no support vectors") {
    const Dataset ds = random_dataset(5, 10, 2);
    SvrHyperParams params;
    params.c = 5.0;
    params.epsilon = 10.0;  // targets live in [-2, 2]
    params.kernel = KernelSpec::rbf(1.0);

    const auto [model, diag] = fit_svr(ds, params, 1e-8);
    CHECK(model.support_inputs.rows() == 0);
    CHECK(model.coefficients.size() == 0);
    CHECK(model.bias >= ds.targets.maxCoeff() - params.epsilon);
    CHECK(model.bias <= ds.targets.minCoeff() + params.epsilon);
    CHECK(diag.empirical_risk == doctest::Approx(0.0));
}

TEST_CASE("support pruning drops only negligible coefficients") {
    const Dataset ds = random_dataset(21, 12, 2);
    SvrHyperParams params;
    params.c = 2.0;
    params.epsilon = 0.3;
    params.kernel = KernelSpec::rbf(0.5);

    const auto [model, diag] = fit_svr(ds, params, 1e-6);
    CHECK(model.support_inputs.rows() == model.coefficients.size());
    CHECK(model.support_inputs.rows() <= ds.n());
    for (Eigen::Index i = 0; i < model.coefficients.size(); ++i)
        CHECK(std::abs(model.coefficients[i]) > 1e-12);
    // At epsilon 0.3 some rows must sit strictly inside the tube.
    CHECK(model.support_inputs.rows() < ds.n());
    CHECK(model.support_inputs.rows() > 0);
}

TEST_CASE("predict_one agrees with batch predict") {
    const Dataset ds = random_dataset(11, 9, 3);
    SvrHyperParams params;
    params.c = 3.0;
    params.epsilon = 0.1;
    params.kernel = KernelSpec::poly(2);

    const auto [model, diag] = fit_svr(ds, params, 1e-6);
    const Eigen::VectorXd batch = model.predict(ds.inputs);
    for (Eigen::Index i = 0; i < ds.n(); ++i)
        CHECK(model.predict_one(ds.inputs.row(i)) == batch[i]);
    const Eigen::VectorXd free_fn = predict(model, ds.inputs);
    CHECK((free_fn - batch).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("JSON round trip preserves predictions bit for bit") {
    const Dataset ds = random_dataset(8, 10, 4);
    SvrHyperParams params;
    params.c = 1.7;
    params.epsilon = 0.05;
    params.kernel = KernelSpec::rbf(0.9);

    auto [model, diag] = fit_svr(ds, params, 1e-6);
    SUBCASE("without scaling") {}
    SUBCASE("with scaling attached") {
        ScalingParams sc;
        sc.feature_min = ds.inputs.colwise().minCoeff();
        sc.feature_max = ds.inputs.colwise().maxCoeff();
        sc.low = -1.0;
        sc.high = 1.0;
        model.scaling = sc;
    }

    const Model back = Model::from_json(model.to_json());
    const Eigen::MatrixXd probe = random_dataset(12, 20, 4).inputs;
    const Eigen::VectorXd a = model.predict(probe);
    const Eigen::VectorXd b = back.predict(probe);
    for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    CHECK(back.info.c == model.info.c);
    CHECK(back.info.solver_iterations == model.info.solver_iterations);
    CHECK(back.scaling.has_value() == model.scaling.has_value());
}

TEST_CASE("dimension mismatches are rejected at predict time") {
    const Dataset ds = random_dataset(2, 6, 3);
    SvrHyperParams params;
    params.kernel = KernelSpec::linear();
    const auto [model, diag] = fit_svr(ds, params, 1e-5);
    Eigen::MatrixXd wrong(2, 5);
    wrong.setZero();
    CHECK_THROWS_AS(model.predict(wrong), DimensionError);
}

#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "usvr/errors.hpp"
#include "usvr/kernel.hpp"
#include "usvr/rng.hpp"

using namespace usvr;

namespace {

Eigen::MatrixXd random_points(int n, int d, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
    return X;
}

}  // namespace

TEST_CASE("kernel point evaluations match closed forms") {
    Eigen::VectorXd x(3), z(3);
    x << 1, 2, 3;
    z << -1, 0, 2;
    const double dot = 5.0;
    CHECK(kernel_eval(KernelSpec::linear(), x, z) == dot);
    CHECK(kernel_eval(KernelSpec::poly(1), x, z) == dot + 1.0);
    CHECK(kernel_eval(KernelSpec::poly(3), x, z) == doctest::Approx(216.0));
    const double sq = (x - z).squaredNorm();  // 4 + 4 + 1
    CHECK(sq == 9.0);
    CHECK(kernel_eval(KernelSpec::rbf(0.5), x, z) == doctest::Approx(std::exp(-4.5)));
    CHECK(kernel_eval(KernelSpec::rbf(1.0), x, x) == 1.0);
}

TEST_CASE("kernel_eval rejects mismatched dimensions") {
    Eigen::VectorXd x(3), z(2);
    x.setZero();
    z.setZero();
    CHECK_THROWS_AS(kernel_eval(KernelSpec::linear(), x, z), DimensionError);
}

TEST_CASE("kernel spec validation") {
    CHECK_NOTHROW(KernelSpec::linear().validate());
    CHECK_NOTHROW(KernelSpec::poly(2).validate());
    CHECK_THROWS_AS(KernelSpec::poly(0).validate(), DomainError);
    CHECK_NOTHROW(KernelSpec::rbf(0.25).validate());
    CHECK_THROWS_AS(KernelSpec::rbf(0.0).validate(), DomainError);
    CHECK_THROWS_AS(KernelSpec::rbf(-1.0).validate(), DomainError);
}

TEST_CASE("kernel spec JSON round trip") {
    for (const KernelSpec& spec :
         {KernelSpec::linear(), KernelSpec::poly(4), KernelSpec::rbf(0.125)}) {
        const KernelSpec back = KernelSpec::from_json(spec.to_json());
        CHECK(back == spec);
    }
    CHECK(KernelSpec::rbf(0.5).describe() == "rbf(gamma=0.5)");
    CHECK(KernelSpec::poly(2).describe() == "poly(degree=2)");
    CHECK(KernelSpec::linear().describe() == "linear");
}

TEST_CASE("gram matrix is exactly symmetric and PSD") {
    const Eigen::MatrixXd X = random_points(25, 4, 5);
    for (const KernelSpec& spec :
         {KernelSpec::linear(), KernelSpec::poly(3), KernelSpec::rbf(0.7)}) {
        const Eigen::MatrixXd K = gram(spec, X, X);
        CHECK(K == K.transpose());  // bitwise symmetry
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, eig.eigenvalues().maxCoeff()));
    }
}

TEST_CASE("rectangular gram matches pointwise evaluation") {
    const Eigen::MatrixXd A = random_points(4, 3, 6);
    const Eigen::MatrixXd B = random_points(5, 3, 7);
    const KernelSpec spec = KernelSpec::rbf(0.3);
    const Eigen::MatrixXd K = gram(spec, A, B);
    REQUIRE(K.rows() == 4);
    REQUIRE(K.cols() == 5);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(K(i, j) == kernel_eval(spec, A.row(i), B.row(j)));
}

#include "usvr/kernel.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "usvr/errors.hpp"

namespace usvr {

namespace {

// (t + 1)^q by repeated multiplication; exact for the small integer degrees
// used here and reproducible across libm implementations.
double poly_pow(double t, int q) {
    double base = t + 1.0;
    double out = 1.0;
    for (int i = 0; i < q; ++i) out *= base;
    return out;
}

double eval(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    switch (spec.kind) {
        case KernelSpec::Kind::Linear:
            return x.dot(z);
        case KernelSpec::Kind::Poly:
            return poly_pow(x.dot(z), spec.degree);
        case KernelSpec::Kind::Rbf:
            return std::exp(-spec.gamma * (x - z).squaredNorm());
    }
    return 0.0;  // unreachable
}

}  // namespace

void KernelSpec::validate() const {
    if (kind == Kind::Poly && degree < 1)
        throw DomainError("poly kernel degree must be >= 1, got " + std::to_string(degree));
    if (kind == Kind::Rbf && !(gamma > 0.0))
        throw DomainError("rbf kernel gamma must be > 0, got " + std::to_string(gamma));
}

std::string KernelSpec::describe() const {
    switch (kind) {
        case Kind::Linear:
            return "linear";
        case Kind::Poly:
            return "poly(degree=" + std::to_string(degree) + ")";
        case Kind::Rbf: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "rbf(gamma=%g)", gamma);
            return buf;
        }
    }
    return "?";
}

std::string KernelSpec::to_json() const {
    nlohmann::json j;
    switch (kind) {
        case Kind::Linear:
            j["kind"] = "linear";
            break;
        case Kind::Poly:
            j["kind"] = "poly";
            j["degree"] = degree;
            break;
        case Kind::Rbf:
            j["kind"] = "rbf";
            j["gamma"] = gamma;
            break;
    }
    return j.dump();
}

KernelSpec KernelSpec::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    KernelSpec spec;
    if (kind == "linear") {
        spec = KernelSpec::linear();
    } else if (kind == "poly") {
        spec = KernelSpec::poly(j.at("degree").get<int>());
    } else if (kind == "rbf") {
        spec = KernelSpec::rbf(j.at("gamma").get<double>());
    } else {
        throw DomainError("unknown kernel kind '" + kind + "'");
    }
    spec.validate();
    return spec;
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    spec.validate();
    if (x.size() != z.size())
        throw DimensionError("kernel arguments have mismatched dimensions " +
                             std::to_string(x.size()) + " and " + std::to_string(z.size()));
    return eval(spec, x, z);
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    spec.validate();
    if (A.cols() != B.cols())
        throw DimensionError("gram: inputs have " + std::to_string(A.cols()) + " and " +
                             std::to_string(B.cols()) + " features");
    Eigen::MatrixXd K(A.rows(), B.rows());
    const bool same = (&A == &B) || (A.rows() == B.rows() && A.data() == B.data());
    if (same) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const Eigen::VectorXd xi = A.row(i);
            for (Eigen::Index j = i; j < A.rows(); ++j) {
                const double v = eval(spec, xi, A.row(j));
                K(i, j) = v;
                K(j, i) = v;
            }
        }
    } else {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const Eigen::VectorXd xi = A.row(i);
            for (Eigen::Index j = 0; j < B.rows(); ++j) K(i, j) = eval(spec, xi, B.row(j));
        }
    }
    return K;
}

}  // namespace usvr

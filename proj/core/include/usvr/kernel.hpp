#pragma once

#include <string>

#include <Eigen/Core>

namespace usvr {

/// Kernel family plus its parameter. JSON form:
/// {"kind": "linear"|"poly"|"rbf", "degree"?, "gamma"?}.
struct KernelSpec {
    enum class Kind { Linear, Poly, Rbf };

    Kind kind = Kind::Linear;
    int degree = 3;      // poly only, >= 1
    double gamma = 1.0;  // rbf only, > 0

    static KernelSpec linear() { return {Kind::Linear, 0, 0.0}; }
    static KernelSpec poly(int q) { return {Kind::Poly, q, 0.0}; }
    static KernelSpec rbf(double g) { return {Kind::Rbf, 0, g}; }

    void validate() const;
    std::string describe() const;

    std::string to_json() const;
    static KernelSpec from_json(const std::string& text);

    bool operator==(const KernelSpec&) const = default;
};

/// K(x, z): linear x.z, poly (x.z + 1)^q, rbf exp(-gamma |x-z|^2).
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z);

/// Dense kernel matrix with entry (i, j) = K(A_i, B_j). When A and B are
/// the same matrix the result is exactly symmetric (upper triangle computed,
/// lower mirrored).
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& A,
                     const Eigen::MatrixXd& B);

}  // namespace usvr

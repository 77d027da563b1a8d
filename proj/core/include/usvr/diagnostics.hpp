#pragma once

#include <string>

#include <Eigen/Core>

#include "usvr/dataset.hpp"
#include "usvr/svr.hpp"

namespace usvr {

/// Joint residual histogram for training and universum samples over common
/// equal-width bins, with the +-epsilon and +-Delta markers recorded.
struct ResidualHistogram {
    Eigen::VectorXd edges;           // bins + 1, strictly increasing
    Eigen::VectorXi train_counts;    // bins
    Eigen::VectorXi universum_counts;// bins
    double epsilon = 0.0;
    double delta = 0.0;

    /// CSV with columns bin_left, bin_right, train_count, universum_count
    /// and '#' comment lines carrying the epsilon/delta markers.
    std::string to_csv() const;
};

/// y_i - f(x_i) per sample.
Eigen::VectorXd residuals(const Model& model, const Dataset& ds);

/// Equal-width bins spanning the union of both residual sets, padded 5%.
ResidualHistogram histogram(const Eigen::VectorXd& train_res,
                            const Eigen::VectorXd& univ_res, int bins,
                            double epsilon, double delta);

/// Fraction of residuals with |r| <= delta.
double fraction_within_delta(const Eigen::VectorXd& univ_res, double delta);

/// Fraction of residuals sitting on the epsilon-tube boundary, i.e. with
/// ||r| - epsilon| <= tol. Not a published quantity; a convenience measure
/// of boundary clustering. tol < 0 selects max(1e-6, 0.01 * epsilon).
double data_piling_index(const Eigen::VectorXd& train_res, double epsilon,
                         double tol = -1.0);

}  // namespace usvr

#pragma once

#include <optional>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "usvr/dataset.hpp"
#include "usvr/kernel.hpp"
#include "usvr/qp.hpp"

namespace usvr {

struct SvrHyperParams {
    double c = 1.0;
    double epsilon = 0.1;
    KernelSpec kernel = KernelSpec::linear();
};

/// Solver statistics recorded at fit time.
struct TrainingInfo {
    double c = 0.0;
    double epsilon = 0.0;
    double cstar = 0.0;
    double delta = 0.0;
    long solver_iterations = 0;
    double kkt_violation = 0.0;
    int outer_iterations = 0;  // CCCP outer loops (0 for plain SVR)
    bool converged = true;
};

/// Kernel expansion f(x) = sum_i theta_i K(x_i, x) + bias over the retained
/// support inputs. Rows with |theta| <= 1e-12 are pruned at fit time.
struct Model {
    KernelSpec kernel;
    Eigen::MatrixXd support_inputs;
    Eigen::VectorXd coefficients;  // theta_i = alpha_i - beta_i
    double bias = 0.0;
    std::optional<ScalingParams> scaling;  // applied to inputs before kernels
    TrainingInfo info;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
    double predict_one(const Eigen::VectorXd& x) const;

    std::string to_json() const;
    static Model from_json(const std::string& text);
};

/// Slack bookkeeping at the fitted optimum.
struct FitDiagnostics {
    /// Per training sample, xi_i + xi*_i = epsilon-insensitive loss.
    Eigen::VectorXd training_slacks;
    /// Sum of training slacks.
    double empirical_risk = 0.0;
    /// Per universum sample, the two ramp components of the Delta-zone
    /// penalty (populated by fit_usvr; empty for plain SVR).
    Eigen::VectorXd universum_zeta;
    Eigen::VectorXd universum_zeta_star;
};

/// max(|residual| - epsilon, 0).
double epsilon_loss(double residual, double epsilon);

/// Fit standard epsilon-SVR through the dual (zero-shift problem).
std::pair<Model, FitDiagnostics> fit_svr(const Dataset& train,
                                         const SvrHyperParams& params,
                                         double tol = 1e-3);

/// Free-function form of Model::predict.
Eigen::VectorXd predict(const Model& model, const Eigen::MatrixXd& X);

}  // namespace usvr

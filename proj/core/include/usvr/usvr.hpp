#pragma once

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "usvr/dataset.hpp"
#include "usvr/qp.hpp"
#include "usvr/svr.hpp"

namespace usvr {

/// m labeled samples from a distribution the model should contradict.
struct UniversumSet {
    Eigen::MatrixXd inputs;   // m x d
    Eigen::VectorXd targets;  // m

    Eigen::Index m() const { return inputs.rows(); }
    Eigen::Index dim() const { return inputs.cols(); }
};

struct UsvrHyperParams {
    SvrHyperParams base;
    double cstar = 0.0;
    double delta = 0.0;
};

/// State of the concave-convex outer loop. delta/gamma flags hold one entry
/// per universum row, each 0 or C*, never both C* on the same row. The
/// objective trace is non-increasing (within float noise).
struct CccpState {
    int iterations = 0;
    Eigen::VectorXd delta_flags;
    Eigen::VectorXd gamma_flags;
    std::vector<double> objective_trace;
    bool converged = false;
    bool cycled = false;

    std::string trace_json() const;
};

/// Tent penalty max(0, Delta - |residual|): zero outside the +-Delta zone,
/// peaking at Delta for a residual of zero.
double universum_loss(double residual, double delta);

/// Flag update rule: for each universum row, y* < f(x*) sets the delta flag
/// to C*, y* > f(x*) sets the gamma flag, exact ties leave both at zero.
std::pair<Eigen::VectorXd, Eigen::VectorXd> cccp_update(const Model& model,
                                                        const UniversumSet& universum,
                                                        double cstar);

/// Stack training rows (rho = epsilon, cost = C, shifts 0) above universum
/// rows (rho = -Delta, cost = C*, shifts from flags). The Gram matrix over
/// the stacked inputs may be passed in to avoid recomputation; it must then
/// match the stacked row order.
QpProblem build_augmented_problem(const Dataset& train, const UniversumSet& universum,
                                  const UsvrHyperParams& params,
                                  const Eigen::VectorXd& delta_flags,
                                  const Eigen::VectorXd& gamma_flags,
                                  std::shared_ptr<const Eigen::MatrixXd> stacked_gram = nullptr);

/// Universum-SVR training: initialize from plain SVR, then alternate flag
/// updates and augmented solves until the flags are a fixed point. Each
/// outer solve is warm-started from the previous iterate. A flag set
/// revisited without objective progress since its last visit (a limit
/// cycle) terminates with the best-objective iterate. max_outer caps the
/// outer loop; hitting it returns the best iterate with converged=false.
std::tuple<Model, FitDiagnostics, CccpState> fit_usvr(const Dataset& train,
                                                      const UniversumSet& universum,
                                                      const UsvrHyperParams& params,
                                                      double tol = 1e-3,
                                                      int max_outer = 50);

/// Decomposed-primal objective used as the CCCP monotonicity functional:
/// 1/2 |w|^2 + C * sum of epsilon losses + C* * sum over universum rows of
/// both ramp components (equivalently universum_loss + Delta per row, the
/// dropped decomposition constant being omitted consistently).
double usvr_objective(const Model& model, const Dataset& train,
                      const UniversumSet* universum, const UsvrHyperParams& params);

}  // namespace usvr

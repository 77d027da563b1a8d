#pragma once

#include <memory>

#include <Eigen/Core>

#include "usvr/errors.hpp"

namespace usvr {

/// Dual problem over paired variables (alpha_i, beta_i), i = 1..N:
///
///   min  1/2 sum_ij (a_i - b_i)(a_j - b_j) K_ij
///        + sum_i rho_i (a_i + b_i) - sum_i y_i (a_i - b_i)
///   s.t. sum_i a_i = sum_i b_i
///        -shift_alpha_i <= a_i <= cost_i - shift_alpha_i
///        -shift_beta_i  <= b_i <= cost_i - shift_beta_i
///
/// Plain epsilon-SVR is the zero-shift case with rho_i = epsilon and
/// cost_i = C. Augmented universum problems append rows with rho = -Delta,
/// cost = C* and shifts in {0, C*} (never both nonzero on one row).
struct QpProblem {
    std::shared_ptr<const Eigen::MatrixXd> gram;  // N x N, symmetric PSD
    Eigen::VectorXd y;                            // N
    Eigen::VectorXd rho;                          // N
    Eigen::VectorXd cost;                         // N
    Eigen::VectorXd shift_alpha;                  // N, gamma_i
    Eigen::VectorXd shift_beta;                   // N, delta_i
    Eigen::Index n_train = 0;                     // rows 0..n_train-1 are training rows

    Eigen::Index size() const { return y.size(); }

    double alpha_lo(Eigen::Index i) const { return -shift_alpha[i]; }
    double alpha_hi(Eigen::Index i) const { return cost[i] - shift_alpha[i]; }
    double beta_lo(Eigen::Index i) const { return -shift_beta[i]; }
    double beta_hi(Eigen::Index i) const { return cost[i] - shift_beta[i]; }

    /// Structural invariants: sizes agree, gram symmetric, training rows
    /// unshifted, universum shifts in {0, cost_i} and mutually exclusive.
    void validate() const;
};

struct DualSolution {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    double bias = 0.0;
    double objective = 0.0;
    double kkt_violation = 0.0;
    long iterations = 0;  // SMO pair updates (solver trace)
};

/// Iteration cap exceeded; carries the best iterate found and its violation.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, DualSolution best)
        : Error(what), best_iterate(std::move(best)) {}
    DualSolution best_iterate;
};

/// SMO solver: maximal-violating-pair working set over the stacked
/// (alpha, beta) variables, lowest index winning ties, pair steps keeping
/// sum(alpha) - sum(beta) invariant. Stops when the maximum KKT violation
/// is <= tol. Optional warm start is clipped into the box and repaired to
/// restore the equality constraint before iterating.
DualSolution solve(const QpProblem& problem, double tol,
                   const Eigen::VectorXd* warm_alpha = nullptr,
                   const Eigen::VectorXd* warm_beta = nullptr,
                   long max_iter = 10'000'000);

/// Test oracle: projected gradient descent with diminishing steps and exact
/// projection onto {box, sum(alpha) = sum(beta)}. Deterministic; intended
/// for small problems only.
DualSolution reference_solve(const QpProblem& problem, long iterations);

/// Bias from KKT conditions: average over free variables of their implied
/// bias; with no free variable, the midpoint of the feasible interval.
/// Throws InconsistentSolution if that interval is empty beyond tol.
double compute_bias(const QpProblem& problem, const Eigen::VectorXd& alpha,
                    const Eigen::VectorXd& beta, double tol = 1e-3);

/// Maximum over variables of the gradient-sign / complementary-slackness
/// violation at (alpha, beta, bias). Zero at an exact optimum.
double kkt_violation(const QpProblem& problem, const Eigen::VectorXd& alpha,
                     const Eigen::VectorXd& beta, double bias);
double kkt_violation(const QpProblem& problem, const DualSolution& solution);

/// The quadratic-plus-linear dual objective at (alpha, beta).
double objective_value(const QpProblem& problem, const Eigen::VectorXd& alpha,
                       const Eigen::VectorXd& beta);

}  // namespace usvr

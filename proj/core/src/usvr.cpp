#include "usvr/usvr.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include "json.hpp"

#include "usvr/errors.hpp"
#include "usvr/kernel.hpp"

namespace usvr {

namespace {

constexpr double kSupportThreshold = 1e-12;

// One deterministic byte per universum row: 0 none, 1 delta, 2 gamma.
using FlagCode = std::vector<int8_t>;

FlagCode encode_flags(const Eigen::VectorXd& dflags, const Eigen::VectorXd& gflags) {
    FlagCode code(static_cast<size_t>(dflags.size()), 0);
    for (Eigen::Index j = 0; j < dflags.size(); ++j) {
        if (dflags[j] != 0.0) code[static_cast<size_t>(j)] = 1;
        if (gflags[j] != 0.0) code[static_cast<size_t>(j)] = 2;
    }
    return code;
}

// Ramp components of the Delta-zone penalty; their sum is
// universum_loss(r, delta) + delta.
double zeta_of(double r, double delta) {
    return std::max(0.0, delta - r) - std::max(0.0, -r);
}
double zeta_star_of(double r, double delta) {
    return std::max(0.0, delta + r) - std::max(0.0, r);
}

// CCCP monotonicity functional at iterate (theta, b) on the stacked gram:
// 1/2 theta' G theta + C * epsilon losses + C* * (zeta + zeta*) sums.
double evaluate(const Eigen::MatrixXd& G, const Eigen::VectorXd& theta, double b,
                const Dataset& train, const UniversumSet& universum,
                const UsvrHyperParams& params) {
    const Eigen::Index n = train.n();
    const Eigen::VectorXd gtheta = G * theta;
    double obj = 0.5 * theta.dot(gtheta);
    for (Eigen::Index i = 0; i < n; ++i)
        obj += params.base.c *
               epsilon_loss(train.targets[i] - (gtheta[i] + b), params.base.epsilon);
    for (Eigen::Index j = 0; j < universum.m(); ++j) {
        const double r = universum.targets[j] - (gtheta[n + j] + b);
        obj += params.cstar * (zeta_of(r, params.delta) + zeta_star_of(r, params.delta));
    }
    return obj;
}

}  // namespace

std::string CccpState::trace_json() const {
    nlohmann::json j;
    j["iterations"] = iterations;
    j["converged"] = converged;
    j["cycled"] = cycled;
    j["objective_trace"] = objective_trace;
    return j.dump();
}

double universum_loss(double residual, double delta) {
    return std::max(0.0, delta - std::abs(residual));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> cccp_update(const Model& model,
                                                        const UniversumSet& universum,
                                                        double cstar) {
    if (cstar < 0.0) throw DomainError("cccp update requires cstar >= 0");
    const Eigen::Index m = universum.m();
    Eigen::VectorXd dflags = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd gflags = Eigen::VectorXd::Zero(m);
    if (m == 0) return {dflags, gflags};
    const Eigen::VectorXd f = model.predict(universum.inputs);
    for (Eigen::Index j = 0; j < m; ++j) {
        if (universum.targets[j] < f[j])
            dflags[j] = cstar;
        else if (universum.targets[j] > f[j])
            gflags[j] = cstar;
    }
    return {dflags, gflags};
}

QpProblem build_augmented_problem(const Dataset& train, const UniversumSet& universum,
                                  const UsvrHyperParams& params,
                                  const Eigen::VectorXd& delta_flags,
                                  const Eigen::VectorXd& gamma_flags,
                                  std::shared_ptr<const Eigen::MatrixXd> stacked_gram) {
    train.validate();
    const Eigen::Index n = train.n(), m = universum.m();
    if (m > 0 && universum.dim() != train.dim())
        throw DimensionError("universum has " + std::to_string(universum.dim()) +
                             " features, training data has " + std::to_string(train.dim()));
    if (delta_flags.size() != m || gamma_flags.size() != m)
        throw DimensionError("flag vectors must have one entry per universum row");
    const Eigen::Index N = n + m;

    QpProblem pb;
    if (stacked_gram) {
        if (stacked_gram->rows() != N || stacked_gram->cols() != N)
            throw DimensionError("stacked gram has wrong shape");
        pb.gram = std::move(stacked_gram);
    } else {
        Eigen::MatrixXd X(N, train.dim());
        X.topRows(n) = train.inputs;
        if (m > 0) X.bottomRows(m) = universum.inputs;
        pb.gram = std::make_shared<Eigen::MatrixXd>(gram(params.base.kernel, X, X));
    }
    pb.y.resize(N);
    pb.y.head(n) = train.targets;
    if (m > 0) pb.y.tail(m) = universum.targets;
    pb.rho.resize(N);
    pb.rho.head(n).setConstant(params.base.epsilon);
    pb.rho.tail(m).setConstant(-params.delta);
    pb.cost.resize(N);
    pb.cost.head(n).setConstant(params.base.c);
    pb.cost.tail(m).setConstant(params.cstar);
    pb.shift_alpha = Eigen::VectorXd::Zero(N);
    pb.shift_beta = Eigen::VectorXd::Zero(N);
    if (m > 0) {
        pb.shift_alpha.tail(m) = gamma_flags;
        pb.shift_beta.tail(m) = delta_flags;
    }
    pb.n_train = n;
    return pb;
}

std::tuple<Model, FitDiagnostics, CccpState> fit_usvr(const Dataset& train,
                                                      const UniversumSet& universum,
                                                      const UsvrHyperParams& params,
                                                      double tol, int max_outer) {
    train.validate();
    params.base.kernel.validate();
    if (!(params.base.c > 0.0)) throw DomainError("usvr requires c > 0");
    if (params.base.epsilon < 0.0) throw DomainError("usvr requires epsilon >= 0");
    if (params.cstar < 0.0 || params.delta < 0.0)
        throw DomainError("usvr requires cstar >= 0 and delta >= 0");
    if (max_outer < 1) throw DomainError("usvr requires max_outer >= 1");
    const Eigen::Index n = train.n(), m = universum.m();
    if (m > 0 && (universum.dim() != train.dim() || !universum.inputs.allFinite() ||
                  !universum.targets.allFinite()))
        throw DimensionError("universum set is inconsistent with the training data");

    // With no universum influence the problem is plain SVR; returning that
    // fit directly keeps the reduction exact.
    if (m == 0 || params.cstar == 0.0 || params.delta == 0.0) {
        auto [model, diag] = fit_svr(train, params.base, tol);
        model.info.cstar = params.cstar;
        model.info.delta = params.delta;
        CccpState state;
        state.iterations = 0;
        state.converged = true;
        state.delta_flags = Eigen::VectorXd::Zero(m);
        state.gamma_flags = Eigen::VectorXd::Zero(m);
        state.objective_trace.push_back(
            usvr_objective(model, train, m > 0 ? &universum : nullptr, params));
        diag.universum_zeta = Eigen::VectorXd::Zero(m);
        diag.universum_zeta_star = Eigen::VectorXd::Zero(m);
        if (m > 0) {
            const Eigen::VectorXd f = model.predict(universum.inputs);
            for (Eigen::Index j = 0; j < m; ++j) {
                const double r = universum.targets[j] - f[j];
                diag.universum_zeta[j] = zeta_of(r, params.delta);
                diag.universum_zeta_star[j] = zeta_star_of(r, params.delta);
            }
        }
        return {std::move(model), std::move(diag), std::move(state)};
    }

    const Eigen::Index N = n + m;
    Eigen::MatrixXd X(N, train.dim());
    X.topRows(n) = train.inputs;
    X.bottomRows(m) = universum.inputs;
    auto G = std::make_shared<const Eigen::MatrixXd>(gram(params.base.kernel, X, X));

    // Plain SVR initialization on the training block of the shared gram.
    QpProblem svr_pb;
    svr_pb.gram = std::make_shared<Eigen::MatrixXd>(G->topLeftCorner(n, n));
    svr_pb.y = train.targets;
    svr_pb.rho = Eigen::VectorXd::Constant(n, params.base.epsilon);
    svr_pb.cost = Eigen::VectorXd::Constant(n, params.base.c);
    svr_pb.shift_alpha = Eigen::VectorXd::Zero(n);
    svr_pb.shift_beta = Eigen::VectorXd::Zero(n);
    svr_pb.n_train = n;

    long total_inner = 0;
    bool inner_healthy = true;
    DualSolution init;
    try {
        init = solve(svr_pb, tol);
    } catch (const NonConvergence& e) {
        init = e.best_iterate;
        inner_healthy = false;
    }
    total_inner += init.iterations;
    double last_kkt = init.kkt_violation;

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(N), beta = Eigen::VectorXd::Zero(N);
    alpha.head(n) = init.alpha;
    beta.head(n) = init.beta;
    double bias = init.bias;
    Eigen::VectorXd theta = alpha - beta;

    Eigen::VectorXd dflags = Eigen::VectorXd::Zero(m), gflags = Eigen::VectorXd::Zero(m);
    auto flags_at = [&](const Eigen::VectorXd& th, double b) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(m), g = Eigen::VectorXd::Zero(m);
        const Eigen::VectorXd f = (G->bottomRows(m) * th).array() + b;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (universum.targets[j] < f[j])
                d[j] = params.cstar;
            else if (universum.targets[j] > f[j])
                g[j] = params.cstar;
        }
        return std::make_pair(std::move(d), std::move(g));
    };

    CccpState state;
    std::tie(dflags, gflags) = flags_at(theta, bias);
    double current_obj = evaluate(*G, theta, bias, train, universum, params);
    state.objective_trace.push_back(current_obj);

    // Each visited assignment is remembered with the objective held when it
    // was last queued for solving. Warm-started inner solves stop at tol, so
    // the same assignment can legitimately recur on the way down; a revisit
    // is a terminal cycle only when the objective has not moved since.
    std::vector<std::pair<FlagCode, double>> history;
    std::optional<FlagCode> prev_code;
    int solves = 0;
    for (int outer = 0; outer < max_outer; ++outer) {
        auto [d_new, g_new] = flags_at(theta, bias);
        FlagCode code = encode_flags(d_new, g_new);
        if (prev_code && code == *prev_code) {
            state.converged = true;
            break;
        }
        const auto seen = std::find_if(history.begin(), history.end(),
                                       [&](const auto& h) { return h.first == code; });
        if (seen != history.end()) {
            if (current_obj >= seen->second - 1e-10 * (1.0 + std::abs(seen->second))) {
                state.cycled = true;
                break;
            }
            seen->second = current_obj;
        } else {
            history.emplace_back(code, current_obj);
        }
        prev_code = code;
        dflags = d_new;
        gflags = g_new;

        QpProblem pb = build_augmented_problem(train, universum, params, dflags, gflags, G);
        DualSolution sol;
        bool ok = true;
        try {
            sol = solve(pb, tol, &alpha, &beta);
        } catch (const NonConvergence& e) {
            sol = e.best_iterate;
            ok = false;
        }
        total_inner += sol.iterations;
        ++solves;

        // Descent safeguard: exact minimization of the convexified problem
        // cannot raise the objective, but an inner solve at tol can. Accept
        // only non-increasing iterates; retry tighter once, else keep the
        // previous iterate (its unchanged flags then end the loop as a
        // fixed point on the next pass).
        Eigen::VectorXd theta_new = sol.alpha - sol.beta;
        double obj_new = evaluate(*G, theta_new, sol.bias, train, universum, params);
        if (obj_new > current_obj) {
            DualSolution retry;
            bool retry_ok = true;
            try {
                retry = solve(pb, tol * 1e-2, &sol.alpha, &sol.beta);
            } catch (const NonConvergence& e) {
                retry = e.best_iterate;
                retry_ok = false;
            }
            total_inner += retry.iterations;
            Eigen::VectorXd theta_retry = retry.alpha - retry.beta;
            const double obj_retry = evaluate(*G, theta_retry, retry.bias, train, universum, params);
            if (obj_retry <= current_obj) {
                sol = std::move(retry);
                theta_new = std::move(theta_retry);
                obj_new = obj_retry;
                ok = retry_ok;
            } else {
                continue;
            }
        }

        alpha = sol.alpha;
        beta = sol.beta;
        bias = sol.bias;
        theta = std::move(theta_new);
        last_kkt = sol.kkt_violation;
        inner_healthy = inner_healthy && ok;
        current_obj = obj_new;
        state.objective_trace.push_back(current_obj);
    }
    state.iterations = solves;
    state.delta_flags = dflags;
    state.gamma_flags = gflags;

    Model model;
    model.kernel = params.base.kernel;
    model.bias = bias;
    model.info.c = params.base.c;
    model.info.epsilon = params.base.epsilon;
    model.info.cstar = params.cstar;
    model.info.delta = params.delta;
    model.info.solver_iterations = total_inner;
    model.info.kkt_violation = last_kkt;
    model.info.outer_iterations = state.iterations;
    model.info.converged = state.converged && inner_healthy;

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < N; ++i)
        if (std::abs(theta[i]) > kSupportThreshold) keep.push_back(i);
    model.support_inputs.resize(static_cast<Eigen::Index>(keep.size()), train.dim());
    model.coefficients.resize(static_cast<Eigen::Index>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) {
        model.support_inputs.row(static_cast<Eigen::Index>(k)) = X.row(keep[k]);
        model.coefficients[static_cast<Eigen::Index>(k)] = theta[keep[k]];
    }

    FitDiagnostics diag;
    const Eigen::VectorXd f = ((*G) * theta).array() + bias;
    diag.training_slacks.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        diag.training_slacks[i] = epsilon_loss(train.targets[i] - f[i], params.base.epsilon);
    diag.empirical_risk = diag.training_slacks.sum();
    diag.universum_zeta.resize(m);
    diag.universum_zeta_star.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double r = universum.targets[j] - f[n + j];
        diag.universum_zeta[j] = zeta_of(r, params.delta);
        diag.universum_zeta_star[j] = zeta_star_of(r, params.delta);
    }
    return {std::move(model), std::move(diag), std::move(state)};
}

double usvr_objective(const Model& model, const Dataset& train, const UniversumSet* universum,
                      const UsvrHyperParams& params) {
    const Eigen::MatrixXd Kss = gram(model.kernel, model.support_inputs, model.support_inputs);
    double obj = 0.5 * model.coefficients.dot(Kss * model.coefficients);
    const Eigen::VectorXd f_train = model.predict(train.inputs);
    for (Eigen::Index i = 0; i < train.n(); ++i)
        obj += params.base.c * epsilon_loss(train.targets[i] - f_train[i], params.base.epsilon);
    if (universum && universum->m() > 0) {
        const Eigen::VectorXd f = model.predict(universum->inputs);
        for (Eigen::Index j = 0; j < universum->m(); ++j) {
            const double r = universum->targets[j] - f[j];
            obj += params.cstar * (zeta_of(r, params.delta) + zeta_star_of(r, params.delta));
        }
    }
    return obj;
}

}  // namespace usvr

#include "usvr/svr.hpp"

#include <cmath>
#include <memory>
#include <utility>

#include "json.hpp"

#include "usvr/errors.hpp"

namespace usvr {

namespace {

constexpr double kSupportThreshold = 1e-12;

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.begin(), v.end());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    auto tmp = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(tmp.data(), static_cast<Eigen::Index>(tmp.size()));
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != c)
            throw DomainError("model json: ragged support matrix");
        m.row(i) = Eigen::Map<const Eigen::VectorXd>(rows[i].data(), c);
    }
    return m;
}

}  // namespace

Eigen::VectorXd Model::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != support_inputs.cols() && support_inputs.rows() > 0)
        throw DimensionError("predict: input has " + std::to_string(X.cols()) +
                             " features, model expects " + std::to_string(support_inputs.cols()));
    Eigen::MatrixXd Xs = X;
    if (scaling) {
        Dataset tmp;
        tmp.inputs = X;
        tmp.targets = Eigen::VectorXd::Zero(X.rows());
        Xs = apply_scaling(tmp, *scaling).inputs;
    }
    if (support_inputs.rows() == 0) return Eigen::VectorXd::Constant(X.rows(), bias);
    const Eigen::MatrixXd cross = gram(kernel, Xs, support_inputs);
    return (cross * coefficients).array() + bias;
}

double Model::predict_one(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd X(1, x.size());
    X.row(0) = x;
    return predict(X)[0];
}

std::string Model::to_json() const {
    nlohmann::json j;
    j["kernel"] = nlohmann::json::parse(kernel.to_json());
    j["support_inputs"] = matrix_to_json(support_inputs);
    j["coefficients"] = vector_to_json(coefficients);
    j["bias"] = bias;
    if (scaling) j["scaling"] = nlohmann::json::parse(scaling->to_json());
    j["info"] = {{"c", info.c},
                 {"epsilon", info.epsilon},
                 {"cstar", info.cstar},
                 {"delta", info.delta},
                 {"solver_iterations", info.solver_iterations},
                 {"kkt_violation", info.kkt_violation},
                 {"outer_iterations", info.outer_iterations},
                 {"converged", info.converged}};
    return j.dump();
}

Model Model::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Model m;
    m.kernel = KernelSpec::from_json(j.at("kernel").dump());
    m.support_inputs = matrix_from_json(j.at("support_inputs"));
    m.coefficients = vector_from_json(j.at("coefficients"));
    if (m.coefficients.size() != m.support_inputs.rows())
        throw DomainError("model json: coefficient count does not match support rows");
    m.bias = j.at("bias").get<double>();
    if (j.contains("scaling")) m.scaling = ScalingParams::from_json(j.at("scaling").dump());
    if (j.contains("info")) {
        const auto& i = j.at("info");
        m.info.c = i.value("c", 0.0);
        m.info.epsilon = i.value("epsilon", 0.0);
        m.info.cstar = i.value("cstar", 0.0);
        m.info.delta = i.value("delta", 0.0);
        m.info.solver_iterations = i.value("solver_iterations", 0L);
        m.info.kkt_violation = i.value("kkt_violation", 0.0);
        m.info.outer_iterations = i.value("outer_iterations", 0);
        m.info.converged = i.value("converged", true);
    }
    return m;
}

double epsilon_loss(double residual, double epsilon) {
    return std::max(std::abs(residual) - epsilon, 0.0);
}

std::pair<Model, FitDiagnostics> fit_svr(const Dataset& train, const SvrHyperParams& params,
                                         double tol) {
    train.validate();
    params.kernel.validate();
    if (train.n() == 0) throw DomainError("cannot fit on an empty dataset");
    if (!(params.c > 0.0)) throw DomainError("svr requires c > 0");
    if (params.epsilon < 0.0) throw DomainError("svr requires epsilon >= 0");

    const Eigen::Index n = train.n();
    QpProblem pb;
    pb.gram = std::make_shared<Eigen::MatrixXd>(gram(params.kernel, train.inputs, train.inputs));
    pb.y = train.targets;
    pb.rho = Eigen::VectorXd::Constant(n, params.epsilon);
    pb.cost = Eigen::VectorXd::Constant(n, params.c);
    pb.shift_alpha = Eigen::VectorXd::Zero(n);
    pb.shift_beta = Eigen::VectorXd::Zero(n);
    pb.n_train = n;

    DualSolution sol;
    bool converged = true;
    try {
        sol = solve(pb, tol);
    } catch (const NonConvergence& e) {
        sol = e.best_iterate;
        converged = false;
    }

    Model model;
    model.kernel = params.kernel;
    model.bias = sol.bias;
    model.info.c = params.c;
    model.info.epsilon = params.epsilon;
    model.info.solver_iterations = sol.iterations;
    model.info.kkt_violation = sol.kkt_violation;
    model.info.outer_iterations = 0;
    model.info.converged = converged;

    const Eigen::VectorXd theta = sol.alpha - sol.beta;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(theta[i]) > kSupportThreshold) keep.push_back(i);
    model.support_inputs.resize(static_cast<Eigen::Index>(keep.size()), train.dim());
    model.coefficients.resize(static_cast<Eigen::Index>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) {
        model.support_inputs.row(static_cast<Eigen::Index>(k)) = train.inputs.row(keep[k]);
        model.coefficients[static_cast<Eigen::Index>(k)] = theta[keep[k]];
    }

    FitDiagnostics diag;
    const Eigen::VectorXd f = ((*pb.gram) * theta).array() + sol.bias;
    diag.training_slacks.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        diag.training_slacks[i] = epsilon_loss(train.targets[i] - f[i], params.epsilon);
    diag.empirical_risk = diag.training_slacks.sum();
    return {std::move(model), std::move(diag)};
}

Eigen::VectorXd predict(const Model& model, const Eigen::MatrixXd& X) { return model.predict(X); }

}  // namespace usvr

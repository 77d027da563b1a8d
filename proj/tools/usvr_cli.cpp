#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "usvr/dataset.hpp"
#include "usvr/diagnostics.hpp"
#include "usvr/errors.hpp"
#include "usvr/experiment.hpp"
#include "usvr/model_selection.hpp"
#include "usvr/svr.hpp"
#include "usvr/universum.hpp"
#include "usvr/usvr.hpp"

namespace {

bool verbose() {
    const char* v = std::getenv("USVR_LOG");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void logline(const std::string& msg) {
    if (verbose()) std::fprintf(stderr, "[usvr] %s\n", msg.c_str());
}

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usvr::IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw usvr::IoError("cannot write '" + path + "'");
    out << text;
    out.close();
    if (!out) throw usvr::IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------- train ---

struct TrainArgs {
    std::string data;
    std::string val;
    std::string universum;
    std::string target = "y";
    std::string kernel = "linear";
    int degree = 2;
    double gamma = 0.0;
    double epsilon = 0.0;
    double c = 0.0;
    double cstar = 0.0;
    double delta = 0.0;
    double tol = 1e-3;
    bool scale = false;
    std::string out = "model.json";
    // set by CLI11 when the corresponding flag was passed
    bool has_epsilon = false, has_c = false, has_gamma = false;
    bool has_cstar = false, has_delta = false;
};

usvr::UniversumSet load_universum(const std::string& path, const std::string& target) {
    usvr::Dataset ds = usvr::load_csv(path, target);
    return {std::move(ds.inputs), std::move(ds.targets)};
}

int cmd_train(const TrainArgs& a) {
    const usvr::Dataset raw_train = usvr::load_csv(a.data, a.target);
    logline("loaded " + a.data + ": n=" + std::to_string(raw_train.n()) +
            " d=" + std::to_string(raw_train.dim()));

    usvr::Dataset train = raw_train;
    std::optional<usvr::ScalingParams> scaling;
    if (a.scale) {
        auto [scaled, params] = usvr::scale_inputs(train, -1.0, 1.0);
        train = std::move(scaled);
        scaling = std::move(params);
    }
    auto rescale = [&](usvr::Dataset ds) {
        return scaling ? usvr::apply_scaling(ds, *scaling) : std::move(ds);
    };

    std::optional<usvr::Dataset> val;
    if (!a.val.empty()) val = rescale(usvr::load_csv(a.val, a.target));

    std::optional<usvr::UniversumSet> universum;
    Eigen::MatrixXd raw_univ_inputs;
    if (!a.universum.empty()) {
        usvr::UniversumSet u = load_universum(a.universum, a.target);
        raw_univ_inputs = u.inputs;
        usvr::Dataset tmp = rescale({std::move(u.inputs), std::move(u.targets)});
        universum = usvr::UniversumSet{std::move(tmp.inputs), std::move(tmp.targets)};
    }

    // Step 1 parameters: either given directly or selected on --val.
    usvr::SvrHyperParams params;
    if (a.has_epsilon) {
        params.epsilon = a.epsilon;
        if (a.kernel == "linear") {
            params.kernel = usvr::KernelSpec::linear();
        } else if (a.kernel == "poly") {
            params.kernel = usvr::KernelSpec::poly(a.degree);
        } else if (a.kernel == "rbf") {
            if (!a.has_gamma) throw usvr::DomainError("--kernel rbf requires --gamma");
            params.kernel = usvr::KernelSpec::rbf(a.gamma);
        } else {
            throw usvr::DomainError("unknown kernel '" + a.kernel + "'");
        }
        params.kernel.validate();
        params.c = a.has_c ? a.c : usvr::default_c(train);
    } else {
        if (!val) throw usvr::DomainError("--epsilon not given: supply it or a --val set for selection");
        usvr::GridSpec grid = a.kernel == "rbf" ? usvr::GridSpec::defaults_rbf()
                                                : usvr::GridSpec::defaults_linear();
        if (a.kernel == "poly") grid.kernel_grid = {usvr::KernelSpec::poly(a.degree)};
        if (a.has_gamma) grid.kernel_grid = {usvr::KernelSpec::rbf(a.gamma)};
        auto [chosen, report] = usvr::select_svr(train, *val, grid, a.tol);
        params = chosen;
        logline("selection step 1:\n" + report.to_csv());
        std::printf("selected_epsilon %s\n", fmt4(params.epsilon).c_str());
        std::printf("selected_kernel %s\n", params.kernel.describe().c_str());
    }

    usvr::Model model;
    usvr::FitDiagnostics diag;
    std::optional<usvr::CccpState> cccp;
    if (universum) {
        usvr::UsvrHyperParams up;
        up.base = params;
        if (a.has_cstar && a.has_delta) {
            up.cstar = a.cstar;
            up.delta = a.delta;
        } else if (val) {
            auto [chosen, report] = usvr::select_usvr(train, *val, *universum, params,
                a.kernel == "rbf" ? usvr::GridSpec::defaults_rbf() : usvr::GridSpec::defaults_linear(),
                a.tol);
            up = chosen;
            logline("selection step 2:\n" + report.to_csv());
            std::printf("selected_cstar %s\n", fmt4(up.cstar).c_str());
            std::printf("selected_delta %s\n", fmt4(up.delta).c_str());
        } else {
            throw usvr::DomainError("--universum requires --cstar and --delta, or a --val set");
        }
        auto [m, d, state] = usvr::fit_usvr(train, *universum, up, a.tol);
        model = std::move(m);
        diag = std::move(d);
        cccp = std::move(state);
    } else {
        auto [m, d] = usvr::fit_svr(train, params, a.tol);
        model = std::move(m);
        diag = std::move(d);
    }
    model.scaling = scaling;

    write_file(a.out, model.to_json());

    const Eigen::VectorXd preds = model.predict(raw_train.inputs);
    std::printf("train_nrms %s\n", fmt4(usvr::nrms(raw_train.targets, preds)).c_str());
    std::printf("support_vectors %lld\n",
                static_cast<long long>(model.support_inputs.rows()));
    std::printf("solver_iterations %ld\n", model.info.solver_iterations);
    std::printf("kkt_violation %s\n", fmt4(model.info.kkt_violation).c_str());
    if (cccp) {
        std::printf("outer_iterations %d\n", cccp->iterations);
        const Eigen::VectorXd univ_res =
            universum->targets - model.predict(raw_univ_inputs);
        std::printf("universum_within_delta %s\n",
                    fmt4(usvr::fraction_within_delta(univ_res, model.info.delta)).c_str());
    }
    std::printf("converged %s\n", model.info.converged ? "yes" : "no");
    std::printf("wrote %s\n", a.out.c_str());

    if (!model.info.converged) {
        std::fprintf(stderr, "error: solver did not converge within the iteration budget\n");
        return 2;
    }
    return 0;
}

// -------------------------------------------------------------- predict ---

struct PredictArgs {
    std::string model;
    std::string data;
    std::string target = "y";
    std::string out = "predictions.csv";
};

int cmd_predict(const PredictArgs& a) {
    const usvr::Model model = usvr::Model::from_json(read_file(a.model));

    usvr::CsvOptions strict;
    strict.drop_missing = false;
    Eigen::MatrixXd inputs;
    std::optional<Eigen::VectorXd> targets;
    if (usvr::csv_has_column(a.data, a.target)) {
        usvr::LoadReport rep = usvr::load_csv_ex(a.data, a.target, strict);
        inputs = std::move(rep.data.inputs);
        targets = std::move(rep.data.targets);
    } else {
        usvr::LoadReport rep = usvr::load_csv_features(a.data, strict);
        inputs = std::move(rep.data.inputs);
    }

    const Eigen::VectorXd preds = model.predict(inputs);

    std::string text = "prediction\n";
    for (Eigen::Index i = 0; i < preds.size(); ++i) text += fmt_full(preds[i]) + "\n";
    write_file(a.out, text);

    std::printf("rows %lld\n", static_cast<long long>(preds.size()));
    if (targets) {
        try {
            std::printf("nrms %s\n", fmt4(usvr::nrms(*targets, preds)).c_str());
        } catch (const usvr::DomainError&) {
            // constant targets: NRMS undefined, skip the line
        }
    }
    std::printf("wrote %s\n", a.out.c_str());
    return 0;
}

// ------------------------------------------------------------ universum ---

struct UniversumArgs {
    std::string data;
    std::string strategy;
    int m = 0;
    std::uint64_t seed = 0;
    std::string target = "y";
    std::string out = "universum.csv";
};

int cmd_universum(const UniversumArgs& a) {
    usvr::UniversumSet u;
    std::vector<std::string> names;
    if (a.strategy == "hypercube1") {
        u = usvr::hypercube_universum1(a.m, a.seed);
    } else {
        if (a.data.empty())
            throw usvr::DomainError("--strategy " + a.strategy + " requires --data");
        usvr::CsvOptions strict;
        strict.drop_missing = false;
        usvr::LoadReport rep = usvr::load_csv_ex(a.data, a.target, strict);
        names = rep.feature_names;
        if (a.strategy == "1") u = usvr::strategy1_swap(rep.data, a.m, a.seed);
        else if (a.strategy == "2") u = usvr::strategy2_resample_y(rep.data, a.m, a.seed);
        else if (a.strategy == "3") u = usvr::strategy3_permute_x(rep.data, a.m, a.seed);
        else if (a.strategy == "4") u = usvr::strategy4_both(rep.data, a.m, a.seed);
        else throw usvr::DomainError("unknown strategy '" + a.strategy + "'");
    }
    usvr::write_csv(a.out, {std::move(u.inputs), std::move(u.targets)}, names, a.target);
    std::printf("rows %d\n", a.m);
    std::printf("wrote %s\n", a.out.c_str());
    return 0;
}

// ----------------------------------------------------------- experiment ---

struct ExperimentArgs {
    std::string scenario;
    std::string config;
    std::string data;
    std::string out_dir = ".";
    int trials = -1;
    std::int64_t seed = -1;
    int jobs = -1;
    double tol = -1.0;
    int universum_type = 0;  // 0 = keep preset
};

void emit_report(const std::string& dir, const usvr::ExperimentReport& report) {
    namespace fs = std::filesystem;
    const std::string prefix = (fs::path(dir) / report.scenario).string();
    write_file(prefix + "_summary.json", report.summary_json());
    write_file(prefix + "_trials.csv", report.trials_csv());
    if (report.representative) {
        const auto& r = *report.representative;
        const usvr::ResidualHistogram svr_hist =
            usvr::histogram(r.svr_train_res, r.svr_univ_res, 30, r.epsilon, r.delta);
        const usvr::ResidualHistogram usvr_hist =
            usvr::histogram(r.usvr_train_res, r.usvr_univ_res, 30, r.epsilon, r.delta);
        write_file(prefix + "_hist_svr.csv", svr_hist.to_csv());
        write_file(prefix + "_hist_usvr.csv", usvr_hist.to_csv());
    }
    std::printf("report %s\n", report.scenario.c_str());
    for (const auto& method : report.methods) {
        const usvr::MethodSummary s = method.summary();
        std::printf("  %-12s test_nrms %s +- %s  train_nrms %s\n", method.name.c_str(),
                    fmt4(s.mean_test_nrms).c_str(), fmt4(s.std_test_nrms).c_str(),
                    fmt4(s.mean_train_nrms).c_str());
    }
    if (report.failed_trials > 0)
        std::printf("  failed_trials %d\n", report.failed_trials);
    std::printf("  wrote %s_{summary.json,trials.csv%s}\n", prefix.c_str(),
                report.representative ? ",hist_svr.csv,hist_usvr.csv" : "");
}

int cmd_experiment(const ExperimentArgs& a) {
    usvr::ExperimentConfig cfg;
    bool sweep = false;
    bool real = false;
    if (!a.config.empty()) {
        cfg = usvr::ExperimentConfig::from_json(read_file(a.config));
    } else {
        cfg = usvr::scenario_preset(a.scenario);
        sweep = usvr::scenario_is_sweep(a.scenario);
        real = a.scenario == "cpu" || a.scenario == "rat";
    }
    if (a.trials >= 0) cfg.trials = a.trials;
    if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
    if (a.jobs >= 0) cfg.jobs = a.jobs;
    if (a.tol > 0) cfg.tol = a.tol;
    if (a.universum_type == 1) cfg.universum_type = usvr::UniversumType::Type1;
    if (a.universum_type == 2) cfg.universum_type = usvr::UniversumType::Type2;

    std::filesystem::create_directories(a.out_dir);

    if (real) {
        if (a.data.empty())
            throw usvr::DomainError("scenario '" + a.scenario + "' requires --data");
        const usvr::RealDatasetSpec spec = usvr::real_dataset_preset(a.scenario, a.data);
        emit_report(a.out_dir, usvr::run_real_dataset(spec, cfg));
    } else if (sweep) {
        for (const auto& report : usvr::run_universum_size_sweep(cfg, usvr::sweep_sizes()))
            emit_report(a.out_dir, report);
    } else {
        emit_report(a.out_dir, usvr::run_scenario(cfg));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Support vector regression with universum data"};
    app.require_subcommand(1);

    TrainArgs train;
    CLI::App* t = app.add_subcommand("train", "Fit a model and write it as JSON");
    t->add_option("--data", train.data, "Training CSV")->required()->check(CLI::ExistingFile);
    t->add_option("--val", train.val, "Validation CSV enabling grid selection")->check(CLI::ExistingFile);
    t->add_option("--universum", train.universum, "Universum CSV (same schema as --data)")
        ->check(CLI::ExistingFile);
    t->add_option("--target-column", train.target, "Target column name (default y)");
    t->add_option("--kernel", train.kernel, "linear | poly | rbf (default linear)");
    t->add_option("--degree", train.degree, "Polynomial degree");
    t->add_option("--gamma", train.gamma, "RBF width")->check(CLI::PositiveNumber);
    auto* eps_opt = t->add_option("--epsilon", train.epsilon, "Tube half width")
                        ->check(CLI::NonNegativeNumber);
    auto* c_opt = t->add_option("--c", train.c, "Cost (default max(y)-min(y))")
                      ->check(CLI::PositiveNumber);
    auto* cstar_opt = t->add_option("--cstar", train.cstar, "Universum cost")
                          ->check(CLI::NonNegativeNumber);
    auto* delta_opt = t->add_option("--delta", train.delta, "Universum zone half width")
                          ->check(CLI::NonNegativeNumber);
    t->add_option("--tol", train.tol, "Solver tolerance")->check(CLI::PositiveNumber);
    t->add_flag("--scale", train.scale, "Scale inputs to [-1,1], stored in the model");
    t->add_option("--out", train.out, "Model file (default model.json)");

    PredictArgs predict;
    CLI::App* p = app.add_subcommand("predict", "Apply a model file to a CSV");
    p->add_option("--model", predict.model, "Model JSON from train")->required()->check(CLI::ExistingFile);
    p->add_option("--data", predict.data, "Input CSV; target column optional")
        ->required()
        ->check(CLI::ExistingFile);
    p->add_option("--target-column", predict.target, "Target column name (default y)");
    p->add_option("--out", predict.out, "Predictions CSV (default predictions.csv)");

    UniversumArgs univ;
    CLI::App* u = app.add_subcommand("universum", "Generate universum samples as CSV");
    u->add_option("--strategy", univ.strategy, "1 | 2 | 3 | 4 | hypercube1")->required();
    u->add_option("--m", univ.m, "Number of samples")->required()->check(CLI::PositiveNumber);
    u->add_option("--data", univ.data, "Training CSV (strategies 1-4)")->check(CLI::ExistingFile);
    u->add_option("--seed", univ.seed, "RNG seed (default 0)");
    u->add_option("--target-column", univ.target, "Target column name (default y)");
    u->add_option("--out", univ.out, "Output CSV (default universum.csv)");

    ExperimentArgs exp;
    CLI::App* e = app.add_subcommand("experiment", "Run a benchmark scenario");
    e->add_option("scenario", exp.scenario,
                  "table1-low-noise | table1-high-noise | table2 | table3 | table4 | cpu | rat");
    auto* cfg_opt = e->add_option("--config", exp.config, "Config JSON instead of a preset")
                        ->check(CLI::ExistingFile);
    e->add_option("--data", exp.data, "Dataset CSV for cpu/rat")->check(CLI::ExistingFile);
    e->add_option("--out-dir", exp.out_dir, "Report directory (default .)");
    e->add_option("--trials", exp.trials, "Override trial count")->check(CLI::PositiveNumber);
    e->add_option("--seed", exp.seed, "Override master seed")->check(CLI::NonNegativeNumber);
    e->add_option("--jobs", exp.jobs, "Worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    e->add_option("--tol", exp.tol, "Override solver tolerance")->check(CLI::PositiveNumber);
    e->add_option("--universum-type", exp.universum_type, "1 or 2")->check(CLI::Range(1, 2));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    train.has_epsilon = eps_opt->count() > 0;
    train.has_c = c_opt->count() > 0;
    train.has_gamma = t->count("--gamma") > 0;
    train.has_cstar = cstar_opt->count() > 0;
    train.has_delta = delta_opt->count() > 0;
    if (e->parsed() && exp.scenario.empty() && cfg_opt->count() == 0) {
        std::fprintf(stderr, "error: experiment needs a scenario name or --config\n");
        return 1;
    }

    try {
        if (t->parsed()) return cmd_train(train);
        if (p->parsed()) return cmd_predict(predict);
        if (u->parsed()) return cmd_universum(univ);
        if (e->parsed()) return cmd_experiment(exp);
    } catch (const usvr::NonConvergence& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    } catch (const usvr::IllPosedProblem& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    } catch (const usvr::InconsistentSolution& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    } catch (const usvr::SelectionError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    } catch (const usvr::ScenarioError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    } catch (const usvr::Error& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}

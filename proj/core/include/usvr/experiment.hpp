#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "usvr/dataset.hpp"
#include "usvr/model_selection.hpp"
#include "usvr/universum.hpp"

namespace usvr {

/// Which synthetic universum a scenario trains against: the sign-flipped
/// hypercube target (type 1) or resampled-y training rows (type 2).
enum class UniversumType { Type1, Type2 };

struct ExperimentConfig {
    std::string scenario_id = "custom";
    int n_train = 30;  // validation size always equals n_train
    double sigma = 0.5;
    UniversumType universum_type = UniversumType::Type1;
    int universum_size = 300;
    int trials = 25;
    int n_test = 5000;
    std::uint64_t seed = 12345;
    GridSpec grids = GridSpec::defaults_linear();
    bool include_ridge = true;
    double tol = 1e-3;
    int max_outer = 50;
    int jobs = 0;  // 0 = one worker per hardware thread

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
};

/// One method's errors in one trial. MSE fields use the same target vectors
/// as the NRMS fields (noise-free targets for synthetic data, noisy for real).
struct TrialMetrics {
    int trial = 0;
    double train_nrms = 0.0;
    double test_nrms = 0.0;
    double train_mse = 0.0;
    double test_mse = 0.0;
};

struct MethodSummary {
    double mean_train_nrms = 0.0, std_train_nrms = 0.0;
    double mean_test_nrms = 0.0, std_test_nrms = 0.0;
    double mean_train_mse = 0.0, std_train_mse = 0.0;
    double mean_test_mse = 0.0, std_test_mse = 0.0;
};

struct MethodTrials {
    std::string name;  // "ridge", "svr", "usvr_type1", "usvr_type2"
    std::vector<TrialMetrics> rows;

    /// Mean and sample standard deviation over rows.
    MethodSummary summary() const;
};

/// Per-trial selection and convergence bookkeeping (for the configured
/// U-SVR method; real-data runs emit one detail row per type).
struct TrialDetail {
    int trial = 0;
    std::string method;
    bool failed = false;
    std::string error;
    double svr_c = 0.0, svr_epsilon = 0.0, svr_gamma = 0.0;
    double usvr_ratio = 0.0, usvr_delta = 0.0;
    int outer_iterations = 0;
    bool cccp_converged = false;
    bool cccp_cycled = false;
    /// Largest positive step in the CCCP objective trace (0 = monotone).
    double descent_violation = 0.0;
    double frac_delta_svr = 0.0;
    double frac_delta_usvr = 0.0;
    double piling_svr = 0.0;
};

/// Residual sets of one representative trial, for histogram export.
struct RepresentativeResiduals {
    int trial = 0;
    Eigen::VectorXd svr_train_res, svr_univ_res;
    Eigen::VectorXd usvr_train_res, usvr_univ_res;
    double epsilon = 0.0;
    double delta = 0.0;
};

struct ExperimentReport {
    std::string scenario;
    std::string config_json;
    std::vector<MethodTrials> methods;
    std::vector<TrialDetail> details;
    std::optional<RepresentativeResiduals> representative;
    int failed_trials = 0;

    const MethodTrials* method(const std::string& name) const;

    /// Summary JSON (per-method means/stds plus convergence stats).
    std::string summary_json() const;
    /// Raw per-trial table, full double precision, one row per
    /// (trial, method).
    std::string trials_csv() const;
};

/// Run one synthetic hypercube scenario: per trial generate train/val/test,
/// generate the universum, two-step model selection, final fits, and error
/// evaluation against the noise-free test targets. Trials run concurrently
/// (cfg.jobs workers) on per-trial RNG substreams; results are keyed by
/// trial index so the report is independent of scheduling. Individual trial
/// failures are recorded; more than 20% failures raises ScenarioError.
ExperimentReport run_scenario(const ExperimentConfig& cfg);

/// One report per universum size, with data partitions and universum
/// prefixes shared across sizes within each trial (paired comparison).
std::vector<ExperimentReport> run_universum_size_sweep(const ExperimentConfig& cfg,
                                                       const std::vector<int>& sizes);

/// Preprocessing recipe and split sizes for a real CSV dataset.
struct RealDatasetSpec {
    std::string path;
    std::string target_column;
    std::vector<std::string> categorical_columns;
    std::vector<std::string> drop_columns;
    bool log1p_target = false;
    double scale_low = -1.0;
    double scale_high = 1.0;
    int n_train = 0;
    int n_val = 0;
    int n_test = 0;  // 0 = all remaining rows
    /// Named in the file-missing error message.
    std::string public_source;
};

/// Real-data pipeline: load, drop missing rows, one-hot, optional log(1+y),
/// per-trial split, train-fitted input scaling, universum strategies 1 and 2,
/// two-step selection and evaluation per trial. NRMS/MSE use noisy targets.
ExperimentReport run_real_dataset(const RealDatasetSpec& spec, const ExperimentConfig& cfg);

/// Closed-form ridge baseline (intercept unpenalized).
struct RidgeModel {
    Eigen::VectorXd w;
    double b = 0.0;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};
RidgeModel fit_ridge(const Dataset& train, double lambda);

/// Named scenario presets: table1-low-noise, table1-high-noise, table2,
/// table3, table4, cpu, rat. Throws DomainError for unknown names.
ExperimentConfig scenario_preset(const std::string& name);
bool scenario_is_sweep(const std::string& name);
std::vector<int> sweep_sizes();
RealDatasetSpec real_dataset_preset(const std::string& name, const std::string& path);

}  // namespace usvr

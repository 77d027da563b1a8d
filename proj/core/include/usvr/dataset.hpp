#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace usvr {

/// n samples of d-dimensional inputs with real targets. Immutable by
/// convention after construction; safe to share across threads for reads.
struct Dataset {
    Eigen::MatrixXd inputs;   // n x d
    Eigen::VectorXd targets;  // n

    Eigen::Index n() const { return inputs.rows(); }
    Eigen::Index dim() const { return inputs.cols(); }

    /// Throws if rows/targets disagree or any value is non-finite.
    void validate() const;
};

/// Per-feature affine map fitted by scale_inputs. Serializable to JSON as
/// {feature_min[], feature_max[], low, high}.
struct ScalingParams {
    Eigen::VectorXd feature_min;
    Eigen::VectorXd feature_max;
    double low = -1.0;
    double high = 1.0;

    std::string to_json() const;
    static ScalingParams from_json(const std::string& text);
};

/// Configuration of the synthetic 30-dimensional hypercube benchmark.
struct HypercubeConfig {
    int n = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    static constexpr int dim = 30;
};

/// Dataset plus the noise-free targets it was generated from. The clean
/// targets are carried along rather than recomputed so test error can be
/// evaluated against the true function.
struct HypercubeSample {
    Dataset data;
    Eigen::VectorXd clean_targets;
};

/// Sizes and seed of a random three-way partition.
struct SplitSpec {
    int n_train = 0;
    int n_val = 0;
    int n_test = 0;
    std::uint64_t seed = 0;
};

/// Options for the flexible CSV loader used by real-data pipelines.
struct CsvOptions {
    /// Columns one-hot encoded, categories in first-seen order.
    std::vector<std::string> categorical_columns;
    /// Columns removed entirely (identifiers, alternate targets).
    std::vector<std::string> drop_columns;
    /// Drop rows containing missing cells ("", "?", "NA") instead of erroring.
    bool drop_missing = true;
};

struct LoadReport {
    Dataset data;
    std::vector<std::string> feature_names;
    int dropped_rows = 0;
};

/// Strict loader: header row required, every non-target cell numeric.
/// Errors name the offending row/column.
Dataset load_csv(const std::string& path, const std::string& target_column);

/// Loader with one-hot expansion, column dropping and missing-row removal.
LoadReport load_csv_ex(const std::string& path, const std::string& target_column,
                       const CsvOptions& options);

/// Inputs-only loader: every column is a feature, targets come back empty.
LoadReport load_csv_features(const std::string& path, const CsvOptions& options = {});

/// True if the file's header row contains the named column.
bool csv_has_column(const std::string& path, const std::string& column);

/// Write a dataset in the same schema load_csv reads. Feature names default
/// to x1..xd when not supplied.
void write_csv(const std::string& path, const Dataset& ds,
               const std::vector<std::string>& feature_names = {},
               const std::string& target_name = "y");

/// Fit a per-feature affine map onto [low, high] and apply it. Constant
/// features map to the range midpoint. Targets are untouched.
std::pair<Dataset, ScalingParams> scale_inputs(const Dataset& ds, double low, double high);

/// Apply previously fitted scaling (e.g. train-fitted params to val/test).
Dataset apply_scaling(const Dataset& ds, const ScalingParams& params);

/// Invert apply_scaling. Round-trips to 1e-12 on in-range data.
Dataset invert_scaling(const Dataset& ds, const ScalingParams& params);

/// Replace targets by log(1 + y). Requires all targets > -1.
Dataset log_transform_targets(const Dataset& ds);

/// The alternating five-block sum over a 30-vector:
/// +(x1..x5) -(x6..x10) +(x11..x15) -(x16..x20) +(x21..x25) -(x26..x30).
double hypercube_target(const Eigen::VectorXd& x);

/// Inputs i.i.d. uniform on [0,1]^30, targets hypercube_target(x) plus
/// Normal(0, sigma) noise. Deterministic for a fixed seed.
HypercubeSample hypercube_generate(const HypercubeConfig& cfg);

/// Seed-deterministic disjoint partition into (train, val, test) row sets.
std::tuple<Dataset, Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

/// Row subset by index list, preserving order.
Dataset take_rows(const Dataset& ds, const std::vector<int>& rows);

}  // namespace usvr

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "usvr/dataset.hpp"
#include "usvr/svr.hpp"
#include "usvr/usvr.hpp"

namespace usvr {

/// Grids for the two-step selection. Defaults follow the published ranges:
/// epsilon {0, 2^-1..2^3}, C*/C {2^-4..2^4}, Delta {2^-4..2^4}, and for RBF
/// gamma {2^-6..2^0}.
struct GridSpec {
    std::vector<double> epsilon_grid;
    std::vector<KernelSpec> kernel_grid;
    std::vector<double> cstar_ratio_grid;
    std::vector<double> delta_grid;

    static GridSpec defaults_linear();
    static GridSpec defaults_rbf();
};

struct SelectionEntry {
    int index = 0;
    double epsilon = 0.0;
    KernelSpec kernel;
    double cstar_ratio = 0.0;
    double delta = 0.0;
    double val_nrms = 0.0;
    bool failed = false;
};

struct SelectionReport {
    std::vector<SelectionEntry> table;
    int chosen_index = -1;
    int ties = 0;      // grid points sharing the minimum beyond the first
    int failures = 0;  // grid points whose fit threw

    std::string to_csv() const;
    std::string to_json() const;
};

/// Normalized RMS error in percent: 100 * sqrt(mean((t - p)^2)) / std(t),
/// population std. Throws DomainError for constant y_true.
double nrms(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

/// Analytic C choice: max(y) - min(y) over the training targets.
double default_c(const Dataset& train);

/// Step 1: fix C = default_c(train), sweep epsilon x kernel grid
/// (epsilon-major order), score validation NRMS, argmin with lowest-index
/// tie break.
std::pair<SvrHyperParams, SelectionReport> select_svr(const Dataset& train,
                                                      const Dataset& val,
                                                      const GridSpec& grid,
                                                      double tol = 1e-3);

/// Step 2: keep the step-1 parameters fixed, sweep (C*/C) x Delta
/// (ratio-major order) with fit_usvr, argmin validation NRMS. Failed grid
/// points are counted and skipped; if all fail, SelectionError.
std::pair<UsvrHyperParams, SelectionReport> select_usvr(const Dataset& train,
                                                        const Dataset& val,
                                                        const UniversumSet& universum,
                                                        const SvrHyperParams& fixed,
                                                        const GridSpec& grid,
                                                        double tol = 1e-3);

}  // namespace usvr

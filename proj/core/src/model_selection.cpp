#include "usvr/model_selection.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "usvr/errors.hpp"

namespace usvr {

namespace {

std::vector<double> pow2_grid(int lo, int hi) {
    std::vector<double> g;
    for (int e = lo; e <= hi; ++e) g.push_back(std::ldexp(1.0, e));
    return g;
}

std::string fmt_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json entry_json(const SelectionEntry& e) {
    return {{"index", e.index},       {"epsilon", e.epsilon},
            {"kernel", e.kernel.describe()}, {"cstar_ratio", e.cstar_ratio},
            {"delta", e.delta},       {"val_nrms", e.val_nrms},
            {"failed", e.failed}};
}

// Argmin over non-failed entries, lowest index on ties; fills chosen_index,
// ties and failures. Throws when every entry failed.
void finalize(SelectionReport& report, const std::string& what) {
    double best = 0.0;
    for (const auto& e : report.table) {
        if (e.failed) {
            ++report.failures;
            continue;
        }
        if (report.chosen_index < 0 || e.val_nrms < best) {
            report.chosen_index = e.index;
            best = e.val_nrms;
        }
    }
    if (report.chosen_index < 0)
        throw SelectionError("every grid point failed during " + what + " selection");
    for (const auto& e : report.table)
        if (!e.failed && e.val_nrms == best && e.index != report.chosen_index) ++report.ties;
}

}  // namespace

GridSpec GridSpec::defaults_linear() {
    GridSpec g;
    g.epsilon_grid = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    g.kernel_grid = {KernelSpec::linear()};
    g.cstar_ratio_grid = pow2_grid(-4, 4);
    g.delta_grid = pow2_grid(-4, 4);
    return g;
}

GridSpec GridSpec::defaults_rbf() {
    GridSpec g = defaults_linear();
    g.kernel_grid.clear();
    for (double gamma : pow2_grid(-6, 0)) g.kernel_grid.push_back(KernelSpec::rbf(gamma));
    return g;
}

std::string SelectionReport::to_csv() const {
    std::ostringstream out;
    out << "index,epsilon,kernel,cstar_ratio,delta,val_nrms,failed\n";
    for (const auto& e : table)
        out << e.index << ',' << fmt_full(e.epsilon) << ',' << e.kernel.describe() << ','
            << fmt_full(e.cstar_ratio) << ',' << fmt_full(e.delta) << ','
            << fmt_full(e.val_nrms) << ',' << (e.failed ? 1 : 0) << '\n';
    return out.str();
}

std::string SelectionReport::to_json() const {
    nlohmann::json j;
    j["chosen_index"] = chosen_index;
    j["ties"] = ties;
    j["failures"] = failures;
    j["table"] = nlohmann::json::array();
    for (const auto& e : table) j["table"].push_back(entry_json(e));
    return j.dump();
}

double nrms(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    if (y_true.size() != y_pred.size())
        throw DimensionError("nrms: prediction and target lengths differ");
    if (y_true.size() == 0) throw DomainError("nrms of an empty vector");
    const double mean = y_true.mean();
    const double var = (y_true.array() - mean).square().sum() / double(y_true.size());
    if (var == 0.0) throw DomainError("nrms undefined for constant targets");
    const double mse = (y_true - y_pred).squaredNorm() / double(y_true.size());
    return 100.0 * std::sqrt(mse / var);
}

double default_c(const Dataset& train) {
    if (train.n() < 1) throw DomainError("default_c of an empty dataset");
    const double range = train.targets.maxCoeff() - train.targets.minCoeff();
    if (range <= 0.0) throw DomainError("default_c undefined for constant targets");
    return range;
}

std::pair<SvrHyperParams, SelectionReport> select_svr(const Dataset& train, const Dataset& val,
                                                      const GridSpec& grid, double tol) {
    if (grid.epsilon_grid.empty() || grid.kernel_grid.empty())
        throw SelectionError("svr selection needs non-empty epsilon and kernel grids");
    const double c = default_c(train);
    SelectionReport report;
    int index = 0;
    for (double epsilon : grid.epsilon_grid)
        for (const KernelSpec& kernel : grid.kernel_grid) {
            SelectionEntry e;
            e.index = index++;
            e.epsilon = epsilon;
            e.kernel = kernel;
            try {
                SvrHyperParams params{c, epsilon, kernel};
                auto [model, diag] = fit_svr(train, params, tol);
                e.val_nrms = nrms(val.targets, model.predict(val.inputs));
            } catch (const Error&) {
                e.failed = true;
            }
            report.table.push_back(e);
        }
    finalize(report, "svr");
    const SelectionEntry& chosen = report.table[static_cast<size_t>(report.chosen_index)];
    return {SvrHyperParams{c, chosen.epsilon, chosen.kernel}, report};
}

std::pair<UsvrHyperParams, SelectionReport> select_usvr(const Dataset& train, const Dataset& val,
                                                        const UniversumSet& universum,
                                                        const SvrHyperParams& fixed,
                                                        const GridSpec& grid, double tol) {
    if (grid.cstar_ratio_grid.empty() || grid.delta_grid.empty())
        throw SelectionError("usvr selection needs non-empty ratio and delta grids");
    SelectionReport report;
    int index = 0;
    for (double ratio : grid.cstar_ratio_grid)
        for (double delta : grid.delta_grid) {
            SelectionEntry e;
            e.index = index++;
            e.epsilon = fixed.epsilon;
            e.kernel = fixed.kernel;
            e.cstar_ratio = ratio;
            e.delta = delta;
            try {
                UsvrHyperParams params{fixed, ratio * fixed.c, delta};
                auto [model, diag, state] = fit_usvr(train, universum, params, tol);
                e.val_nrms = nrms(val.targets, model.predict(val.inputs));
            } catch (const Error&) {
                e.failed = true;
            }
            report.table.push_back(e);
        }
    finalize(report, "usvr");
    const SelectionEntry& chosen = report.table[static_cast<size_t>(report.chosen_index)];
    return {UsvrHyperParams{fixed, chosen.cstar_ratio * fixed.c, chosen.delta}, report};
}

}  // namespace usvr

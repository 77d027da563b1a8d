#include "usvr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "usvr/errors.hpp"

namespace usvr {

namespace {

std::string fmt_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string ResidualHistogram::to_csv() const {
    std::ostringstream out;
    out << "# epsilon=" << fmt_full(epsilon) << "\n# delta=" << fmt_full(delta) << '\n';
    out << "bin_left,bin_right,train_count,universum_count\n";
    for (Eigen::Index b = 0; b < train_counts.size(); ++b)
        out << fmt_full(edges[b]) << ',' << fmt_full(edges[b + 1]) << ',' << train_counts[b]
            << ',' << universum_counts[b] << '\n';
    return out.str();
}

Eigen::VectorXd residuals(const Model& model, const Dataset& ds) {
    ds.validate();
    return ds.targets - model.predict(ds.inputs);
}

ResidualHistogram histogram(const Eigen::VectorXd& train_res, const Eigen::VectorXd& univ_res,
                            int bins, double epsilon, double delta) {
    if (bins < 1) throw DomainError("histogram needs at least one bin");
    if (train_res.size() + univ_res.size() == 0)
        throw DomainError("histogram of two empty residual sets");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* v : {&train_res, &univ_res})
        for (Eigen::Index i = 0; i < v->size(); ++i) {
            lo = std::min(lo, (*v)[i]);
            hi = std::max(hi, (*v)[i]);
        }
    const double span = hi - lo;
    const double pad = span > 0 ? 0.05 * span : std::max(1.0, std::abs(lo)) * 0.05;
    lo -= pad;
    hi += pad;

    ResidualHistogram h;
    h.epsilon = epsilon;
    h.delta = delta;
    h.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * double(b) / double(bins);
    h.train_counts = Eigen::VectorXi::Zero(bins);
    h.universum_counts = Eigen::VectorXi::Zero(bins);
    auto bucket = [&](double r) {
        int b = static_cast<int>(double(bins) * (r - lo) / (hi - lo));
        return std::clamp(b, 0, bins - 1);
    };
    for (Eigen::Index i = 0; i < train_res.size(); ++i) ++h.train_counts[bucket(train_res[i])];
    for (Eigen::Index i = 0; i < univ_res.size(); ++i) ++h.universum_counts[bucket(univ_res[i])];
    return h;
}

double fraction_within_delta(const Eigen::VectorXd& univ_res, double delta) {
    if (delta < 0.0) throw DomainError("fraction_within_delta needs delta >= 0");
    if (univ_res.size() == 0) throw DomainError("fraction_within_delta of an empty residual set");
    Eigen::Index within = 0;
    for (Eigen::Index i = 0; i < univ_res.size(); ++i)
        if (std::abs(univ_res[i]) <= delta) ++within;
    return double(within) / double(univ_res.size());
}

double data_piling_index(const Eigen::VectorXd& train_res, double epsilon, double tol) {
    if (train_res.size() == 0) throw DomainError("data_piling_index of an empty residual set");
    if (epsilon < 0.0) throw DomainError("data_piling_index needs epsilon >= 0");
    if (tol < 0.0) tol = std::max(1e-6, 0.01 * epsilon);
    Eigen::Index piled = 0;
    for (Eigen::Index i = 0; i < train_res.size(); ++i)
        if (std::abs(std::abs(train_res[i]) - epsilon) <= tol) ++piled;
    return double(piled) / double(train_res.size());
}

}  // namespace usvr

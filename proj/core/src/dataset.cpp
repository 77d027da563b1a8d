#include "usvr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "usvr/errors.hpp"
#include "usvr/rng.hpp"

namespace usvr {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// Comma split with minimal quote handling ("" escapes a quote).
std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool is_missing(const std::string& s) { return s.empty() || s == "?" || s == "NA"; }

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + s.size() && std::isfinite(out);
}

enum class Role { Numeric, Target, Categorical, Drop };

int find_column(const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

std::string fmt_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void Dataset::validate() const {
    if (targets.size() != inputs.rows())
        throw DimensionError("dataset has " + std::to_string(inputs.rows()) + " rows but " +
                             std::to_string(targets.size()) + " targets");
    if (!inputs.allFinite() || !targets.allFinite())
        throw DomainError("dataset contains non-finite values");
}

std::string ScalingParams::to_json() const {
    nlohmann::json j;
    j["feature_min"] = std::vector<double>(feature_min.begin(), feature_min.end());
    j["feature_max"] = std::vector<double>(feature_max.begin(), feature_max.end());
    j["low"] = low;
    j["high"] = high;
    return j.dump();
}

ScalingParams ScalingParams::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ScalingParams p;
    auto mn = j.at("feature_min").get<std::vector<double>>();
    auto mx = j.at("feature_max").get<std::vector<double>>();
    p.feature_min = Eigen::Map<const Eigen::VectorXd>(mn.data(), static_cast<Eigen::Index>(mn.size()));
    p.feature_max = Eigen::Map<const Eigen::VectorXd>(mx.data(), static_cast<Eigen::Index>(mx.size()));
    p.low = j.at("low").get<double>();
    p.high = j.at("high").get<double>();
    if (p.feature_min.size() != p.feature_max.size())
        throw DimensionError("scaling params: feature_min/feature_max length mismatch");
    return p;
}

namespace {

// Shared CSV loading core; an empty target name loads every column as a
// feature and returns empty targets.
LoadReport load_csv_impl(const std::string& path, const std::string& target_column,
                         const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::vector<std::pair<int, std::string>> lines;  // (file line number, text)
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (trim(raw).empty()) continue;
        lines.emplace_back(lineno, raw);
    }
    if (lines.empty()) throw IoError("'" + path + "' is empty");

    const std::vector<std::string> header = split_line(lines[0].second);
    const int ncols = static_cast<int>(header.size());

    std::vector<Role> role(header.size(), Role::Numeric);
    const bool want_target = !target_column.empty();
    const int target_idx = want_target ? find_column(header, target_column) : -1;
    if (want_target && target_idx < 0)
        throw IoError("'" + path + "' has no column named '" + target_column + "'");
    if (target_idx >= 0) role[target_idx] = Role::Target;
    for (const auto& name : options.drop_columns) {
        int idx = find_column(header, name);
        if (idx < 0) throw IoError("'" + path + "' has no column named '" + name + "' (drop list)");
        if (idx == target_idx) throw IoError("cannot drop target column '" + name + "'");
        role[idx] = Role::Drop;
    }
    for (const auto& name : options.categorical_columns) {
        int idx = find_column(header, name);
        if (idx < 0)
            throw IoError("'" + path + "' has no column named '" + name + "' (categorical list)");
        if (role[idx] != Role::Numeric)
            throw IoError("column '" + name + "' listed as categorical conflicts with another role");
        role[idx] = Role::Categorical;
    }

    LoadReport report;
    std::vector<std::pair<int, std::vector<std::string>>> rows;
    for (size_t li = 1; li < lines.size(); ++li) {
        const auto& [ln, text] = lines[li];
        std::vector<std::string> fields = split_line(text);
        if (static_cast<int>(fields.size()) != ncols)
            throw IoError(path + ":" + std::to_string(ln) + ": expected " + std::to_string(ncols) +
                          " fields, got " + std::to_string(fields.size()));
        bool missing = false;
        for (int j = 0; j < ncols && !missing; ++j)
            if (role[j] != Role::Drop && is_missing(fields[j])) {
                if (!options.drop_missing)
                    throw IoError(path + ":" + std::to_string(ln) + ": missing value in column '" +
                                  header[j] + "'");
                missing = true;
            }
        if (missing) {
            ++report.dropped_rows;
            continue;
        }
        rows.emplace_back(ln, std::move(fields));
    }

    // Category discovery in first-seen order.
    std::vector<std::vector<std::string>> categories(header.size());
    std::vector<std::unordered_map<std::string, int>> cat_index(header.size());
    for (const auto& [ln, fields] : rows)
        for (int j = 0; j < ncols; ++j)
            if (role[j] == Role::Categorical) {
                auto& idx = cat_index[j];
                if (idx.emplace(fields[j], static_cast<int>(categories[j].size())).second)
                    categories[j].push_back(fields[j]);
            }

    int width = 0;
    for (int j = 0; j < ncols; ++j) {
        if (role[j] == Role::Numeric) {
            report.feature_names.push_back(header[j]);
            ++width;
        } else if (role[j] == Role::Categorical) {
            for (const auto& cat : categories[j]) report.feature_names.push_back(header[j] + "=" + cat);
            width += static_cast<int>(categories[j].size());
        }
    }

    const int n = static_cast<int>(rows.size());
    report.data.inputs = Eigen::MatrixXd::Zero(n, width);
    report.data.targets.resize(want_target ? n : 0);
    for (int r = 0; r < n; ++r) {
        const auto& [ln, fields] = rows[r];
        int col = 0;
        for (int j = 0; j < ncols; ++j) {
            switch (role[j]) {
                case Role::Drop:
                    break;
                case Role::Target: {
                    double v;
                    if (!parse_double(fields[j], v))
                        throw IoError(path + ":" + std::to_string(ln) + ": column '" + header[j] +
                                      "': cannot parse '" + fields[j] + "' as a number");
                    report.data.targets[r] = v;
                    break;
                }
                case Role::Numeric: {
                    double v;
                    if (!parse_double(fields[j], v))
                        throw IoError(path + ":" + std::to_string(ln) + ": column '" + header[j] +
                                      "': cannot parse '" + fields[j] + "' as a number");
                    report.data.inputs(r, col++) = v;
                    break;
                }
                case Role::Categorical: {
                    report.data.inputs(r, col + cat_index[j].at(fields[j])) = 1.0;
                    col += static_cast<int>(categories[j].size());
                    break;
                }
            }
        }
    }
    return report;
}

}  // namespace

LoadReport load_csv_ex(const std::string& path, const std::string& target_column,
                       const CsvOptions& options) {
    if (target_column.empty()) throw IoError("target column name is empty");
    return load_csv_impl(path, target_column, options);
}

LoadReport load_csv_features(const std::string& path, const CsvOptions& options) {
    return load_csv_impl(path, "", options);
}

bool csv_has_column(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string header;
    while (std::getline(in, header)) {
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (!trim(header).empty()) break;
    }
    const auto names = split_line(header);
    return find_column(names, column) >= 0;
}

Dataset load_csv(const std::string& path, const std::string& target_column) {
    CsvOptions strict;
    strict.drop_missing = false;
    return load_csv_ex(path, target_column, strict).data;
}

void write_csv(const std::string& path, const Dataset& ds,
               const std::vector<std::string>& feature_names, const std::string& target_name) {
    std::vector<std::string> names = feature_names;
    if (names.empty())
        for (Eigen::Index j = 0; j < ds.dim(); ++j) names.push_back("x" + std::to_string(j + 1));
    if (static_cast<Eigen::Index>(names.size()) != ds.dim())
        throw DimensionError("write_csv: " + std::to_string(names.size()) + " names for " +
                             std::to_string(ds.dim()) + " features");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (const auto& name : names) out << name << ',';
    out << target_name << '\n';
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        for (Eigen::Index j = 0; j < ds.dim(); ++j) out << fmt_full(ds.inputs(i, j)) << ',';
        out << fmt_full(ds.targets[i]) << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::pair<Dataset, ScalingParams> scale_inputs(const Dataset& ds, double low, double high) {
    if (!(low < high)) throw DomainError("scale_inputs: low must be less than high");
    ScalingParams p;
    p.feature_min = ds.inputs.colwise().minCoeff();
    p.feature_max = ds.inputs.colwise().maxCoeff();
    p.low = low;
    p.high = high;
    return {apply_scaling(ds, p), p};
}

Dataset apply_scaling(const Dataset& ds, const ScalingParams& p) {
    if (ds.dim() != p.feature_min.size())
        throw DimensionError("apply_scaling: dataset has " + std::to_string(ds.dim()) +
                             " features, params have " + std::to_string(p.feature_min.size()));
    Dataset out = ds;
    const double mid = 0.5 * (p.low + p.high);
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
        const double range = p.feature_max[j] - p.feature_min[j];
        if (range == 0.0) {
            out.inputs.col(j).setConstant(mid);
        } else {
            const double scale = (p.high - p.low) / range;
            out.inputs.col(j) = (ds.inputs.col(j).array() - p.feature_min[j]) * scale + p.low;
        }
    }
    return out;
}

Dataset invert_scaling(const Dataset& ds, const ScalingParams& p) {
    if (ds.dim() != p.feature_min.size())
        throw DimensionError("invert_scaling: dataset has " + std::to_string(ds.dim()) +
                             " features, params have " + std::to_string(p.feature_min.size()));
    Dataset out = ds;
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
        const double range = p.feature_max[j] - p.feature_min[j];
        if (range == 0.0) {
            out.inputs.col(j).setConstant(p.feature_min[j]);
        } else {
            const double scale = range / (p.high - p.low);
            out.inputs.col(j) = (ds.inputs.col(j).array() - p.low) * scale + p.feature_min[j];
        }
    }
    return out;
}

Dataset log_transform_targets(const Dataset& ds) {
    if ((ds.targets.array() <= -1.0).any())
        throw DomainError("log target transform requires all targets > -1");
    Dataset out = ds;
    out.targets = ds.targets.array().log1p();
    return out;
}

double hypercube_target(const Eigen::VectorXd& x) {
    if (x.size() != HypercubeConfig::dim)
        throw DimensionError("hypercube target expects " + std::to_string(HypercubeConfig::dim) +
                             " features, got " + std::to_string(x.size()));
    double t = 0.0;
    for (int block = 0; block < 6; ++block) {
        const double sign = (block % 2 == 0) ? 1.0 : -1.0;
        t += sign * x.segment(5 * block, 5).sum();
    }
    return t;
}

HypercubeSample hypercube_generate(const HypercubeConfig& cfg) {
    if (cfg.n < 0) throw DomainError("hypercube_generate: negative sample count");
    if (cfg.sigma < 0) throw DomainError("hypercube_generate: negative noise level");
    Rng rng(cfg.seed);
    HypercubeSample s;
    s.data.inputs.resize(cfg.n, HypercubeConfig::dim);
    for (int i = 0; i < cfg.n; ++i)
        for (int j = 0; j < HypercubeConfig::dim; ++j) s.data.inputs(i, j) = rng.uniform01();
    s.clean_targets.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i) s.clean_targets[i] = hypercube_target(s.data.inputs.row(i));
    // Inputs are drawn before any noise so the design is identical across
    // noise levels for a fixed seed.
    s.data.targets = s.clean_targets;
    if (cfg.sigma > 0)
        for (int i = 0; i < cfg.n; ++i) s.data.targets[i] += rng.normal(0.0, cfg.sigma);
    return s;
}

std::tuple<Dataset, Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
    if (spec.n_train < 0 || spec.n_val < 0 || spec.n_test < 0)
        throw DomainError("split: negative partition size");
    const long total = long(spec.n_train) + spec.n_val + spec.n_test;
    if (total > ds.n())
        throw DomainError("split: requested " + std::to_string(total) + " rows from " +
                          std::to_string(ds.n()));
    std::vector<int> order(static_cast<size_t>(ds.n()));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(spec.seed);
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<size_t>(rng.below(i))]);
    auto slice = [&](int begin, int count) {
        std::vector<int> rows(order.begin() + begin, order.begin() + begin + count);
        return take_rows(ds, rows);
    };
    return {slice(0, spec.n_train), slice(spec.n_train, spec.n_val),
            slice(spec.n_train + spec.n_val, spec.n_test)};
}

Dataset take_rows(const Dataset& ds, const std::vector<int>& rows) {
    Dataset out;
    out.inputs.resize(static_cast<Eigen::Index>(rows.size()), ds.dim());
    out.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= ds.n())
            throw DomainError("take_rows: index " + std::to_string(rows[i]) + " out of range");
        out.inputs.row(static_cast<Eigen::Index>(i)) = ds.inputs.row(rows[i]);
        out.targets[static_cast<Eigen::Index>(i)] = ds.targets[rows[i]];
    }
    return out;
}

}  // namespace usvr

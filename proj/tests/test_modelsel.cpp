#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "doctest.h"
#include "json.hpp"
#include "usvr/errors.hpp"
#include "usvr/model_selection.hpp"

using namespace usvr;

namespace {

Dataset line_data(std::initializer_list<double> xs) {
    Dataset ds;
    ds.inputs.resize(static_cast<Eigen::Index>(xs.size()), 1);
    ds.targets.resize(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        ds.inputs(i, 0) = x;
        ds.targets[i] = 2.0 * x;
        ++i;
    }
    return ds;
}

}  // namespace

TEST_CASE("nrms normalizes by the population deviation of the truth") {
    Eigen::VectorXd t(2), p(2);
    t << 0.0, 2.0;

    p << 0.0, 2.0;
    CHECK(nrms(t, p) == doctest::Approx(0.0));

    p << 1.0, 1.0;  // predicting the mean scores exactly 100
    CHECK(nrms(t, p) == doctest::Approx(100.0));

    p << 0.0, 3.0;  // mse 0.5 over variance 1
    CHECK(nrms(t, p) == doctest::Approx(100.0 * std::sqrt(0.5)));

    Eigen::VectorXd constant = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(nrms(constant, p), DomainError);
    Eigen::VectorXd three = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(nrms(t, three), DimensionError);
    Eigen::VectorXd empty;
    CHECK_THROWS_AS(nrms(empty, empty), DomainError);
}

TEST_CASE("default box size is the target range") {
    const Dataset ds = line_data({-1.0, 0.25, 1.0});
    CHECK(default_c(ds) == doctest::Approx(4.0));

    Dataset constant = ds;
    constant.targets.setConstant(3.0);
    CHECK_THROWS_AS(default_c(constant), DomainError);
}

TEST_CASE("default grids are dyadic") {
    const GridSpec lin = GridSpec::defaults_linear();
    CHECK(lin.epsilon_grid == std::vector<double>{0.0, 0.5, 1.0, 2.0, 4.0, 8.0});
    REQUIRE(lin.kernel_grid.size() == 1);
    CHECK(lin.kernel_grid[0] == KernelSpec::linear());
    REQUIRE(lin.cstar_ratio_grid.size() == 9);
    REQUIRE(lin.delta_grid.size() == 9);
    for (int e = -4; e <= 4; ++e) {
        CHECK(lin.cstar_ratio_grid[static_cast<size_t>(e + 4)] == std::ldexp(1.0, e));
        CHECK(lin.delta_grid[static_cast<size_t>(e + 4)] == std::ldexp(1.0, e));
    }

    const GridSpec rbf = GridSpec::defaults_rbf();
    REQUIRE(rbf.kernel_grid.size() == 7);
    for (int e = -6; e <= 0; ++e)
        CHECK(rbf.kernel_grid[static_cast<size_t>(e + 6)] == KernelSpec::rbf(std::ldexp(1.0, e)));
    CHECK(rbf.epsilon_grid == lin.epsilon_grid);
}

TEST_CASE("step one picks the interpolating epsilon on noiseless data") {
    const Dataset train = line_data({-1.0, -0.5, 0.0, 0.5, 1.0});
    const Dataset val = line_data({-0.75, -0.25, 0.25, 0.75});

    const auto [params, report] = select_svr(train, val, GridSpec::defaults_linear(), 1e-6);
    CHECK(params.epsilon == 0.0);
    CHECK(params.c == doctest::Approx(4.0));
    CHECK(params.kernel == KernelSpec::linear());
    CHECK(report.table.size() == 6);
    CHECK(report.chosen_index == 0);
    CHECK(report.failures == 0);
    CHECK(report.table[0].val_nrms < 1.0);
    // Wider tubes flatten the fit and lose on validation.
    CHECK(report.table[1].val_nrms > report.table[0].val_nrms + 1.0);
}

TEST_CASE("grid sweep runs epsilon-major and records every point") {
    const Dataset train = line_data({-1.0, -0.5, 0.0, 0.5, 1.0});
    const Dataset val = line_data({-0.75, 0.75});
    GridSpec grid;
    grid.epsilon_grid = {0.0, 1.0};
    grid.kernel_grid = {KernelSpec::linear(), KernelSpec::rbf(0.5)};

    const auto [params, report] = select_svr(train, val, grid, 1e-5);
    REQUIRE(report.table.size() == 4);
    CHECK(report.table[0].epsilon == 0.0);
    CHECK(report.table[0].kernel == KernelSpec::linear());
    CHECK(report.table[1].epsilon == 0.0);
    CHECK(report.table[1].kernel == KernelSpec::rbf(0.5));
    CHECK(report.table[2].epsilon == 1.0);
    CHECK(report.table[2].kernel == KernelSpec::linear());
    for (const auto& e : report.table) CHECK(e.index == &e - report.table.data());
}

TEST_CASE("exact ties resolve to the lowest index and are counted") {
    const Dataset train = line_data({-1.0, 0.0, 1.0});
    const Dataset val = line_data({-0.5, 0.5});
    GridSpec grid;
    grid.epsilon_grid = {1.0, 1.0};  // duplicate grid point: identical fits
    grid.kernel_grid = {KernelSpec::linear()};

    const auto [params, report] = select_svr(train, val, grid, 1e-6);
    CHECK(report.chosen_index == 0);
    CHECK(report.ties == 1);
}

TEST_CASE("a sweep where every point fails raises SelectionError") {
    const Dataset train = line_data({-1.0, 0.0, 1.0});
    Dataset val = line_data({-0.5, 0.5});
    val.targets.setConstant(1.0);  // constant truth makes scoring impossible

    CHECK_THROWS_AS(select_svr(train, val, GridSpec::defaults_linear(), 1e-5),
                    SelectionError);
    CHECK_THROWS_AS(select_svr(train, val, GridSpec{}, 1e-5), SelectionError);
}

TEST_CASE("step two keeps the step-one parameters frozen") {
    const Dataset train = line_data({-1.0, -0.5, 0.0, 0.5, 1.0});
    const Dataset val = line_data({-0.75, -0.25, 0.25, 0.75});
    UniversumSet u;
    u.inputs.resize(4, 1);
    u.inputs << -0.6, -0.2, 0.2, 0.6;
    u.targets.resize(4);
    u.targets << 1.0, -1.0, 1.0, -1.0;

    SvrHyperParams fixed;
    fixed.c = 2.0;
    fixed.epsilon = 0.1;
    fixed.kernel = KernelSpec::linear();

    GridSpec grid;
    grid.cstar_ratio_grid = {0.5, 1.0};
    grid.delta_grid = {0.25, 0.5};

    const auto [params, report] = select_usvr(train, val, u, fixed, grid, 1e-5);
    CHECK(params.base.c == fixed.c);
    CHECK(params.base.epsilon == fixed.epsilon);
    CHECK(params.base.kernel == fixed.kernel);

    REQUIRE(report.table.size() == 4);
    // ratio-major order
    CHECK(report.table[0].cstar_ratio == 0.5);
    CHECK(report.table[0].delta == 0.25);
    CHECK(report.table[1].cstar_ratio == 0.5);
    CHECK(report.table[1].delta == 0.5);
    CHECK(report.table[2].cstar_ratio == 1.0);
    for (const auto& e : report.table) {
        CHECK(e.epsilon == fixed.epsilon);
        CHECK(e.kernel == fixed.kernel);
    }

    REQUIRE(report.chosen_index >= 0);
    const SelectionEntry& chosen = report.table[static_cast<size_t>(report.chosen_index)];
    CHECK(params.cstar == doctest::Approx(chosen.cstar_ratio * fixed.c));
    CHECK(params.delta == chosen.delta);
}

TEST_CASE("selection reports serialize to CSV and JSON") {
    const Dataset train = line_data({-1.0, 0.0, 1.0});
    const Dataset val = line_data({-0.5, 0.5});
    GridSpec grid;
    grid.epsilon_grid = {0.0, 0.5};
    grid.kernel_grid = {KernelSpec::linear()};
    const auto [params, report] = select_svr(train, val, grid, 1e-5);

    const std::string csv = report.to_csv();
    std::istringstream lines(csv);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "index,epsilon,kernel,cstar_ratio,delta,val_nrms,failed");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 6);
    }
    CHECK(rows == 2);

    const nlohmann::json j = nlohmann::json::parse(report.to_json());
    CHECK(j.at("chosen_index").get<int>() == report.chosen_index);
    CHECK(j.at("failures").get<int>() == 0);
    CHECK(j.at("table").size() == 2);
    CHECK(j.at("table")[0].at("kernel").get<std::string>() == "linear");
    // val_nrms survives the %.17g round trip exactly
    CHECK(j.at("table")[0].at("val_nrms").get<double>() ==
          doctest::Approx(report.table[0].val_nrms));
}

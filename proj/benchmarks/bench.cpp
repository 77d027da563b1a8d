// Microbenchmarks for the hot paths: Gram construction, the SMO solver,
// and full (U-)SVR fits at hypercube-benchmark sizes.

#include <memory>

#include <benchmark/benchmark.h>

#include "usvr/dataset.hpp"
#include "usvr/kernel.hpp"
#include "usvr/model_selection.hpp"
#include "usvr/qp.hpp"
#include "usvr/svr.hpp"
#include "usvr/universum.hpp"
#include "usvr/usvr.hpp"

using namespace usvr;

namespace {

Dataset hypercube_train(int n, std::uint64_t seed) {
    HypercubeConfig cfg;
    cfg.n = n;
    cfg.sigma = 0.5;
    cfg.seed = seed;
    return hypercube_generate(cfg).data;
}

void bm_gram_rbf(benchmark::State& state) {
    const Dataset ds = hypercube_train(static_cast<int>(state.range(0)), 7);
    const KernelSpec k = KernelSpec::rbf(0.125);
    for (auto _ : state) benchmark::DoNotOptimize(gram(k, ds.inputs, ds.inputs));
}

void bm_smo_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dataset ds = hypercube_train(n, 11);
    QpProblem p;
    p.gram = std::make_shared<const Eigen::MatrixXd>(
        gram(KernelSpec::linear(), ds.inputs, ds.inputs));
    p.y = ds.targets;
    p.rho = Eigen::VectorXd::Constant(n, 0.5);
    p.cost = Eigen::VectorXd::Constant(n, default_c(ds));
    p.shift_alpha = Eigen::VectorXd::Zero(n);
    p.shift_beta = Eigen::VectorXd::Zero(n);
    p.n_train = n;
    for (auto _ : state) benchmark::DoNotOptimize(solve(p, 1e-3));
}

void bm_fit_svr(benchmark::State& state) {
    const Dataset ds = hypercube_train(static_cast<int>(state.range(0)), 13);
    SvrHyperParams params;
    params.c = default_c(ds);
    params.epsilon = 0.5;
    for (auto _ : state) benchmark::DoNotOptimize(fit_svr(ds, params));
}

void bm_fit_usvr(benchmark::State& state) {
    const Dataset ds = hypercube_train(30, 17);
    const UniversumSet u = hypercube_universum1(static_cast<int>(state.range(0)), 19);
    UsvrHyperParams params;
    params.base.c = default_c(ds);
    params.base.epsilon = 0.5;
    params.cstar = 0.25 * params.base.c;
    params.delta = 0.5;
    for (auto _ : state) benchmark::DoNotOptimize(fit_usvr(ds, u, params));
}

}  // namespace

BENCHMARK(bm_gram_rbf)->Arg(30)->Arg(150)->Arg(500);
BENCHMARK(bm_smo_solve)->Arg(30)->Arg(150)->Arg(500);
BENCHMARK(bm_fit_svr)->Arg(30)->Arg(150);
BENCHMARK(bm_fit_usvr)->Arg(50)->Arg(300);

BENCHMARK_MAIN();

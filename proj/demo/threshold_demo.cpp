// Random forest vs OLS on a regime-switching process that a linear model cannot see.
//
//   threshold_demo [seed]

#include "rfcast/backtest.hpp"
#include "rfcast/parallel.hpp"
#include "rfcast/synthetic.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    auto problem = rfcast::synthetic::threshold_problem(seed);
    rfcast::BacktestOptions opts;
    opts.workers = rfcast::default_worker_count();

    for (auto model : {rfcast::ModelKind::random_forest, rfcast::ModelKind::ols_linear}) {
        problem.config.model = model;
        const auto records = rfcast::run_backtest(problem.config, problem.dataset, opts);
        const auto report = rfcast::evaluate(records);
        std::printf("%-14s slope %.3f (%.3f)  constant %.3f (%.3f)  adj R2 %.3f  n=%zu\n",
                    std::string(rfcast::to_string(model)).c_str(), report.fit.slope(), report.fit.slope_se(),
                    report.fit.intercept, report.fit.intercept_se(), report.fit.adj_r2, report.n);
    }
    return 0;
}

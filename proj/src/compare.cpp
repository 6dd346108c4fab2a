#include "lagdeconv/compare.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lagdeconv/errors.hpp"

namespace lagdeconv {

namespace {

double grid_risk(std::span<const double> fhat, std::span<const double> truth) {
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = fhat[i] - truth[i];
        acc += d * d;
    }
    return acc / static_cast<double>(truth.size());
}

}  // namespace

ComparisonReport run_comparison(const Scenario& scenario, const SweepConfig& sweep) {
    const auto t_start = std::chrono::steady_clock::now();
    if (scenario.reps < 1) throw ValidationError("run_comparison: reps must be at least 1");

    ComparisonReport report;
    report.laguerre_report = monte_carlo(scenario);
    const ScenarioData& data = report.laguerre_report.data;

    const ConvolutionMatrix conv =
        build_conv_matrix(scenario.kernel_fn(), data.times, sweep.rule);
    const SvdSolver svd(conv);

    report.lambda_grid = log_spaced(sweep.lambda_lo, sweep.lambda_hi, sweep.lambda_points);
    report.tau_grid = log_spaced(sweep.tau_lo, sweep.tau_hi, sweep.tau_points);
    report.tikhonov_risks_by_lambda.assign(report.lambda_grid.size(), 0.0);
    report.svd_risks_by_tau.assign(report.tau_grid.size(), 0.0);
    const TikhonovSolver tik(conv, report.lambda_grid);

    for (int rep = 0; rep < scenario.reps; ++rep) {
        const Observations obs = simulate_dataset(scenario, data, rep);
        for (std::size_t li = 0; li < report.lambda_grid.size(); ++li) {
            const Vector fh = tik.solve(obs.values, li);
            report.tikhonov_risks_by_lambda[li] += grid_risk(fh, data.target_values);
        }
        for (std::size_t ti = 0; ti < report.tau_grid.size(); ++ti) {
            const Vector fh = svd.solve(obs.values, report.tau_grid[ti]);
            report.svd_risks_by_tau[ti] += grid_risk(fh, data.target_values);
        }
    }
    for (double& r : report.tikhonov_risks_by_lambda) r /= scenario.reps;
    for (double& r : report.svd_risks_by_tau) r /= scenario.reps;

    const auto tik_it = std::min_element(report.tikhonov_risks_by_lambda.begin(),
                                         report.tikhonov_risks_by_lambda.end());
    const auto svd_it =
        std::min_element(report.svd_risks_by_tau.begin(), report.svd_risks_by_tau.end());
    report.tikhonov_risk = *tik_it;
    report.svd_risk = *svd_it;
    report.best_lambda =
        report.lambda_grid[tik_it - report.tikhonov_risks_by_lambda.begin()];
    report.best_tau = report.tau_grid[svd_it - report.svd_risks_by_tau.begin()];
    report.laguerre_risk = report.laguerre_report.mean_risk;

    // plot curves from replicate 0 at the tuned settings
    {
        const Observations obs = simulate_dataset(scenario, data, 0);
        FitConfig cfg = scenario.est;
        if (!cfg.sigma) cfg.sigma = data.sigma;
        const ModelFit mfit = fit(obs, data.g_coeffs, cfg);
        report.curve_times = data.times;
        report.curve_truth = data.target_values;
        report.curve_laguerre = expand(mfit.coeffs, data.times);
        report.curve_tikhonov = tikhonov_solve(conv, obs.values, report.best_lambda);
        report.curve_svd = svd.solve(obs.values, report.best_tau);
    }
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

}

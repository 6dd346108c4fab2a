#pragma once

#include "lagdeconv/baseline.hpp"
#include "lagdeconv/simulate.hpp"

namespace lagdeconv {

/// Regularization sweep grids for the baseline comparison.
struct SweepConfig {
    double lambda_lo = 1e-6, lambda_hi = 1e2;
    int lambda_points = 25;
    double tau_lo = 1e-6, tau_hi = 1e-1;
    int tau_points = 25;
    QuadRule rule = QuadRule::Rectangular;
};

struct ComparisonReport {
    double laguerre_risk = 0.0;
    double tikhonov_risk = 0.0;   // best over the lambda grid (oracle-tuned)
    double svd_risk = 0.0;        // best over the tau grid (oracle-tuned)
    double best_lambda = 0.0;
    double best_tau = 0.0;
    Vector lambda_grid, tikhonov_risks_by_lambda;
    Vector tau_grid, svd_risks_by_tau;
    // curves from replicate 0 for plotting
    Vector curve_times, curve_truth, curve_laguerre, curve_tikhonov, curve_svd;
    RiskReport laguerre_report;
    double runtime_seconds = 0.0;  // informational; never serialized
};

/// Penalized-Laguerre estimator against oracle-tuned Tikhonov and truncated
/// SVD on the same replicates.
ComparisonReport run_comparison(const Scenario& scenario, const SweepConfig& sweep = {});

}

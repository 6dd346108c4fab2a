#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "lagdeconv/select.hpp"

namespace lagdeconv {

enum class Kernel { G2, G3, G1Surrogate, Custom };
enum class Target { F1, F2, F3, F4, F5, Custom };

Kernel kernel_from_name(const std::string& name);
Target target_from_name(const std::string& name);
std::string kernel_name(Kernel k);
std::string target_name(Target t);

/// Unnormalized kernel value.
double kernel_eval_raw(Kernel kind, double t);
/// Peak of the raw kernel (the normalization constant); g2's is closed form,
/// the others are located numerically once and cached.
double kernel_norm_constant(Kernel kind);
/// Kernel rescaled so its maximum equals 1.
double kernel_eval(Kernel kind, double t);

double target_eval(Target kind, double x);

/// Simulation scenario: one kernel/target cell of the study grid.
struct Scenario {
    Kernel kernel = Kernel::G2;
    Target target = Target::F1;
    std::function<double(double)> custom_kernel;  // used when kernel == Custom
    std::function<double(double)> custom_target;  // used when target == Custom
    int n = 100;
    double horizon = 100.0;
    double snr = 5.0;
    int reps = 400;
    std::uint64_t seed = 1;
    // estimator settings
    std::optional<double> a;  // empty = select on the kernel fit
    FitConfig est;
    std::optional<double> sigma_override;  // force the noise level (testing)

    std::function<double(double)> kernel_fn() const;
    std::function<double(double)> target_fn() const;
};

/// q(t) = integral of g(t - tau) f(tau) over [0, t], adaptive quadrature.
double true_convolution(const std::function<double(double)>& kernel,
                        const std::function<double(double)>& target, double t,
                        double abs_tol = 1e-9);

/// Time-averaged variance (1/T) int phi^2 - ((1/T) int phi)^2 over [0, T].
double time_averaged_variance(const std::function<double(double)>& fn, double horizon);

/// Noise level matching the target signal-to-noise ratio:
/// sigma = sqrt(Var_T(f) / (snr^2 Var_T(g))).
double snr_to_sigma(const std::function<double(double)>& kernel,
                    const std::function<double(double)>& target, double snr,
                    double horizon);

/// Everything about a scenario that does not depend on the replicate index.
struct ScenarioData {
    Vector times;
    Vector q_values;       // noiseless convolution at the sample times
    Vector target_values;  // f at the sample times
    double sigma = 0.0;
    double a = 0.0;
    double kernel_fit_error = 0.0;  // scale-selection residual (0 when a fixed)
    CoeffVector g_coeffs;
};

ScenarioData make_scenario_data(const Scenario& scenario);

/// Equispaced observations t_i = i T / n with keyed Gaussian noise,
/// bit-reproducible per (seed, rep_index).
Observations simulate_dataset(const Scenario& scenario, const ScenarioData& data,
                              int rep_index);
Observations simulate_dataset(const Scenario& scenario, int rep_index);

/// Mean squared error of the fitted curve on the sample grid.
double empirical_risk(const ModelFit& fit, const std::function<double(double)>& target,
                      std::span<const double> times);

struct RiskReport {
    double mean_risk = 0.0;
    double risk_x100 = 0.0;
    double std_error = 0.0;
    std::vector<int> m_hat_histogram;   // index m, 0 unused
    Vector fixed_m_mean_risks;          // mean risk of every fixed model size
    double oracle_fixed_m_risk = 0.0;   // min over m of the above
    int failures = 0;
    int reps = 0;
    double runtime_seconds = 0.0;       // informational; never serialized
    ScenarioData data;                  // echo of the per-scenario precompute
};

/// Runs the replicates sequentially with indexed aggregation. Throws when
/// more than 1% of replicates fail.
RiskReport monte_carlo(const Scenario& scenario);

}

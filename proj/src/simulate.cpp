#include "lagdeconv/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lagdeconv/errors.hpp"
#include "lagdeconv/quadrature.hpp"
#include "lagdeconv/rng.hpp"

namespace lagdeconv {

Kernel kernel_from_name(const std::string& name) {
    if (name == "g2") return Kernel::G2;
    if (name == "g3") return Kernel::G3;
    if (name == "g1_surrogate") return Kernel::G1Surrogate;
    if (name == "custom") return Kernel::Custom;
    throw ValidationError("unknown kernel '" + name + "' (expected g2, g3, g1_surrogate)");
}

Target target_from_name(const std::string& name) {
    if (name == "f1") return Target::F1;
    if (name == "f2") return Target::F2;
    if (name == "f3") return Target::F3;
    if (name == "f4") return Target::F4;
    if (name == "f5") return Target::F5;
    if (name == "custom") return Target::Custom;
    throw ValidationError("unknown target '" + name + "' (expected f1..f5)");
}

std::string kernel_name(Kernel k) {
    switch (k) {
        case Kernel::G2: return "g2";
        case Kernel::G3: return "g3";
        case Kernel::G1Surrogate: return "g1_surrogate";
        default: return "custom";
    }
}

std::string target_name(Target t) {
    switch (t) {
        case Target::F1: return "f1";
        case Target::F2: return "f2";
        case Target::F3: return "f3";
        case Target::F4: return "f4";
        case Target::F5: return "f5";
        default: return "custom";
    }
}

double kernel_eval_raw(Kernel kind, double t) {
    if (t < 0.0) return 0.0;
    switch (kind) {
        case Kernel::G2:
            return t * t * std::exp(-0.1 * t);
        case Kernel::G3:
            return std::pow(t, 7.0) / (100.0 + t) * std::exp(-0.9 * std::pow(t, 0.75));
        case Kernel::G1Surrogate:
            // Synthetic AIF-shaped curve: bolus peak plus a slower
            // recirculation plateau. Stand-in for real arterial input data.
            return t * t * t * std::exp(-t / 2.5) +
                   25.0 * std::pow(1.0 - std::exp(-t / 15.0), 3.0) * std::exp(-t / 25.0);
        default:
            throw ValidationError("kernel_eval_raw: custom kernels have no canned form");
    }
}

namespace {

double locate_peak(Kernel kind, double lo, double hi) {
    // coarse grid then golden-section refinement; deterministic
    const int nscan = 20000;
    double best_t = lo, best_v = -1.0;
    for (int i = 0; i <= nscan; ++i) {
        const double t = lo + (hi - lo) * i / nscan;
        const double v = kernel_eval_raw(kind, t);
        if (v > best_v) {
            best_v = v;
            best_t = t;
        }
    }
    double a = std::max(lo, best_t - (hi - lo) / nscan);
    double b = std::min(hi, best_t + (hi - lo) / nscan);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + b); ++it) {
        if (kernel_eval_raw(kind, c) < kernel_eval_raw(kind, d)) {
            a = c;
        } else {
            b = d;
        }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return kernel_eval_raw(kind, 0.5 * (a + b));
}

}  // namespace

double kernel_norm_constant(Kernel kind) {
    switch (kind) {
        case Kernel::G2:
            return 400.0 * std::exp(-2.0);  // peak at t = 20
        case Kernel::G3: {
            static const double norm = locate_peak(Kernel::G3, 0.0, 200.0);
            return norm;
        }
        case Kernel::G1Surrogate: {
            static const double norm = locate_peak(Kernel::G1Surrogate, 0.0, 200.0);
            return norm;
        }
        default:
            throw ValidationError("kernel_norm_constant: custom kernel");
    }
}

double kernel_eval(Kernel kind, double t) {
    return kernel_eval_raw(kind, t) / kernel_norm_constant(kind);
}

double target_eval(Target kind, double x) {
    switch (kind) {
        case Target::F1: return std::exp(-0.1 * x);
        case Target::F2: return std::exp(-0.6 * x);
        case Target::F3: return 0.5 * std::exp(-0.1 * x) + 0.5 * std::exp(-0.6 * x);
        case Target::F4: return std::exp(-2.0 * x) * (1.0 + 2.0 * x);  // Gamma(2, 0.5) survival
        case Target::F5: return std::pow(x + 1.0, -1.0 / 3.0);
        default:
            throw ValidationError("target_eval: custom target has no canned form");
    }
}

std::function<double(double)> Scenario::kernel_fn() const {
    if (kernel == Kernel::Custom) {
        if (!custom_kernel) throw ValidationError("scenario: custom kernel not provided");
        return custom_kernel;
    }
    const Kernel k = kernel;
    return [k](double t) { return kernel_eval(k, t); };
}

std::function<double(double)> Scenario::target_fn() const {
    if (target == Target::Custom) {
        if (!custom_target) throw ValidationError("scenario: custom target not provided");
        return custom_target;
    }
    const Target t = target;
    return [t](double x) { return target_eval(t, x); };
}

double true_convolution(const std::function<double(double)>& kernel,
                        const std::function<double(double)>& target, double t,
                        double abs_tol) {
    if (t < 0.0) throw ValidationError("true_convolution: negative time");
    if (t == 0.0) return 0.0;
    return integrate_adaptive([&](double tau) { return kernel(t - tau) * target(tau); }, 0.0,
                              t, abs_tol);
}

double time_averaged_variance(const std::function<double(double)>& fn, double horizon) {
    const double m2 =
        integrate_adaptive([&](double x) { return fn(x) * fn(x); }, 0.0, horizon, 1e-10);
    const double m1 = integrate_adaptive(fn, 0.0, horizon, 1e-10);
    return m2 / horizon - (m1 / horizon) * (m1 / horizon);
}

double snr_to_sigma(const std::function<double(double)>& kernel,
                    const std::function<double(double)>& target, double snr,
                    double horizon) {
    if (!(snr > 0.0)) throw ValidationError("snr_to_sigma: snr must be positive");
    const double var_f = time_averaged_variance(target, horizon);
    const double var_g = time_averaged_variance(kernel, horizon);
    if (var_f < 0.0 || var_g <= 0.0)
        throw NumericalError("snr_to_sigma: degenerate variance");
    return std::sqrt(var_f / (snr * snr * var_g));
}

ScenarioData make_scenario_data(const Scenario& scenario) {
    if (scenario.n < 2 || !(scenario.horizon > 0.0) || scenario.reps < 1)
        throw ValidationError("scenario: need n >= 2, T > 0, reps >= 1");
    const auto g = scenario.kernel_fn();
    const auto f = scenario.target_fn();

    ScenarioData data;
    if (scenario.a) {
        data.a = *scenario.a;
        data.kernel_fit_error = 0.0;
    } else {
        const Vector grid = default_scale_grid();
        const ScaleSelection sel =
            select_scale_a(g, scenario.est.M, grid, scenario.horizon);
        data.a = sel.a;
        data.kernel_fit_error = sel.fit_error;
    }
    const LaguerreBasis basis(data.a, scenario.est.M);
    data.g_coeffs = project_function(g, basis, scenario.est.M);

    data.times.resize(scenario.n);
    data.q_values.resize(scenario.n);
    data.target_values.resize(scenario.n);
    for (int i = 0; i < scenario.n; ++i) {
        data.times[i] = (i + 1) * scenario.horizon / scenario.n;
        data.q_values[i] = true_convolution(g, f, data.times[i]);
        data.target_values[i] = f(data.times[i]);
    }
    data.sigma = scenario.sigma_override
                     ? *scenario.sigma_override
                     : snr_to_sigma(g, f, scenario.snr, scenario.horizon);
    return data;
}

Observations simulate_dataset(const Scenario& scenario, const ScenarioData& data,
                              int rep_index) {
    const CounterRng rng(scenario.seed);
    Vector y(data.q_values);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += data.sigma * rng.normal(static_cast<std::uint64_t>(rep_index), i);
    return Observations(data.times, std::move(y), scenario.horizon, data.sigma);
}

Observations simulate_dataset(const Scenario& scenario, int rep_index) {
    return simulate_dataset(scenario, make_scenario_data(scenario), rep_index);
}

double empirical_risk(const ModelFit& fit, const std::function<double(double)>& target,
                      std::span<const double> times) {
    if (times.empty()) throw ValidationError("empirical_risk: empty grid");
    const Vector fitted = expand(fit.coeffs, times);
    double acc = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double d = fitted[i] - target(times[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(times.size());
}

RiskReport monte_carlo(const Scenario& scenario) {
    const auto t_start = std::chrono::steady_clock::now();
    const ScenarioData data = make_scenario_data(scenario);
    const auto f = scenario.target_fn();
    const int M = scenario.est.M;

    FitConfig cfg = scenario.est;
    if (!cfg.sigma) cfg.sigma = data.sigma;  // noise level is known in simulations

    RiskReport report;
    report.m_hat_histogram.assign(M + 1, 0);
    report.fixed_m_mean_risks.assign(M, 0.0);
    report.reps = scenario.reps;

    Vector risks;
    risks.reserve(scenario.reps);
    const LaguerreBasis basis(data.a, M);
    const Matrix phi = design_matrix(basis, data.times);
    const std::size_t n = data.times.size();

    for (int rep = 0; rep < scenario.reps; ++rep) {
        try {
            const Observations obs = simulate_dataset(scenario, data, rep);
            const ModelFit fit_result = fit(obs, data.g_coeffs, cfg);
            risks.push_back(empirical_risk(fit_result, f, data.times));
            report.m_hat_histogram[fit_result.m_hat] += 1;
            // fixed-m risks from the nested solve, accumulated incrementally
            Vector cur(n, 0.0);
            for (int m = 1; m <= M; ++m) {
                const double coef = fit_result.config.refit_per_m
                                        ? 0.0
                                        : fit_result.full_coeffs[m - 1];
                if (fit_result.config.refit_per_m) {
                    const Vector& cm = fit_result.per_m_coeffs[m - 1];
                    for (std::size_t i = 0; i < n; ++i) {
                        double acc = 0.0;
                        for (int k = 0; k < m; ++k) acc += cm[k] * phi(i, k);
                        cur[i] = acc;
                    }
                } else {
                    for (std::size_t i = 0; i < n; ++i) cur[i] += coef * phi(i, m - 1);
                }
                double ss = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = cur[i] - data.target_values[i];
                    ss += d * d;
                }
                report.fixed_m_mean_risks[m - 1] += ss / static_cast<double>(n);
            }
        } catch (const Error&) {
            report.failures += 1;
        }
    }
    const int ok = scenario.reps - report.failures;
    if (report.failures * 100 > scenario.reps)
        throw NumericalError("monte_carlo: more than 1% of replicates failed");
    if (ok == 0) throw NumericalError("monte_carlo: all replicates failed");

    double mean = 0.0;
    for (double r : risks) mean += r;
    mean /= ok;
    double var = 0.0;
    for (double r : risks) var += (r - mean) * (r - mean);
    report.mean_risk = mean;
    report.risk_x100 = 100.0 * mean;
    report.std_error = ok > 1 ? std::sqrt(var / (ok - 1.0) / ok) : 0.0;
    for (double& r : report.fixed_m_mean_risks) r /= ok;
    report.oracle_fixed_m_risk = report.fixed_m_mean_risks.empty()
                                     ? 0.0
                                     : *std::min_element(report.fixed_m_mean_risks.begin(),
                                                         report.fixed_m_mean_risks.end());
    report.data = data;
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

}

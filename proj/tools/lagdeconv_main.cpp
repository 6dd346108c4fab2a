#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lagdeconv/compare.hpp"
#include "lagdeconv/errors.hpp"
#include "lagdeconv/io.hpp"
#include "lagdeconv/simulate.hpp"
#include "lagdeconv/version.hpp"

namespace fs = std::filesystem;
using lagdeconv::io::Json;

namespace {

struct CommonOpts {
    std::string out_dir = ".";
    std::string a_spec = "auto";
    int m_terms = 11;
    double b_constant = 0.5;
    double c_pen = 1.5;
    std::string alpha_spec = "auto";
    std::string sigma_spec = "estimate";
    double delay = 0.0;
    std::string zmode_spec = "quadrature";
    bool refit = false;
};

std::optional<double> parse_auto(const std::string& spec, const std::string& flag,
                                 const std::string& auto_word) {
    if (spec == auto_word) return std::nullopt;
    try {
        std::size_t pos = 0;
        const double v = std::stod(spec, &pos);
        if (pos != spec.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw lagdeconv::ValidationError("--" + flag + ": expected '" + auto_word +
                                         "' or a number, got '" + spec + "'");
    }
}

lagdeconv::ZMode parse_zmode(const std::string& spec) {
    if (spec == "quadrature") return lagdeconv::ZMode::Quadrature;
    if (spec == "least-squares") return lagdeconv::ZMode::LeastSquares;
    throw lagdeconv::ValidationError("--zmode: expected quadrature or least-squares");
}

Json flags_json(const CommonOpts& o) {
    Json j;
    j["a"] = o.a_spec;
    j["M"] = o.m_terms;
    j["B"] = o.b_constant;
    j["c_pen"] = o.c_pen;
    j["alpha"] = o.alpha_spec;
    j["sigma"] = o.sigma_spec;
    j["delay"] = o.delay;
    j["zmode"] = o.zmode_spec;
    j["refit"] = o.refit;
    return j;
}

int cmd_fit_kernel(const std::string& data_path, const CommonOpts& opts) {
    const lagdeconv::Observations obs = lagdeconv::io::read_series_csv(data_path);
    if (obs.n() < static_cast<std::size_t>(opts.m_terms) + 1)
        throw lagdeconv::RankDeficientDesign(
            "fit-kernel: need at least M + 1 samples to fit the kernel");

    const std::optional<double> a_fixed = parse_auto(opts.a_spec, "a", "auto");
    double a = 0.0;
    if (a_fixed) {
        a = *a_fixed;
    } else {
        const lagdeconv::Vector grid = lagdeconv::default_scale_grid();
        a = lagdeconv::select_scale_a(obs.times, obs.values, opts.m_terms, grid).a;
    }
    const lagdeconv::LaguerreBasis basis(a, opts.m_terms);
    const lagdeconv::Matrix phi = lagdeconv::design_matrix(basis, obs.times);
    const lagdeconv::Vector coeffs = lagdeconv::least_squares(phi, obs.values);
    double ss = 0.0;
    for (std::size_t i = 0; i < obs.n(); ++i) {
        double fit = 0.0;
        for (int k = 0; k < opts.m_terms; ++k) fit += phi(i, k) * coeffs[k];
        const double r = fit - obs.values[i];
        ss += r * r;
    }
    lagdeconv::io::KernelFile kf;
    kf.a = a;
    kf.m = opts.m_terms;
    kf.coeffs = coeffs;
    kf.fit_rmse = std::sqrt(ss / static_cast<double>(obs.n()));
    kf.config = flags_json(opts);
    kf.config["command"] = "fit-kernel";
    kf.config["data"] = data_path;
    kf.config["resolved_a"] = a;

    fs::create_directories(opts.out_dir);
    lagdeconv::io::write_kernel_json(fs::path(opts.out_dir) / "kernel.json", kf);
    std::cerr << "fit-kernel: a = " << a << ", rmse = " << kf.fit_rmse << "\n";
    return 0;
}

int cmd_fit(const std::string& data_path, const std::string& kernel_path,
            const CommonOpts& opts) {
    const lagdeconv::io::KernelFile kf = lagdeconv::io::read_kernel_json(kernel_path);
    lagdeconv::Observations obs = lagdeconv::io::read_series_csv(data_path);
    if (opts.delay > 0.0) obs = lagdeconv::shift_delay(obs, opts.delay);

    lagdeconv::FitConfig cfg;
    cfg.M = std::min(opts.m_terms, kf.m);
    cfg.B = opts.b_constant;
    cfg.c_pen = opts.c_pen;
    cfg.alpha = parse_auto(opts.alpha_spec, "alpha", "auto");
    cfg.sigma = parse_auto(opts.sigma_spec, "sigma", "estimate");
    cfg.zmode = parse_zmode(opts.zmode_spec);
    cfg.refit_per_m = opts.refit;

    const lagdeconv::CoeffVector g_coeffs{kf.coeffs, lagdeconv::LaguerreBasis(kf.a, kf.m)};
    if (!cfg.sigma) {
        const lagdeconv::SigmaEstimate est = lagdeconv::estimate_sigma(obs);
        if (est.irregular_spacing)
            std::cerr << "warning: grid spacing varies by more than 20%; "
                         "the difference-based sigma estimate is biased\n";
        cfg.sigma = est.value;
    }
    const lagdeconv::ModelFit fit = lagdeconv::fit(obs, g_coeffs, cfg);

    Json report;
    report["version"] = lagdeconv::kVersion;
    Json config = flags_json(opts);
    config["command"] = "fit";
    config["data"] = data_path;
    config["kernel"] = kernel_path;
    config["resolved_sigma"] = fit.sigma_used;
    config["resolved_M"] = cfg.M;
    config["kernel_a"] = kf.a;
    report["config"] = config;
    report["m_hat"] = fit.m_hat;
    report["coefficients"] = fit.coeffs.coeffs;
    report["beta_hat"] = fit.beta_hat;
    report["transit_integral"] = fit.transit_integral;
    report["sigma_used"] = fit.sigma_used;
    report["penalty_table"] = lagdeconv::io::penalty_table_json(fit.table);

    fs::create_directories(opts.out_dir);
    lagdeconv::io::write_json(fs::path(opts.out_dir) / "fit_report.json", report);

    const lagdeconv::Vector fhat = lagdeconv::expand(fit.coeffs, obs.times);
    const lagdeconv::LowerToeplitz g_mhat =
        lagdeconv::build_toeplitz(g_coeffs, fit.m_hat);
    const lagdeconv::Vector q_coeffs = lagdeconv::toeplitz_mul(g_mhat, fit.coeffs.coeffs);
    const lagdeconv::Vector qhat =
        lagdeconv::expand({q_coeffs, fit.coeffs.basis}, obs.times);
    lagdeconv::io::write_csv(fs::path(opts.out_dir) / "curves.csv",
                             {"t", "y", "fhat", "qhat"},
                             {&obs.times, &obs.values, &fhat, &qhat});
    std::cerr << "fit: m_hat = " << fit.m_hat << ", beta_hat = " << fit.beta_hat << "\n";
    return 0;
}

Json scenario_config(const lagdeconv::io::ScenarioFile& sf, const std::string& command,
                     const std::string& scenario_path) {
    Json config;
    config["command"] = command;
    config["scenario_path"] = scenario_path;
    config["scenario"] = sf.echo();
    return config;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir) {
    const lagdeconv::io::ScenarioFile sf = lagdeconv::io::parse_scenario_file(scenario_path);
    fs::create_directories(out_dir);

    Json cells = Json::array();
    lagdeconv::Vector col_snr, col_n, col_risk100, col_se100;
    std::vector<std::string> row_kernel, row_target;
    double total_runtime = 0.0;
    for (double snr : sf.snrs) {
        for (const std::string& kernel : sf.kernels) {
            for (int n : sf.ns) {
                for (const std::string& target : sf.targets) {
                    const lagdeconv::Scenario sc = sf.make_scenario(kernel, target, snr, n);
                    const lagdeconv::RiskReport rep = lagdeconv::monte_carlo(sc);
                    total_runtime += rep.runtime_seconds;
                    Json cell = lagdeconv::io::risk_report_json(rep);
                    cell["kernel"] = kernel;
                    cell["target"] = target;
                    cell["snr"] = snr;
                    cell["n"] = n;
                    cells.push_back(cell);
                    row_kernel.push_back(kernel);
                    row_target.push_back(target);
                    col_snr.push_back(snr);
                    col_n.push_back(n);
                    col_risk100.push_back(rep.risk_x100);
                    col_se100.push_back(100.0 * rep.std_error);
                    std::cerr << "simulate: " << kernel << "/" << target << " snr=" << snr
                              << " n=" << n << " -> 100*risk = " << rep.risk_x100 << "\n";
                }
            }
        }
    }

    Json report;
    report["version"] = lagdeconv::kVersion;
    report["config"] = scenario_config(sf, "simulate", scenario_path);
    report["cells"] = cells;
    lagdeconv::io::write_json(fs::path(out_dir) / "simulate_report.json", report);

    // tidy risk table
    {
        std::ofstream out(fs::path(out_dir) / "risk_table.csv");
        out << "snr,kernel,n,target,risk_x100,std_error_x100\n";
        for (std::size_t i = 0; i < col_snr.size(); ++i)
            out << lagdeconv::io::format_double(col_snr[i]) << ',' << row_kernel[i] << ','
                << static_cast<int>(col_n[i]) << ',' << row_target[i] << ','
                << lagdeconv::io::format_double(col_risk100[i]) << ','
                << lagdeconv::io::format_double(col_se100[i]) << '\n';
    }
    // pivot layout: one row per (n, snr, kernel), one column per target
    {
        std::ofstream out(fs::path(out_dir) / "risk_table_wide.csv");
        out << "n,snr,kernel";
        for (const std::string& t : sf.targets) out << ',' << t;
        out << '\n';
        for (int n : sf.ns)
            for (double snr : sf.snrs)
                for (const std::string& kernel : sf.kernels) {
                    out << n << ',' << lagdeconv::io::format_double(snr) << ',' << kernel;
                    for (const std::string& target : sf.targets) {
                        double value = 0.0;
                        for (std::size_t i = 0; i < col_snr.size(); ++i)
                            if (row_kernel[i] == kernel && row_target[i] == target &&
                                col_snr[i] == snr && col_n[i] == n)
                                value = col_risk100[i];
                        out << ',' << lagdeconv::io::format_double(value);
                    }
                    out << '\n';
                }
    }
    std::cerr << "simulate: done, " << cells.size() << " cells in " << total_runtime
              << " s\n";
    return 0;
}

int cmd_compare(const std::string& scenario_path, const std::string& out_dir) {
    const lagdeconv::io::ScenarioFile sf = lagdeconv::io::parse_scenario_file(scenario_path);
    if (sf.kernels.size() != 1 || sf.targets.size() != 1 || sf.snrs.size() != 1 ||
        sf.ns.size() != 1)
        throw lagdeconv::ValidationError(
            "compare: the scenario must pin exactly one kernel, target, snr and n");
    const lagdeconv::Scenario sc =
        sf.make_scenario(sf.kernels[0], sf.targets[0], sf.snrs[0], sf.ns[0]);
    const lagdeconv::ComparisonReport rep = lagdeconv::run_comparison(sc, sf.sweep);

    Json report;
    report["version"] = lagdeconv::kVersion;
    report["config"] = scenario_config(sf, "compare", scenario_path);
    report["comparison"] = lagdeconv::io::comparison_report_json(rep);
    fs::create_directories(out_dir);
    lagdeconv::io::write_json(fs::path(out_dir) / "compare_report.json", report);
    lagdeconv::io::write_csv(
        fs::path(out_dir) / "estimates.csv",
        {"t", "f_true", "f_laguerre", "f_tikhonov", "f_svd"},
        {&rep.curve_times, &rep.curve_truth, &rep.curve_laguerre, &rep.curve_tikhonov,
         &rep.curve_svd});
    std::cerr << "compare: laguerre = " << rep.laguerre_risk
              << ", tikhonov = " << rep.tikhonov_risk << " (lambda " << rep.best_lambda
              << ")" << ", svd = " << rep.svd_risk << " (tau " << rep.best_tau << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laguerre-domain deconvolution for causal convolution models"};
    app.set_version_flag("--version", lagdeconv::kVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    std::string data_path, kernel_path, scenario_path;

    CLI::App* fit_kernel = app.add_subcommand(
        "fit-kernel", "Fit a sampled kernel curve with a Laguerre expansion");
    fit_kernel->add_option("--data", data_path, "CSV with header t,value")->required();
    fit_kernel->add_option("--a", opts.a_spec, "scale (number or 'auto')");
    fit_kernel->add_option("--M", opts.m_terms, "number of expansion terms");
    fit_kernel->add_option("--out", opts.out_dir, "output directory");

    CLI::App* fit = app.add_subcommand("fit", "Deconvolve observations with a fitted kernel");
    fit->add_option("--data", data_path, "CSV with header t,value")->required();
    fit->add_option("--kernel", kernel_path, "kernel JSON from fit-kernel")->required();
    fit->add_option("--M", opts.m_terms, "max model size (capped by the kernel file)");
    fit->add_option("--B", opts.b_constant, "penalty balance constant");
    fit->add_option("--c-pen", opts.c_pen, "penalty multiplier");
    fit->add_option("--alpha", opts.alpha_spec, "penalty exponent (number or 'auto')");
    fit->add_option("--sigma", opts.sigma_spec, "noise level (number or 'estimate')");
    fit->add_option("--delay", opts.delay, "shift of the convolution origin");
    fit->add_option("--zmode", opts.zmode_spec, "coefficient mode: quadrature|least-squares");
    fit->add_flag("--refit", opts.refit, "refit coefficients per model size");
    fit->add_option("--out", opts.out_dir, "output directory");

    std::string sim_out = ".";
    CLI::App* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo study");
    simulate->add_option("scenario", scenario_path, "scenario file")->required();
    simulate->add_option("--out", sim_out, "output directory");

    CLI::App* compare =
        app.add_subcommand("compare", "Compare against Tikhonov and truncated-SVD baselines");
    compare->add_option("scenario", scenario_path, "scenario file")->required();
    compare->add_option("--out", sim_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_kernel->parsed()) return cmd_fit_kernel(data_path, opts);
        if (fit->parsed()) return cmd_fit(data_path, kernel_path, opts);
        if (simulate->parsed()) return cmd_simulate(scenario_path, sim_out);
        if (compare->parsed()) return cmd_compare(scenario_path, sim_out);
    } catch (const lagdeconv::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lagdeconv::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

#include "lagdeconv/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lagdeconv/errors.hpp"
#include "lagdeconv/version.hpp"

namespace lagdeconv::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(where + ": cannot parse number '" + s + "'");
    }
}

long long parse_int(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(where + ": cannot parse integer '" + s + "'");
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Observations read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::string line;
    int lineno = 0;
    Vector times, values;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (lineno == 1) {
            const auto cols = split(t, ',');
            if (cols.size() != 2 || cols[0] != "t" || cols[1] != "value")
                throw ValidationError(path.string() + ":1: expected header 't,value'");
            continue;
        }
        const auto cols = split(t, ',');
        if (cols.size() != 2)
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected two comma-separated fields");
        const std::string where = path.string() + ":" + std::to_string(lineno);
        times.push_back(parse_double(cols[0], where));
        values.push_back(parse_double(cols[1], where));
    }
    if (times.size() < 2)
        throw ValidationError(path.string() + ": need at least 2 data rows");
    const double horizon = times.back();
    try {
        return Observations(std::move(times), std::move(values), horizon);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_series_csv(const std::filesystem::path& path, std::span<const double> times,
                      std::span<const double> values) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << "t,value\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        out << format_double(times[i]) << ',' << format_double(values[i]) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& headers,
               const std::vector<const Vector*>& columns) {
    if (headers.size() != columns.size())
        throw ValidationError("write_csv: header/column count mismatch");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    for (std::size_t j = 0; j < headers.size(); ++j)
        out << headers[j] << (j + 1 < headers.size() ? ',' : '\n');
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (const Vector* c : columns)
        if (c->size() != rows) throw ValidationError("write_csv: ragged columns");
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < columns.size(); ++j)
            out << format_double((*columns[j])[i]) << (j + 1 < columns.size() ? ',' : '\n');
}

KernelFile read_kernel_json(const std::filesystem::path& path) {
    const Json j = read_json(path);
    KernelFile kf;
    try {
        kf.a = j.at("a").get<double>();
        kf.m = j.at("M").get<int>();
        kf.coeffs = j.at("coeffs").get<Vector>();
        kf.fit_rmse = j.at("fit_rmse").get<double>();
        if (j.contains("config")) kf.config = j.at("config");
    } catch (const Json::exception& e) {
        throw ValidationError(path.string() + ": bad kernel file: " + e.what());
    }
    if (!(kf.a > 0.0) || kf.m < 1 || kf.coeffs.size() != static_cast<std::size_t>(kf.m))
        throw ValidationError(path.string() + ": inconsistent kernel file contents");
    return kf;
}

void write_kernel_json(const std::filesystem::path& path, const KernelFile& kf) {
    Json j;
    j["version"] = kVersion;
    j["a"] = kf.a;
    j["M"] = kf.m;
    j["coeffs"] = kf.coeffs;
    j["fit_rmse"] = kf.fit_rmse;
    j["config"] = kf.config;
    write_json(path, j);
}

Json ScenarioFile::echo() const {
    Json j;
    auto join_str = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
        return s;
    };
    std::string snr_s, n_s;
    for (std::size_t i = 0; i < snrs.size(); ++i)
        snr_s += (i ? "," : "") + format_double(snrs[i]);
    for (std::size_t i = 0; i < ns.size(); ++i)
        n_s += (i ? "," : "") + std::to_string(ns[i]);
    j["kernels"] = join_str(kernels);
    j["targets"] = join_str(targets);
    j["snrs"] = snr_s;
    j["ns"] = n_s;
    j["T"] = format_double(horizon);
    j["M"] = std::to_string(m_terms);
    j["reps"] = std::to_string(reps);
    j["seed"] = std::to_string(seed);
    j["B"] = format_double(b_constant);
    j["c_pen"] = format_double(c_pen);
    j["alpha"] = alpha ? format_double(*alpha) : "auto";
    j["a"] = a ? format_double(*a) : "auto";
    j["sigma"] = sigma ? format_double(*sigma) : "auto";
    j["zmode"] = zmode == ZMode::Quadrature ? "quadrature" : "least-squares";
    j["refit"] = refit ? "true" : "false";
    j["lambda_min"] = format_double(sweep.lambda_lo);
    j["lambda_max"] = format_double(sweep.lambda_hi);
    j["lambda_points"] = std::to_string(sweep.lambda_points);
    j["tau_min"] = format_double(sweep.tau_lo);
    j["tau_max"] = format_double(sweep.tau_hi);
    j["tau_points"] = std::to_string(sweep.tau_points);
    j["rule"] = sweep.rule == QuadRule::Rectangular ? "rectangular" : "trapezoid";
    return j;
}

Scenario ScenarioFile::make_scenario(const std::string& kernel, const std::string& target,
                                     double snr, int n) const {
    Scenario sc;
    sc.kernel = kernel_from_name(kernel);
    sc.target = target_from_name(target);
    sc.n = n;
    sc.horizon = horizon;
    sc.snr = snr;
    sc.reps = reps;
    sc.seed = seed;
    sc.a = a;
    sc.sigma_override = sigma;
    sc.est.M = m_terms;
    sc.est.B = b_constant;
    sc.est.c_pen = c_pen;
    sc.est.alpha = alpha;
    sc.est.zmode = zmode;
    sc.est.refit_per_m = refit;
    return sc;
}

ScenarioFile parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario '" + path.string() + "'");
    ScenarioFile sf;
    std::vector<std::string> errors;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        errors.push_back(path.string() + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        const auto hash = t.find('#');
        if (hash != std::string::npos) t = trim(t.substr(0, hash));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            fail("expected 'key = value'");
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        try {
            if (key == "kernels" || key == "kernel") {
                sf.kernels = split(val, ',');
                for (const auto& k : sf.kernels) kernel_from_name(k);
            } else if (key == "targets" || key == "target") {
                sf.targets = split(val, ',');
                for (const auto& k : sf.targets) target_from_name(k);
            } else if (key == "snrs" || key == "snr") {
                sf.snrs.clear();
                for (const auto& s : split(val, ',')) sf.snrs.push_back(parse_double(s, key));
                for (double s : sf.snrs)
                    if (!(s > 0.0)) throw ValidationError("snr must be positive");
            } else if (key == "ns" || key == "n") {
                sf.ns.clear();
                for (const auto& s : split(val, ','))
                    sf.ns.push_back(static_cast<int>(parse_int(s, key)));
                for (int n : sf.ns)
                    if (n < 2) throw ValidationError("n must be at least 2");
            } else if (key == "T") {
                sf.horizon = parse_double(val, key);
                if (!(sf.horizon > 0.0)) throw ValidationError("T must be positive");
            } else if (key == "M") {
                sf.m_terms = static_cast<int>(parse_int(val, key));
                if (sf.m_terms < 1) throw ValidationError("M must be at least 1");
            } else if (key == "reps") {
                sf.reps = static_cast<int>(parse_int(val, key));
                if (sf.reps < 1) throw ValidationError("reps must be at least 1");
            } else if (key == "seed") {
                sf.seed = static_cast<std::uint64_t>(parse_int(val, key));
            } else if (key == "B") {
                sf.b_constant = parse_double(val, key);
                if (!(sf.b_constant > 0.0)) throw ValidationError("B must be positive");
            } else if (key == "c_pen") {
                sf.c_pen = parse_double(val, key);
                if (!(sf.c_pen > 0.0)) throw ValidationError("c_pen must be positive");
            } else if (key == "alpha") {
                if (val == "auto") sf.alpha.reset();
                else sf.alpha = parse_double(val, key);
            } else if (key == "a") {
                if (val == "auto") sf.a.reset();
                else {
                    sf.a = parse_double(val, key);
                    if (!(*sf.a > 0.0)) throw ValidationError("a must be positive");
                }
            } else if (key == "sigma") {
                if (val == "auto") sf.sigma.reset();
                else {
                    sf.sigma = parse_double(val, key);
                    if (!(*sf.sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
                }
            } else if (key == "zmode") {
                if (val == "quadrature") sf.zmode = ZMode::Quadrature;
                else if (val == "least-squares") sf.zmode = ZMode::LeastSquares;
                else throw ValidationError("zmode must be quadrature or least-squares");
            } else if (key == "refit") {
                if (val == "true") sf.refit = true;
                else if (val == "false") sf.refit = false;
                else throw ValidationError("refit must be true or false");
            } else if (key == "lambda_min") {
                sf.sweep.lambda_lo = parse_double(val, key);
            } else if (key == "lambda_max") {
                sf.sweep.lambda_hi = parse_double(val, key);
            } else if (key == "lambda_points") {
                sf.sweep.lambda_points = static_cast<int>(parse_int(val, key));
            } else if (key == "tau_min") {
                sf.sweep.tau_lo = parse_double(val, key);
            } else if (key == "tau_max") {
                sf.sweep.tau_hi = parse_double(val, key);
            } else if (key == "tau_points") {
                sf.sweep.tau_points = static_cast<int>(parse_int(val, key));
            } else if (key == "rule") {
                if (val == "rectangular") sf.sweep.rule = QuadRule::Rectangular;
                else if (val == "trapezoid") sf.sweep.rule = QuadRule::Trapezoid;
                else throw ValidationError("rule must be rectangular or trapezoid");
            } else {
                throw ValidationError("unknown key '" + key + "'");
            }
        } catch (const ValidationError& e) {
            fail(e.what());
        }
    }
    if (sf.kernels.empty()) errors.push_back(path.string() + ": kernels list is empty");
    if (sf.targets.empty()) errors.push_back(path.string() + ": targets list is empty");
    if (sf.snrs.empty()) errors.push_back(path.string() + ": snrs list is empty");
    if (sf.ns.empty()) errors.push_back(path.string() + ": ns list is empty");
    if (!errors.empty()) {
        std::string all;
        for (const auto& e : errors) all += (all.empty() ? "" : "\n") + e;
        throw ValidationError(all);
    }
    return sf;
}

void write_scenario_file(const std::filesystem::path& path, const Json& echo) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    for (const auto& [key, value] : echo.items())
        out << key << " = " << value.get<std::string>() << '\n';
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
}

Json risk_report_json(const RiskReport& report) {
    Json j;
    j["mean_risk"] = report.mean_risk;
    j["risk_x100"] = report.risk_x100;
    j["std_error"] = report.std_error;
    j["m_hat_histogram"] = report.m_hat_histogram;
    j["fixed_m_mean_risks"] = report.fixed_m_mean_risks;
    j["oracle_fixed_m_risk"] = report.oracle_fixed_m_risk;
    j["failures"] = report.failures;
    j["reps"] = report.reps;
    j["a"] = report.data.a;
    j["kernel_fit_error"] = report.data.kernel_fit_error;
    j["sigma"] = report.data.sigma;
    return j;
}

Json penalty_table_json(const PenaltyTable& table) {
    Json rows = Json::array();
    for (const PenaltyRow& r : table.rows) {
        Json row;
        row["m"] = r.m;
        row["v2"] = r.v2;
        row["rho2"] = r.rho2;
        row["pen"] = r.pen;
        row["contrast"] = r.contrast;
        row["objective"] = r.objective;
        rows.push_back(row);
    }
    Json j;
    j["alpha"] = table.alpha;
    j["alpha_fitted"] = table.alpha_fitted;
    j["log_c_rho"] = table.log_c_rho;
    j["rows"] = rows;
    return j;
}

Json comparison_report_json(const ComparisonReport& report) {
    Json j;
    j["laguerre_risk"] = report.laguerre_risk;
    j["laguerre_risk_x100"] = 100.0 * report.laguerre_risk;
    j["laguerre"] = risk_report_json(report.laguerre_report);
    Json tik;
    tik["best_lambda"] = report.best_lambda;
    tik["risk"] = report.tikhonov_risk;
    tik["risk_x100"] = 100.0 * report.tikhonov_risk;
    tik["lambda_grid"] = report.lambda_grid;
    tik["risks_by_lambda"] = report.tikhonov_risks_by_lambda;
    j["tikhonov"] = tik;
    Json sv;
    sv["best_tau"] = report.best_tau;
    sv["risk"] = report.svd_risk;
    sv["risk_x100"] = 100.0 * report.svd_risk;
    sv["tau_grid"] = report.tau_grid;
    sv["risks_by_tau"] = report.svd_risks_by_tau;
    j["svd"] = sv;
    return j;
}

}

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lagdeconv/compare.hpp"
#include "lagdeconv/design.hpp"

namespace lagdeconv::io {

using Json = nlohmann::ordered_json;

/// Full round-trip formatting for CSV cells.
std::string format_double(double v);

/// Series file: header `t,value`, one sample per line. Errors carry the
/// offending line number.
Observations read_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path, std::span<const double> times,
                      std::span<const double> values);

/// Columnar CSV with arbitrary named columns (all the same length).
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& headers,
               const std::vector<const Vector*>& columns);

struct KernelFile {
    double a = 0.0;
    int m = 0;
    Vector coeffs;
    double fit_rmse = 0.0;
    Json config;  // resolved settings of the command that produced the file
};
KernelFile read_kernel_json(const std::filesystem::path& path);
void write_kernel_json(const std::filesystem::path& path, const KernelFile& kf);

/// Scenario description parsed from a `key = value` file ('#' comments,
/// comma-separated lists). Missing keys take the defaults below.
struct ScenarioFile {
    std::vector<std::string> kernels{"g2"};
    std::vector<std::string> targets{"f1"};
    std::vector<double> snrs{5.0};
    std::vector<int> ns{100};
    double horizon = 100.0;
    int m_terms = 11;
    int reps = 400;
    std::uint64_t seed = 1;
    double b_constant = 0.5;
    double c_pen = 1.5;
    std::optional<double> alpha;  // empty = regression
    std::optional<double> a;      // empty = per-kernel scale selection
    std::optional<double> sigma;  // empty = snr-calibrated level
    ZMode zmode = ZMode::Quadrature;
    bool refit = false;
    SweepConfig sweep;

    /// Resolved key = value echo, suitable for re-serialization.
    Json echo() const;
    /// Scenario for one (kernel, target, snr, n) cell.
    Scenario make_scenario(const std::string& kernel, const std::string& target, double snr,
                           int n) const;
};

/// Parses and validates; every problem is reported in one exception message.
ScenarioFile parse_scenario_file(const std::filesystem::path& path);
/// Inverse of parse: writes a file that parses back to the same scenario.
void write_scenario_file(const std::filesystem::path& path, const Json& echo);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

Json risk_report_json(const RiskReport& report);
Json comparison_report_json(const ComparisonReport& report);
Json penalty_table_json(const PenaltyTable& table);

}

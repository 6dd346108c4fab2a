#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lagdeconv/errors.hpp"
#include "lagdeconv/io.hpp"
#include "lagdeconv/simulate.hpp"
#include "support/oracles.hpp"

using namespace lagdeconv;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("lagdeconv_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LAGDECONV_CLI_PATH) + " " + args + " 2>/dev/null";
    return std::system(cmd.c_str()) / 256;
}

}  // namespace

TEST_CASE("series csv round-trips exactly") {
    const fs::path dir = temp_dir("csv");
    oracles::TestRng rng(1);
    Vector t(25), v(25);
    for (int i = 0; i < 25; ++i) {
        t[i] = (i + 1) * 0.4;
        v[i] = rng.uniform(-5.0, 5.0);
    }
    io::write_series_csv(dir / "s.csv", t, v);
    const Observations obs = io::read_series_csv(dir / "s.csv");
    CHECK(obs.times == t);
    CHECK(obs.values == v);
}

TEST_CASE("series csv errors carry line numbers") {
    const fs::path dir = temp_dir("csv_bad");
    {
        std::ofstream out(dir / "bad.csv");
        out << "t,value\n1.0,2.0\nnot-a-number,3.0\n";
    }
    try {
        io::read_series_csv(dir / "bad.csv");
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("kernel json round-trips") {
    const fs::path dir = temp_dir("kernel");
    io::KernelFile kf;
    kf.a = 0.25;
    kf.m = 4;
    kf.coeffs = {1.0, -0.5, 0.25, 0.125};
    kf.fit_rmse = 1e-9;
    kf.config["command"] = "fit-kernel";
    io::write_kernel_json(dir / "kernel.json", kf);
    const io::KernelFile back = io::read_kernel_json(dir / "kernel.json");
    CHECK(back.a == kf.a);
    CHECK(back.m == kf.m);
    CHECK(back.coeffs == kf.coeffs);
    CHECK(back.fit_rmse == kf.fit_rmse);
}

TEST_CASE("scenario parser accepts a grid and reports all errors at once") {
    const fs::path dir = temp_dir("scenario");
    {
        std::ofstream out(dir / "ok.toml");
        out << "# comment\n"
            << "kernels = g2, g3\n"
            << "targets = f1, f5\n"
            << "snrs = 5, 15\n"
            << "ns = 50, 100\n"
            << "T = 100\n"
            << "M = 11\n"
            << "reps = 3\n"
            << "seed = 7\n"
            << "a = auto\n";
    }
    const io::ScenarioFile sf = io::parse_scenario_file(dir / "ok.toml");
    CHECK(sf.kernels.size() == 2);
    CHECK(sf.targets.size() == 2);
    CHECK(sf.reps == 3);
    CHECK_FALSE(sf.a.has_value());
    // round trip through the echo
    io::write_scenario_file(dir / "echo.toml", sf.echo());
    const io::ScenarioFile back = io::parse_scenario_file(dir / "echo.toml");
    CHECK(back.echo() == sf.echo());

    {
        std::ofstream out(dir / "bad.toml");
        out << "kernels = g9\n"
            << "reps = 0\n"
            << "snrs = -1\n";
    }
    try {
        io::parse_scenario_file(dir / "bad.toml");
        CHECK(false);
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("kernel") != std::string::npos);
        CHECK(msg.find("reps") != std::string::npos);
        CHECK(msg.find("snr") != std::string::npos);
    }
}

TEST_CASE("cli fit-kernel recovers an exactly representable curve") {
    const fs::path dir = temp_dir("cli_fitkernel");
    const LaguerreBasis basis(0.5, 1);
    Vector t(64), v(64);
    for (int i = 0; i < 64; ++i) {
        t[i] = (i + 1) * 40.0 / 64.0;
        v[i] = basis_eval(basis, 0, t[i]);
    }
    io::write_series_csv(dir / "phi0.csv", t, v);
    const int rc = run_cli("fit-kernel --data " + (dir / "phi0.csv").string() +
                           " --M 3 --a 0.5 --out " + dir.string());
    REQUIRE(rc == 0);
    const io::KernelFile kf = io::read_kernel_json(dir / "kernel.json");
    CHECK(kf.coeffs[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(kf.coeffs[1]) < 1e-8);
    CHECK(std::abs(kf.coeffs[2]) < 1e-8);
    CHECK(kf.fit_rmse < 1e-6);
}

TEST_CASE("cli fit-kernel fits the g2 curve below one percent rmse") {
    const fs::path dir = temp_dir("cli_fitkernel_g2");
    Vector t(400), v(400);
    for (int i = 0; i < 400; ++i) {
        t[i] = (i + 1) * 0.25;
        v[i] = kernel_eval(Kernel::G2, t[i]);
    }
    io::write_series_csv(dir / "g2.csv", t, v);
    const int rc = run_cli("fit-kernel --data " + (dir / "g2.csv").string() +
                           " --M 11 --out " + dir.string());
    REQUIRE(rc == 0);
    const io::KernelFile kf = io::read_kernel_json(dir / "kernel.json");
    CHECK(kf.fit_rmse < 0.01);  // max |g2| = 1 after normalization
}

TEST_CASE("cli fit-kernel rejects too few rows with exit code 2") {
    const fs::path dir = temp_dir("cli_fitkernel_short");
    const Vector t{1.0, 2.0, 3.0}, v{0.1, 0.2, 0.3};
    io::write_series_csv(dir / "short.csv", t, v);
    const int rc = run_cli("fit-kernel --data " + (dir / "short.csv").string() +
                           " --M 11 --out " + dir.string());
    CHECK(rc == 3);  // numerical: rank-deficient design
}

TEST_CASE("cli fit: end-to-end on a simulated dataset") {
    const fs::path dir = temp_dir("cli_fit");
    Scenario sc;
    sc.kernel = Kernel::G2;
    sc.target = Target::F1;
    sc.n = 100;
    sc.horizon = 100.0;
    sc.snr = 8.0;
    sc.reps = 1;
    sc.seed = 11;
    sc.a = 0.16;
    const ScenarioData data = make_scenario_data(sc);
    const Observations obs = simulate_dataset(sc, data, 0);
    io::write_series_csv(dir / "y.csv", obs.times, obs.values);

    io::KernelFile kf;
    kf.a = data.a;
    kf.m = 11;
    kf.coeffs = data.g_coeffs.coeffs;
    kf.fit_rmse = 0.0;
    io::write_kernel_json(dir / "kernel.json", kf);

    const std::string base = "fit --data " + (dir / "y.csv").string() + " --kernel " +
                             (dir / "kernel.json").string() + " --sigma " +
                             io::format_double(data.sigma);
    REQUIRE(run_cli(base + " --out " + (dir / "r1").string()) == 0);
    const io::Json rep = io::read_json(dir / "r1" / "fit_report.json");
    const int m_hat = rep.at("m_hat").get<int>();
    CHECK(m_hat >= 1);
    CHECK(m_hat <= 11);
    CHECK(rep.at("coefficients").size() == static_cast<std::size_t>(m_hat));
    // curves have one row per observation
    std::ifstream curves(dir / "r1" / "curves.csv");
    int lines = 0;
    std::string line;
    while (std::getline(curves, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 101);  // header + n

    // delay 0 and absent produce identical reports
    REQUIRE(run_cli(base + " --delay 0 --out " + (dir / "r2").string()) == 0);
    CHECK(slurp(dir / "r1" / "fit_report.json") == slurp(dir / "r2" / "fit_report.json"));
    CHECK(slurp(dir / "r1" / "curves.csv") == slurp(dir / "r2" / "curves.csv"));
}

TEST_CASE("cli fit: sigma estimate on noiseless data nearly interpolates") {
    const fs::path dir = temp_dir("cli_fit_noiseless");
    Scenario sc;
    sc.kernel = Kernel::G2;
    sc.target = Target::F1;
    sc.n = 200;
    sc.horizon = 100.0;
    sc.snr = 8.0;
    sc.reps = 1;
    sc.seed = 3;
    sc.a = 0.16;
    sc.sigma_override = 0.0;
    const ScenarioData data = make_scenario_data(sc);
    const Observations obs = simulate_dataset(sc, data, 0);
    io::write_series_csv(dir / "y.csv", obs.times, obs.values);
    io::KernelFile kf;
    kf.a = data.a;
    kf.m = 11;
    kf.coeffs = data.g_coeffs.coeffs;
    io::write_kernel_json(dir / "kernel.json", kf);
    REQUIRE(run_cli("fit --data " + (dir / "y.csv").string() + " --kernel " +
                    (dir / "kernel.json").string() + " --sigma estimate --out " +
                    dir.string()) == 0);
    const io::Json rep = io::read_json(dir / "fit_report.json");
    CHECK(rep.at("sigma_used").get<double>() < 1e-3);
    // fitted curve close to the data
    const Vector fhat = [&] {
        std::ifstream in(dir / "curves.csv");
        std::string line;
        std::getline(in, line);
        Vector out;
        while (std::getline(in, line)) {
            const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
            const auto c3 = line.find(',', c2 + 1);
            out.push_back(std::stod(line.substr(c2 + 1, c3 - c2 - 1)));
        }
        return out;
    }();
    double worst = 0.0;
    for (std::size_t i = 0; i < obs.n(); ++i)
        worst = std::max(worst, std::abs(fhat[i] - target_eval(Target::F1, obs.times[i])));
    CHECK(worst < 0.05);
}

TEST_CASE("cli simulate: single deterministic cell and validation") {
    const fs::path dir = temp_dir("cli_sim");
    {
        std::ofstream out(dir / "sc.toml");
        out << "kernels = g2\ntargets = f1\nsnrs = 8\nns = 40\nT = 100\nM = 6\n"
            << "reps = 2\nseed = 5\na = 0.16\n";
    }
    REQUIRE(run_cli("simulate " + (dir / "sc.toml").string() + " --out " +
                    (dir / "o1").string()) == 0);
    REQUIRE(run_cli("simulate " + (dir / "sc.toml").string() + " --out " +
                    (dir / "o2").string()) == 0);
    CHECK(slurp(dir / "o1" / "simulate_report.json") ==
          slurp(dir / "o2" / "simulate_report.json"));
    CHECK(slurp(dir / "o1" / "risk_table.csv") == slurp(dir / "o2" / "risk_table.csv"));

    {
        std::ofstream out(dir / "bad.toml");
        out << "kernels = nope\n";
    }
    CHECK(run_cli("simulate " + (dir / "bad.toml").string() + " --out " + dir.string()) ==
          2);
}

TEST_CASE("cli compare: validation of degenerate scenarios") {
    const fs::path dir = temp_dir("cli_cmp");
    {
        std::ofstream out(dir / "multi.toml");
        out << "kernels = g2, g3\ntargets = f1\nsnrs = 8\nns = 40\nreps = 1\n";
    }
    CHECK(run_cli("compare " + (dir / "multi.toml").string() + " --out " + dir.string()) ==
          2);
    {
        std::ofstream out(dir / "zero.toml");
        out << "kernels = g2\ntargets = f1\nsnrs = 8\nns = 40\nreps = 0\n";
    }
    CHECK(run_cli("compare " + (dir / "zero.toml").string() + " --out " + dir.string()) ==
          2);
}

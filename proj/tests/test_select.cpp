#include <doctest.h>

#include <cmath>

#include "lagdeconv/errors.hpp"
#include "lagdeconv/select.hpp"
#include "lagdeconv/simulate.hpp"
#include "support/oracles.hpp"

using namespace lagdeconv;

namespace {

Scenario quiet_scenario(Kernel k, Target t, int n, double snr) {
    Scenario sc;
    sc.kernel = k;
    sc.target = t;
    sc.n = n;
    sc.horizon = 100.0;
    sc.snr = snr;
    sc.reps = 1;
    sc.seed = 99;
    return sc;
}

}  // namespace

TEST_CASE("q_matrix identities") {
    {
        const LowerToeplitz ident{Vector(5, 0.0)};
        LowerToeplitz g = ident;
        g.first_col[0] = 1.0;
        const Matrix q = q_matrix(g, Matrix::identity(5));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                CHECK(q(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
    }
    {
        const LowerToeplitz scal{{2.0}};
        Matrix omega(1, 1);
        omega(0, 0) = 1.0;
        const Matrix q = q_matrix(scal, omega);
        CHECK(q(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
    }
}

TEST_CASE("q_matrix matches a dense oracle") {
    oracles::TestRng rng(3);
    const std::size_t m = 6;
    LowerToeplitz g;
    g.first_col = {1.2};
    for (std::size_t i = 1; i < m; ++i) g.first_col.push_back(rng.uniform(-0.5, 0.5));
    Matrix omega(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) omega(i, j) = (i == j) ? 1.0 : 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double v = rng.uniform(-0.08, 0.08);
            omega(i, j) = omega(j, i) = v;
        }
    const Matrix q = q_matrix(g, omega);
    // dense: Ginv * omega * Ginv^T
    Matrix dense(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) dense(i, j) = g.first_col[i - j];
    const Matrix ginv = oracles::gauss_jordan_inverse(dense);
    const Matrix want = matmul(matmul(ginv, omega), ginv.transposed());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            CHECK(q(i, j) == doctest::Approx(want(i, j)).epsilon(1e-10));
    CHECK(symmetry_gap(q) < 1e-14);
}

TEST_CASE("variance_trace") {
    CHECK(variance_trace(Matrix::identity(7)) == doctest::Approx(7.0));
    Matrix d(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 4.0;
    CHECK(variance_trace(d) == doctest::Approx(5.0));
}

TEST_CASE("variance_trace equals Frobenius norm of the PSD factor") {
    oracles::TestRng rng(5);
    const std::size_t m = 6;
    LowerToeplitz g;
    g.first_col = {1.0};
    for (std::size_t i = 1; i < m; ++i) g.first_col.push_back(rng.uniform(-0.4, 0.4));
    const Matrix q = q_matrix(g, Matrix::identity(m));
    Matrix l;
    REQUIRE(try_cholesky(q, l, 1e-14));
    double frob2 = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) frob2 += l(i, j) * l(i, j);
    CHECK(variance_trace(q) == doctest::Approx(frob2).epsilon(1e-12));
}

TEST_CASE("spectral_norm on closed-form cases and a random PSD matrix") {
    Matrix d(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 4.0;
    CHECK(spectral_norm(d) == doctest::Approx(4.0).epsilon(1e-12));
    Matrix two(2, 2);
    two(0, 0) = two(1, 1) = 2.0;
    two(0, 1) = two(1, 0) = 1.0;
    CHECK(spectral_norm(two) == doctest::Approx(3.0).epsilon(1e-12));

    oracles::TestRng rng(6);
    const std::size_t m = 8;
    Matrix b(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
    Matrix psd(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += b(i, k) * b(j, k);
            psd(i, j) = acc;
        }
    CHECK(spectral_norm(psd) ==
          doctest::Approx(oracles::max_eigenvalue_bisect(psd)).epsilon(1e-9));

    Matrix asym(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(spectral_norm(asym), NotSymmetric);
}

TEST_CASE("alpha regression on exact power laws") {
    {
        Vector rho2(7);
        for (int m = 1; m <= 7; ++m) rho2[m - 1] = static_cast<double>(m) * m;
        const AlphaFit f = estimate_alpha(rho2, 1, 7);
        CHECK(f.alpha == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(f.log_c == doctest::Approx(0.0).epsilon(1e-12));
    }
    {
        Vector rho2(7, 5.0);
        const AlphaFit f = estimate_alpha(rho2, 1, 7);
        CHECK(f.alpha == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(f.log_c == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    }
    {
        Vector rho2(7, 5.0);
        CHECK_THROWS_AS(estimate_alpha(rho2, 3, 3), DegenerateRegression);
    }
}

TEST_CASE("alpha regression slope for the g2 design sits near 2r") {
    // r = 3 for the g2 kernel, so the early-range slope lands in [5, 7]
    const Scenario sc = quiet_scenario(Kernel::G2, Target::F1, 100, 5.0);
    Scenario sc2 = sc;
    sc2.a = 0.25;
    const ScenarioData data = make_scenario_data(sc2);
    const Observations obs = simulate_dataset(sc2, data, 0);
    FitConfig cfg;
    cfg.sigma = data.sigma;
    const ModelFit fit_result = fit(obs, data.g_coeffs, cfg);
    Vector rho2;
    for (const PenaltyRow& row : fit_result.table.rows) rho2.push_back(row.rho2);
    const AlphaFit af = estimate_alpha(rho2, 1, 7);
    CHECK(af.alpha > 5.0);
    CHECK(af.alpha < 7.0);
}

TEST_CASE("penalty formula") {
    // m = 1: the log term vanishes
    CHECK(penalty_value(1, 1.0, 1.0, 1.0, 100.0, 100, 0.5, 0.0, 4.0) ==
          doctest::Approx(6.0).epsilon(1e-13));
    // arithmetic at m = 2 with the same settings as the closed-form check
    const double want = 4.0 * std::log(2.0);
    CHECK(penalty_value(2, 0.0, 1.0, 1.0, 64.0, 64, 1.0, 0.0, 1.0) ==
          doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("penalty table is positive and increasing beyond small m") {
    Scenario sc = quiet_scenario(Kernel::G2, Target::F1, 200, 5.0);
    sc.a = 0.25;
    const ScenarioData data = make_scenario_data(sc);
    const Observations obs = simulate_dataset(sc, data, 1);
    FitConfig cfg;
    cfg.sigma = data.sigma;
    const ModelFit fr = fit(obs, data.g_coeffs, cfg);
    for (const PenaltyRow& row : fr.table.rows) CHECK(row.pen > 0.0);
    for (std::size_t i = 2; i + 1 < fr.table.rows.size(); ++i)
        CHECK(fr.table.rows[i + 1].pen > fr.table.rows[i].pen);
}

TEST_CASE("contrast value") {
    const Vector full{3.0, 4.0, 1.0};
    CHECK(contrast_value(std::span<const double>(full.data(), 0), full) == 0.0);
    CHECK(contrast_value(std::span<const double>(full.data(), 2), full) ==
          doctest::Approx(-25.0));
    // literal two-term formula agrees for nested vectors
    oracles::TestRng rng(8);
    Vector fhat(9);
    for (double& v : fhat) v = rng.uniform(-2.0, 2.0);
    for (std::size_t m = 1; m <= fhat.size(); ++m) {
        double norm2 = 0.0, cross = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            norm2 += fhat[k] * fhat[k];
            cross += fhat[k] * fhat[k];
        }
        const double literal = norm2 - 2.0 * cross;
        CHECK(contrast_value(std::span<const double>(fhat.data(), m), fhat) ==
              doctest::Approx(literal).epsilon(1e-12));
    }
}

TEST_CASE("select_model takes the argmin with ties to the smallest m") {
    PenaltyTable table;
    table.rows.resize(3);
    for (int m = 1; m <= 3; ++m) table.rows[m - 1].m = m;
    table.rows[0].objective = 5.0;
    table.rows[1].objective = 1.0;
    table.rows[2].objective = 7.0;
    CHECK(select_model(table) == 2);
    for (auto& r : table.rows) r.objective = 4.2;
    CHECK(select_model(table) == 1);
}

TEST_CASE("noiseless basis-aligned data selects the one-term model") {
    // f = phi_0 with sigma -> 0 saturates the contrast at m = 1
    Scenario sc = quiet_scenario(Kernel::G2, Target::Custom, 400, 5.0);
    sc.a = 0.25;
    const LaguerreBasis basis(0.25, 11);
    sc.custom_target = [basis](double x) { return basis_eval(basis, 0, x); };
    sc.sigma_override = 1e-3;
    const ScenarioData data = make_scenario_data(sc);
    Observations obs(data.times, data.q_values, sc.horizon, data.sigma);  // no noise added
    FitConfig cfg;
    cfg.sigma = 1e-3;
    const ModelFit fr = fit(obs, data.g_coeffs, cfg);
    CHECK(fr.m_hat == 1);
    CHECK(fr.coeffs.coeffs[0] == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("fit recovers a basis-aligned target and its functionals") {
    const double a = 0.5;
    Scenario sc = quiet_scenario(Kernel::G2, Target::Custom, 400, 5.0);
    sc.a = a;
    const LaguerreBasis basis(a, 11);
    sc.custom_target = [basis](double x) { return basis_eval(basis, 0, x); };
    sc.sigma_override = 1e-8;
    const ScenarioData data = make_scenario_data(sc);
    const Observations obs = simulate_dataset(sc, data, 0);
    FitConfig cfg;
    cfg.sigma = 1e-8;
    const ModelFit fr = fit(obs, data.g_coeffs, cfg);
    CHECK(fr.coeffs.coeffs[0] == doctest::Approx(1.0).epsilon(1e-4));
    for (int k = 1; k < fr.m_hat; ++k) CHECK(std::abs(fr.coeffs.coeffs[k]) < 1e-4);
    // beta = f(0) = sqrt(2a), transit integral = sqrt(2/a)
    CHECK(fr.beta_hat == doctest::Approx(std::sqrt(2.0 * a)).epsilon(1e-3));
    CHECK(fr.transit_integral == doctest::Approx(std::sqrt(2.0 / a)).epsilon(1e-3));
}

TEST_CASE("functional formulas verified against quadrature") {
    for (double a : {0.25, 0.5, 1.0}) {
        const LaguerreBasis basis(a, 8);
        for (int k = 0; k < 7; ++k) {
            CHECK(basis_eval(basis, k, 0.0) ==
                  doctest::Approx(std::sqrt(2.0 * a)).epsilon(1e-12));
            auto phik = [&](double t) { return basis_eval(basis, k, t); };
            const double integral =
                oracles::adaptive_simpson(phik, 0.0, (4.0 * k + 60.0) / a, 1e-12);
            const double want = (k % 2 == 0 ? 1.0 : -1.0) * std::sqrt(2.0 / a);
            CHECK(integral == doctest::Approx(want).epsilon(1e-8));
        }
    }
}

TEST_CASE("zero data gives the smallest model and zero coefficients") {
    Scenario sc = quiet_scenario(Kernel::G2, Target::F1, 200, 5.0);
    sc.a = 0.25;
    const ScenarioData data = make_scenario_data(sc);
    Observations obs(data.times, Vector(data.times.size(), 0.0), sc.horizon, 1.0);
    FitConfig cfg;
    cfg.sigma = 1.0;
    const ModelFit fr = fit(obs, data.g_coeffs, cfg);
    CHECK(fr.m_hat == 1);
    double norm2 = 0.0;
    for (double c : fr.coeffs.coeffs) norm2 += c * c;
    CHECK(norm2 < fr.table.rows[0].pen);
}

TEST_CASE("nesting: every per-m vector is a prefix of the full solve") {
    Scenario sc = quiet_scenario(Kernel::G3, Target::F1, 100, 5.0);
    const ScenarioData data = make_scenario_data(sc);
    const Observations obs = simulate_dataset(sc, data, 3);
    FitConfig cfg;
    cfg.sigma = data.sigma;
    const ModelFit fr = fit(obs, data.g_coeffs, cfg);
    for (int k = 0; k < fr.m_hat; ++k)
        CHECK(fr.coeffs.coeffs[k] == fr.full_coeffs[k]);  // exact
}

TEST_CASE("PSD chain: v2 >= rho2 > 0 for every model size") {
    Scenario sc = quiet_scenario(Kernel::G2, Target::F1, 150, 8.0);
    const ScenarioData data = make_scenario_data(sc);
    const Observations obs = simulate_dataset(sc, data, 0);
    FitConfig cfg;
    cfg.sigma = data.sigma;
    const ModelFit fr = fit(obs, data.g_coeffs, cfg);
    for (const PenaltyRow& row : fr.table.rows) {
        CHECK(row.rho2 > 0.0);
        CHECK(row.v2 >= row.rho2 * (1.0 - 1e-12));
    }
}

TEST_CASE("scaling equivariance: y and sigma scale together") {
    Scenario sc = quiet_scenario(Kernel::G2, Target::F1, 100, 5.0);
    const ScenarioData data = make_scenario_data(sc);
    const Observations obs = simulate_dataset(sc, data, 7);
    FitConfig cfg;
    cfg.sigma = data.sigma;
    const ModelFit base = fit(obs, data.g_coeffs, cfg);

    const double c = 3.7;
    Vector scaled_y(obs.values);
    for (double& v : scaled_y) v *= c;
    const Observations scaled(obs.times, scaled_y, obs.horizon, data.sigma * c);
    FitConfig cfg2;
    cfg2.sigma = data.sigma * c;
    const ModelFit scaled_fit = fit(scaled, data.g_coeffs, cfg2);
    CHECK(scaled_fit.m_hat == base.m_hat);
    for (int k = 0; k < base.m_hat; ++k)
        CHECK(scaled_fit.coeffs.coeffs[k] ==
              doctest::Approx(c * base.coeffs.coeffs[k]).epsilon(1e-12));
}

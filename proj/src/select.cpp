#include "lagdeconv/select.hpp"

#include <algorithm>
#include <cmath>

#include "lagdeconv/errors.hpp"

namespace lagdeconv {

Matrix q_matrix(const LowerToeplitz& g_m, const Matrix& omega_m) {
    const std::size_t m = g_m.size();
    if (omega_m.rows() != m || omega_m.cols() != m)
        throw ValidationError("q_matrix: dimension mismatch");
    if (symmetry_gap(omega_m) > 1e-8)
        throw NotSymmetric("q_matrix: omega is not symmetric");
    double bmax = 0.0;
    for (double b : g_m.first_col) bmax = std::max(bmax, std::abs(b));
    if (std::abs(g_m.first_col[0]) <= 1e-12 * bmax)
        throw NearSingular("q_matrix: triangular factor is numerically singular");

    Matrix l;
    if (!try_cholesky(omega_m, l, 1e-14))
        throw NumericalError("q_matrix: omega is not positive definite");
    // S = G^{-1} L column by column, then Q = S S^T.
    Matrix s(m, m);
    Vector col(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) col[i] = l(i, j);
        for (std::size_t i = 0; i < m; ++i) {
            double acc = col[i];
            for (std::size_t k = 0; k < i; ++k) acc -= g_m.first_col[i - k] * s(k, j);
            s(i, j) = acc / g_m.first_col[0];
        }
    }
    Matrix q(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += s(i, k) * s(j, k);
            q(i, j) = q(j, i) = acc;
        }
    return q;
}

double variance_trace(const Matrix& q) {
    if (q.rows() != q.cols()) throw ValidationError("variance_trace: matrix not square");
    double tr = 0.0;
    for (std::size_t i = 0; i < q.rows(); ++i) tr += q(i, i);
    return tr;
}

double spectral_norm(const Matrix& q) {
    if (q.rows() != q.cols()) throw ValidationError("spectral_norm: matrix not square");
    if (symmetry_gap(q) > 1e-8) throw NotSymmetric("spectral_norm: matrix not symmetric");
    const Vector ev = jacobi_eigenvalues(q, 1e-12);
    return ev.empty() ? 0.0 : ev.back();
}

AlphaFit estimate_alpha(std::span<const double> rho2_by_m, int m_lo, int m_hi) {
    if (m_lo < 1 || m_hi < m_lo || static_cast<std::size_t>(m_hi) > rho2_by_m.size())
        throw ValidationError("estimate_alpha: bad m range");
    std::vector<double> xs, ys;
    for (int m = m_lo; m <= m_hi; ++m) {
        const double r2 = rho2_by_m[m - 1];
        if (!(r2 > 0.0)) throw NumericalError("estimate_alpha: nonpositive rho^2");
        xs.push_back(std::log(static_cast<double>(m)));
        ys.push_back(std::log(r2));
    }
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= xs.size();
    ybar /= ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (sxx <= 0.0)
        throw DegenerateRegression("estimate_alpha: log m has no spread in the range");
    AlphaFit fit;
    fit.alpha = sxy / sxx;
    fit.log_c = ybar - fit.alpha * xbar;
    return fit;
}

double penalty_value(int m, double v2, double rho2, double sigma, double horizon,
                     std::size_t n, double B, double alpha, double c_pen) {
    if (m < 1) throw ValidationError("penalty_value: m must be at least 1");
    if (!(B > 0.0) || !(c_pen > 0.0))
        throw ValidationError("penalty_value: B and c_pen must be positive");
    const double base = c_pen * sigma * sigma * horizon / static_cast<double>(n);
    return base * ((1.0 + B) * v2 +
                   (1.0 + 1.0 / B) * (2.0 * alpha + 2.0) * rho2 *
                       std::log(static_cast<double>(m)));
}

double contrast_value(std::span<const double> fhat_m, std::span<const double> fhat_full) {
    if (fhat_m.size() > fhat_full.size())
        throw ValidationError("contrast_value: m exceeds the full solve size");
    double acc = 0.0;
    for (double c : fhat_m) acc += c * c;
    return -acc;
}

int select_model(const PenaltyTable& table) {
    if (table.rows.empty()) throw ValidationError("select_model: empty table");
    int best = table.rows.front().m;
    double best_obj = table.rows.front().objective;
    for (const PenaltyRow& row : table.rows) {
        if (row.objective < best_obj) {
            best_obj = row.objective;
            best = row.m;
        }
    }
    return best;
}

ModelFit fit(const Observations& obs, const CoeffVector& g_coeffs, const FitConfig& config) {
    if (config.M < 1) throw ValidationError("fit: M must be at least 1");
    if (g_coeffs.coeffs.size() < static_cast<std::size_t>(config.M))
        throw ValidationError("fit: kernel coefficient vector shorter than M");
    const LaguerreBasis basis(g_coeffs.basis.a, config.M);

    const DesignSummary summary = summarize_design(obs, basis, config.zmode);
    const LowerToeplitz g_full = build_toeplitz(g_coeffs, config.M);
    const Vector fhat_full = toeplitz_solve(g_full, summary.z);

    double sigma = 0.0;
    if (config.sigma) {
        sigma = *config.sigma;
    } else if (obs.sigma) {
        sigma = *obs.sigma;
    } else {
        sigma = estimate_sigma(obs).value;
    }

    const int M = config.M;
    Vector v2(M), rho2(M);
    for (int m = 1; m <= M; ++m) {
        const LowerToeplitz g_m{Vector(g_full.first_col.begin(), g_full.first_col.begin() + m)};
        const Matrix q = q_matrix(g_m, omega_sub(summary, m));
        v2[m - 1] = variance_trace(q);
        rho2[m - 1] = spectral_norm(q);
    }

    PenaltyTable table;
    if (config.alpha) {
        table.alpha = *config.alpha;
        table.alpha_fitted = false;
    } else {
        const AlphaFit af =
            estimate_alpha(rho2, config.alpha_m_lo, std::min(config.alpha_m_hi, M));
        table.alpha = af.alpha;
        table.log_c_rho = af.log_c;
        table.alpha_fitted = true;
    }

    // Per-m coefficient vectors: prefixes of the one-shot solve, or per-m
    // least-squares refits when the experimentation flag is on.
    std::vector<Vector> per_m;
    if (config.refit_per_m) {
        per_m.resize(M);
        const Matrix phi = design_matrix(basis, obs.times);
        for (int m = 1; m <= M; ++m) {
            Matrix phi_m(phi.rows(), m);
            for (std::size_t i = 0; i < phi.rows(); ++i)
                for (int k = 0; k < m; ++k) phi_m(i, k) = phi(i, k);
            const Vector z_m = least_squares(phi_m, obs.values);
            const LowerToeplitz g_m{
                Vector(g_full.first_col.begin(), g_full.first_col.begin() + m)};
            per_m[m - 1] = toeplitz_solve(g_m, z_m);
        }
    }

    table.rows.resize(M);
    for (int m = 1; m <= M; ++m) {
        PenaltyRow& row = table.rows[m - 1];
        row.m = m;
        row.v2 = v2[m - 1];
        row.rho2 = rho2[m - 1];
        row.pen = penalty_value(m, row.v2, row.rho2, sigma, obs.horizon, obs.n(), config.B,
                                table.alpha, config.c_pen);
        if (config.refit_per_m) {
            // literal two-term contrast against the full solve
            double norm2 = 0.0, cross = 0.0;
            for (int k = 0; k < m; ++k) {
                norm2 += per_m[m - 1][k] * per_m[m - 1][k];
                cross += per_m[m - 1][k] * fhat_full[k];
            }
            row.contrast = norm2 - 2.0 * cross;
        } else {
            row.contrast = contrast_value(
                std::span<const double>(fhat_full.data(), static_cast<std::size_t>(m)),
                fhat_full);
        }
        row.objective = row.contrast + row.pen;
    }

    ModelFit result;
    result.m_hat = select_model(table);
    result.table = std::move(table);
    result.full_coeffs = fhat_full;
    const Vector& selected =
        config.refit_per_m ? per_m[result.m_hat - 1] : fhat_full;
    result.coeffs = CoeffVector{
        Vector(selected.begin(), selected.begin() + result.m_hat), basis};
    result.sigma_used = sigma;
    result.config = config;
    if (config.refit_per_m) result.per_m_coeffs = std::move(per_m);

    // f(0) and the total integral in closed form: phi_k(0) = sqrt(2a) and
    // integral of phi_k over [0, inf) = (-1)^k sqrt(2/a).
    const double a = basis.a;
    double b0 = 0.0, integ = 0.0;
    for (int k = 0; k < result.m_hat; ++k) {
        b0 += result.coeffs.coeffs[k];
        integ += (k % 2 == 0 ? 1.0 : -1.0) * result.coeffs.coeffs[k];
    }
    result.beta_hat = std::sqrt(2.0 * a) * b0;
    result.transit_integral = std::sqrt(2.0 / a) * integ;
    return result;
}

}

#pragma once

#include <optional>

#include "lagdeconv/design.hpp"
#include "lagdeconv/toeplitz.hpp"

namespace lagdeconv {

/// Per-model diagnostics driving the size selection.
struct PenaltyRow {
    int m = 0;
    double v2 = 0.0;        // trace of Q_m
    double rho2 = 0.0;      // largest eigenvalue of Q_m
    double pen = 0.0;       // penalty value
    double contrast = 0.0;  // gamma_n^2 of the m-term fit
    double objective = 0.0; // contrast + pen
};

struct PenaltyTable {
    std::vector<PenaltyRow> rows;  // rows[m-1] describes model size m
    double alpha = 0.0;
    double log_c_rho = 0.0;        // regression intercept, diagnostic only
    bool alpha_fitted = false;
};

struct FitConfig {
    int M = 11;
    double B = 0.5;
    double c_pen = 1.5;                // 4.0 is the conservative theory value
    std::optional<double> alpha;       // fixed exponent; empty = regress
    int alpha_m_lo = 1;
    int alpha_m_hi = 7;
    std::optional<double> sigma;       // known noise level; empty = estimate
    ZMode zmode = ZMode::Quadrature;
    bool refit_per_m = false;          // per-m least squares instead of truncation
};

struct ModelFit {
    int m_hat = 0;
    CoeffVector coeffs;        // selected coefficients (length m_hat)
    Vector full_coeffs;        // all M coefficients of the one-shot solve
    PenaltyTable table;
    double beta_hat = 0.0;           // fitted value at t = 0
    double transit_integral = 0.0;   // integral of the fitted curve over [0, inf)
    double sigma_used = 0.0;
    FitConfig config;
    // per-m coefficient vectors when refit_per_m is on (empty otherwise)
    std::vector<Vector> per_m_coeffs;
};

/// Q_m = G_m^{-1} Omega_m G_m^{-T}, computed through Omega's Cholesky factor
/// (solve G S = L, Q = S S^T) and symmetrized.
Matrix q_matrix(const LowerToeplitz& g_m, const Matrix& omega_m);

/// Trace of Q.
double variance_trace(const Matrix& q);

/// Largest eigenvalue of a symmetric PSD matrix by cyclic Jacobi sweeps.
/// Throws NotSymmetric when the input is asymmetric beyond 1e-8.
double spectral_norm(const Matrix& q);

struct AlphaFit {
    double alpha = 0.0;
    double log_c = 0.0;
};

/// OLS of log rho_m^2 on log m over m in [m_lo, m_hi]; rho2_by_m[i] holds the
/// value for m = i + 1.
AlphaFit estimate_alpha(std::span<const double> rho2_by_m, int m_lo, int m_hi);

/// pen(m) = c_pen sigma^2 (T/n) [ (1+B) v2 + (1+1/B) (2 alpha + 2) rho2 log m ].
double penalty_value(int m, double v2, double rho2, double sigma, double horizon,
                     std::size_t n, double B, double alpha, double c_pen);

/// Contrast of the m-term fit: -sum of squared coefficients (the cross term
/// collapses against the full solve because the fits nest).
double contrast_value(std::span<const double> fhat_m, std::span<const double> fhat_full);

/// argmin of the objective; ties break toward the smallest m.
int select_model(const PenaltyTable& table);

/// Full pipeline: design summary, one-shot Toeplitz solve, per-m table,
/// selection, and the derived functionals.
ModelFit fit(const Observations& obs, const CoeffVector& g_coeffs, const FitConfig& config);

}

#pragma once

#include <optional>
#include <span>

#include "lagdeconv/laguerre.hpp"
#include "lagdeconv/linalg.hpp"

namespace lagdeconv {

/// Discrete observations y(t_i) on 0 < t_1 < ... < t_n <= T.
struct Observations {
    Vector times;
    Vector values;
    double horizon = 0.0;
    std::optional<double> sigma;  // noise level when known

    Observations(Vector times_, Vector values_, double horizon_,
                 std::optional<double> sigma_ = std::nullopt);
    std::size_t n() const { return times.size(); }
};

/// How the observed Laguerre coefficient vector z is computed.
///  - Quadrature: z_l = <y, phi_l> by the composite trapezoid rule on
///    {0, t_1, ..., t_n} with y(0) = 0 (the model forces q(0) = 0).
///    Truncating z is then literally dropping trailing inner products, and
///    the m-term fits nest exactly.
///  - LeastSquares: z = argmin ||Phi z - y|| via Householder QR. Interpolates
///    in-span data exactly, but on coarse grids the Gram matrix can have
///    near-null directions (mass hiding before the first sample) whose
///    amplification through G^{-1} destabilizes the estimator.
enum class ZMode { Quadrature, LeastSquares };

struct DesignSummary {
    Matrix A;       // (T/n) Phi^T Phi, symmetric positive definite
    Matrix Omega;   // A^{-1}
    Vector z;       // observed Laguerre coefficients
    LaguerreBasis basis;
    double horizon = 0.0;
    std::size_t n = 0;
    ZMode zmode = ZMode::Quadrature;
};

/// Builds A, Omega and z. Throws RankDeficientDesign when the Cholesky pivot
/// test on A fails (basis too large for the grid).
DesignSummary summarize_design(const Observations& obs, const LaguerreBasis& basis,
                               ZMode zmode = ZMode::Quadrature);

/// Omega_m = inverse of the leading m x m block of A (the per-m Gram
/// inverse), not the leading block of Omega.
Matrix omega_sub(const DesignSummary& summary, int m);

/// Re-index time so the convolution origin sits at delta: keeps samples with
/// t_i > delta at times t_i - delta, horizon T - delta.
Observations shift_delay(const Observations& obs, double delta);

struct SigmaEstimate {
    double value = 0.0;
    bool irregular_spacing = false;  // estimator biased when spacing varies > 20%
};

/// First-difference noise estimator sigma^2 = sum (y_{i+1} - y_i)^2 / (2(n-1)).
SigmaEstimate estimate_sigma(const Observations& obs);

}

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lagdeconv/linalg.hpp"

namespace lagdeconv {

/// Orthonormal Laguerre-function system phi_k(t) = sqrt(2a) e^{-at} L_k(2at)
/// on [0, inf). `a` is the inverse-time scale, `size` the number of functions
/// kept (k = 0 .. size-1).
struct LaguerreBasis {
    double a = 0.5;
    int size = 1;

    LaguerreBasis() = default;
    LaguerreBasis(double a_, int size_);
};

/// Laguerre polynomial L_k(x), three-term recurrence.
double laguerre_poly_eval(int k, double x);

/// phi_k(t). The e^{-at} weight is folded into the recurrence so large k*t
/// cannot overflow.
double basis_eval(const LaguerreBasis& basis, int k, double t);

/// phi_0(t) .. phi_{m-1}(t) in one recurrence pass; out.size() == m.
void basis_eval_all(const LaguerreBasis& basis, double t, std::span<double> out);

/// n x M matrix with entry (i, k) = phi_k(times[i]).
Matrix design_matrix(const LaguerreBasis& basis, std::span<const double> times);

/// Coefficients c_0 .. c_{m-1} in the basis; the represented function is
/// sum_k c_k phi_k.
struct CoeffVector {
    Vector coeffs;
    LaguerreBasis basis;
};

struct QuadratureConfig {
    int panel_points = 32;     // Gauss-Legendre points per panel
    double tail_rtol = 1e-13;  // stop once panel contributions fall below this
    double tail_cap_factor = 4.0;
};

/// Projection coefficients c_k = integral of func * phi_k over [0, inf),
/// composite Gauss-Legendre on panels of width 2/a continued until the
/// contributions die out. Throws QuadratureError when the integrand still
/// carries mass at the cap (func grows too fast against the weight).
CoeffVector project_function(const std::function<double(double)>& func,
                             const LaguerreBasis& basis, int m,
                             const QuadratureConfig& quad = {});

/// Values of the expansion at the given times.
Vector expand(const CoeffVector& coeffs, std::span<const double> times);

/// Geometric grid with `count` points from lo to hi inclusive.
Vector log_spaced(double lo, double hi, int count);

/// Default search grid for the scale parameter.
Vector default_scale_grid();

struct ScaleSelection {
    double a = 0.0;
    double fit_error = 0.0;  // RMS misfit of the M-term reconstruction
};

/// Pick the scale a from the grid that minimizes the discrete L2 error of the
/// M-term least-squares reconstruction of the sampled curve. Ties break
/// toward the smallest a.
ScaleSelection select_scale_a(std::span<const double> times, std::span<const double> values,
                              int M, std::span<const double> a_grid);

/// Same, for an analytic curve sampled on a dense grid over (0, horizon].
ScaleSelection select_scale_a(const std::function<double(double)>& g, int M,
                              std::span<const double> a_grid, double horizon,
                              int dense_n = 2048);

}

#pragma once

#include <complex>
#include <functional>
#include <span>

#include "lagdeconv/laguerre.hpp"
#include "lagdeconv/linalg.hpp"

namespace lagdeconv {

/// Lower-triangular Toeplitz matrix stored by its first column:
/// entry (i, j) = first_col[i - j] for j <= i, 0 otherwise.
struct LowerToeplitz {
    Vector first_col;
    std::size_t size() const { return first_col.size(); }
};

/// Convolution matrix of a kernel given by its Laguerre coefficients:
/// b_0 = (2a)^{-1/2} g0, b_k = (2a)^{-1/2} (g_k - g_{k-1}).
LowerToeplitz build_toeplitz(const CoeffVector& g_coeffs, int m);

/// y = T x.
Vector toeplitz_mul(const LowerToeplitz& t, std::span<const double> x);

/// Forward substitution for T x = y. Throws NearSingular when the diagonal
/// |b_0| falls below 1e-12 times the largest |b_k|.
Vector toeplitz_solve(const LowerToeplitz& t, std::span<const double> y);

/// Generating symbol of the matrix: the kernel's Laplace transform evaluated
/// at the Moebius image a(1+e^{i theta})/(1-e^{i theta}) of the unit circle.
/// theta = 0 (mod 2 pi) maps to infinity and is rejected. Test-side only; the
/// estimator itself never needs the transform.
std::complex<double> symbol_eval(
    const std::function<std::complex<double>(std::complex<double>)>& laplace_g, double a,
    double theta);

}

#include "lagdeconv/toeplitz.hpp"

#include <algorithm>
#include <cmath>

#include "lagdeconv/errors.hpp"

namespace lagdeconv {

LowerToeplitz build_toeplitz(const CoeffVector& g_coeffs, int m) {
    if (m < 1 || static_cast<std::size_t>(m) > g_coeffs.coeffs.size())
        throw ValidationError("build_toeplitz: kernel has fewer coefficients than m");
    const double s = 1.0 / std::sqrt(2.0 * g_coeffs.basis.a);
    Vector b(m);
    b[0] = s * g_coeffs.coeffs[0];
    for (int k = 1; k < m; ++k) b[k] = s * (g_coeffs.coeffs[k] - g_coeffs.coeffs[k - 1]);
    return LowerToeplitz{std::move(b)};
}

Vector toeplitz_mul(const LowerToeplitz& t, std::span<const double> x) {
    if (x.size() != t.size()) throw ValidationError("toeplitz_mul: dimension mismatch");
    const std::size_t m = t.size();
    Vector y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += t.first_col[i - j] * x[j];
        y[i] = acc;
    }
    return y;
}

Vector toeplitz_solve(const LowerToeplitz& t, std::span<const double> y) {
    if (y.size() != t.size()) throw ValidationError("toeplitz_solve: dimension mismatch");
    const std::size_t m = t.size();
    double bmax = 0.0;
    for (double b : t.first_col) bmax = std::max(bmax, std::abs(b));
    if (std::abs(t.first_col[0]) <= 1e-12 * bmax)
        throw NearSingular("toeplitz_solve: leading kernel coefficient is numerically zero");
    Vector x(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = y[i];
        for (std::size_t j = 0; j < i; ++j) acc -= t.first_col[i - j] * x[j];
        x[i] = acc / t.first_col[0];
    }
    return x;
}

std::complex<double> symbol_eval(
    const std::function<std::complex<double>(std::complex<double>)>& laplace_g, double a,
    double theta) {
    const double wrapped = std::remainder(theta, 2.0 * M_PI);
    if (std::abs(wrapped) < 1e-12)
        throw ValidationError("symbol_eval: theta = 0 (mod 2 pi) maps to infinity");
    const std::complex<double> z = std::polar(1.0, theta);
    const std::complex<double> s = a * (1.0 + z) / (1.0 - z);
    return laplace_g(s);
}

}

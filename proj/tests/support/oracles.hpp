#pragma once

// Test-side oracles, deliberately independent of the library's numerical
// paths: different quadrature, different eigensolver, different inverse.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "lagdeconv/linalg.hpp"

namespace oracles {

// ---- adaptive Simpson quadrature ------------------------------------------

inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-11, int depth = 50) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// ---- dense linear algebra ---------------------------------------------------

inline lagdeconv::Matrix gauss_jordan_inverse(lagdeconv::Matrix a) {
    const std::size_t n = a.rows();
    lagdeconv::Matrix inv = lagdeconv::Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) throw std::runtime_error("gauss_jordan: singular");
        if (piv != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(piv, c), a(col, c));
                std::swap(inv(piv, c), inv(col, c));
            }
        const double d = a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) /= d;
            inv(col, c) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

// Largest eigenvalue of a symmetric matrix by inertia bisection: the number
// of negative pivots of the LDL^T factorization of (Q - x I) counts the
// eigenvalues below x.
inline int eigenvalues_below(const lagdeconv::Matrix& q, double x) {
    const std::size_t n = q.rows();
    lagdeconv::Matrix a = q;
    for (std::size_t i = 0; i < n; ++i) a(i, i) -= x;
    std::vector<double> d(n, 0.0);
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    int negatives = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double dj = a(j, j);
        for (std::size_t k = 0; k < j; ++k) dj -= l[j][k] * l[j][k] * d[k];
        if (dj == 0.0) dj = -1e-300;  // nudge off an exact eigenvalue
        d[j] = dj;
        if (dj < 0.0) ++negatives;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l[i][k] * l[j][k] * d[k];
            l[i][j] = v / dj;
        }
    }
    return negatives;
}

inline double max_eigenvalue_bisect(const lagdeconv::Matrix& q, double tol = 1e-11) {
    const std::size_t n = q.rows();
    double hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(q(i, j));
        hi = std::max(hi, row);
    }
    double lo = -hi;
    for (int it = 0; it < 200 && (hi - lo) > tol * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eigenvalues_below(q, mid) >= static_cast<int>(n))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- radix-2 FFT -------------------------------------------------------------

inline void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::runtime_error("fft: size must be 2^k");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Fourier coefficients b_k = (1/N) sum_j B(theta_j) e^{-i k theta_j}.
inline std::vector<std::complex<double>> fourier_coefficients(
    const std::vector<std::complex<double>>& samples) {
    std::vector<std::complex<double>> a = samples;
    fft_inplace(a);
    for (auto& v : a) v /= static_cast<double>(samples.size());
    return a;
}

// ---- closed-form transforms --------------------------------------------------

// Laplace transform of the raw g2 kernel t^2 e^{-0.1 t}.
inline std::complex<double> g2_raw_laplace(std::complex<double> s) {
    const std::complex<double> d = s + 0.1;
    return 2.0 / (d * d * d);
}

// ---- deterministic pseudo-random helpers -------------------------------------

struct TestRng {
    std::mt19937_64 gen;
    explicit TestRng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(gen);
    }
    double normal() {
        std::normal_distribution<double> d(0.0, 1.0);
        return d(gen);
    }
};

}  // namespace oracles

#include "lagdeconv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lagdeconv/errors.hpp"

namespace lagdeconv {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::block(std::size_t r, std::size_t c) const {
    Matrix b(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) b(i, j) = (*this)(i, j);
    return b;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ValidationError("matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw ValidationError("matvec: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

double symmetry_gap(const Matrix& a) {
    double gap = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            scale = std::max(scale, std::abs(a(i, j)));
            if (j > i) gap = std::max(gap, std::abs(a(i, j) - a(j, i)));
        }
    return scale > 0.0 ? gap / scale : 0.0;
}

bool try_cholesky(const Matrix& a, Matrix& lower, double pivot_rtol) {
    const std::size_t n = a.rows();
    lower = Matrix(n, n);
    double max_pivot = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
        if (d <= 0.0) return false;
        max_pivot = std::max(max_pivot, d);
        if (d < pivot_rtol * max_pivot) return false;
        const double ljj = std::sqrt(d);
        lower(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            lower(i, j) = s / ljj;
        }
    }
    return true;
}

void solve_lower_inplace(const Matrix& lower, std::span<double> x) {
    const std::size_t n = lower.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = x[i];
        for (std::size_t j = 0; j < i; ++j) acc -= lower(i, j) * x[j];
        x[i] = acc / lower(i, i);
    }
}

void solve_lower_transposed_inplace(const Matrix& lower, std::span<double> x) {
    const std::size_t n = lower.rows();
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= lower(j, ii) * x[j];
        x[ii] = acc / lower(ii, ii);
    }
}

Matrix invert_spd(const Matrix& a, double pivot_rtol) {
    Matrix l;
    if (!try_cholesky(a, l, pivot_rtol))
        throw NumericalError("invert_spd: matrix is not positive definite to tolerance");
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    Vector col(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = 1.0;
        solve_lower_inplace(l, col);
        solve_lower_transposed_inplace(l, col);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    // kill roundoff asymmetry
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = inv(j, i) = v;
        }
    return inv;
}

Vector jacobi_eigenvalues(Matrix a, double tol) {
    const std::size_t n = a.rows();
    if (n == 0) return {};
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0) return Vector(n, 0.0);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > tol * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vector ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

Vector least_squares(const Matrix& x, std::span<const double> y, double rank_rtol) {
    const std::size_t n = x.rows(), m = x.cols();
    if (y.size() != n) throw ValidationError("least_squares: dimension mismatch");
    if (n < m) throw RankDeficientDesign("least_squares: fewer rows than columns");
    Matrix r = x;
    Vector b(y.begin(), y.end());
    // Householder QR, applying reflectors to b as we go.
    Vector v(n);
    double max_diag = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += r(i, k) * r(i, k);
        norm = std::sqrt(norm);
        if (norm < rank_rtol * std::max(max_diag, 1e-300))
            throw RankDeficientDesign("least_squares: rank-deficient design matrix");
        const double alpha = r(k, k) >= 0.0 ? -norm : norm;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            v[i] = r(i, k);
            if (i == k) v[i] -= alpha;
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 > 0.0) {
            for (std::size_t j = k; j < m; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < n; ++i) dot += v[i] * r(i, j);
                const double f = 2.0 * dot / vnorm2;
                for (std::size_t i = k; i < n; ++i) r(i, j) -= f * v[i];
            }
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * b[i];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) b[i] -= f * v[i];
        }
        max_diag = std::max(max_diag, std::abs(r(k, k)));
        if (std::abs(r(k, k)) < rank_rtol * max_diag)
            throw RankDeficientDesign("least_squares: rank-deficient design matrix");
    }
    Vector c(m);
    for (std::size_t ii = m; ii-- > 0;) {
        double acc = b[ii];
        for (std::size_t j = ii + 1; j < m; ++j) acc -= r(ii, j) * c[j];
        c[ii] = acc / r(ii, ii);
    }
    return c;
}

Svd jacobi_svd(const Matrix& a) {
    const std::size_t n = a.rows(), m = a.cols();
    Matrix w = a;
    Matrix v = Matrix::identity(m);
    const double eps = 1e-14;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    app += w(i, p) * w(i, p);
                    aqq += w(i, q) * w(i, q);
                    apq += w(i, p) * w(i, q);
                }
                if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double wp = w(i, p), wq = w(i, q);
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    Svd out;
    out.s.assign(m, 0.0);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    Vector norms(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) s2 += w(i, j) * w(i, j);
        norms[j] = std::sqrt(s2);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x1, std::size_t x2) { return norms[x1] > norms[x2]; });
    out.u = Matrix(n, m);
    out.v = Matrix(m, m);
    for (std::size_t jj = 0; jj < m; ++jj) {
        const std::size_t j = order[jj];
        out.s[jj] = norms[j];
        for (std::size_t i = 0; i < m; ++i) out.v(i, jj) = v(i, j);
        if (norms[j] > 0.0)
            for (std::size_t i = 0; i < n; ++i) out.u(i, jj) = w(i, j) / norms[j];
    }
    return out;
}

}

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lagdeconv {

using Vector = std::vector<double>;

/// Dense row-major matrix. Small sizes only (design matrices, Gram blocks);
/// everything here is O(n^3) direct code, which is the point: the solver
/// stack must be deterministic and easy to audit.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transposed() const;
    /// Leading r x c block as a copy.
    Matrix block(std::size_t r, std::size_t c) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);

/// Maximum absolute asymmetry |A - A^T| relative to the largest entry.
double symmetry_gap(const Matrix& a);

/// Lower Cholesky factor of a symmetric positive definite matrix.
/// Returns false when a pivot drops below pivot_rtol times the largest pivot
/// (or is nonpositive); `lower` is left unspecified in that case.
bool try_cholesky(const Matrix& a, Matrix& lower, double pivot_rtol = 1e-10);

/// Solve L x = b (L lower triangular) in place.
void solve_lower_inplace(const Matrix& lower, std::span<double> x);
/// Solve L^T x = b in place.
void solve_lower_transposed_inplace(const Matrix& lower, std::span<double> x);

/// Inverse of a symmetric positive definite matrix via its Cholesky factor.
Matrix invert_spd(const Matrix& a, double pivot_rtol = 1e-10);

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// ascending. Deterministic sweep order; converges to off-diagonal Frobenius
/// norm below tol * scale.
Vector jacobi_eigenvalues(Matrix a, double tol = 1e-12);

/// Least squares min ||X c - y|| by Householder QR. Throws
/// RankDeficientDesign when a diagonal of R falls below rank_rtol times the
/// largest one.
Vector least_squares(const Matrix& x, std::span<const double> y, double rank_rtol = 1e-10);

/// Thin SVD A = U diag(s) V^T by one-sided Jacobi. Singular values sorted
/// descending; deterministic.
struct Svd {
    Matrix u;   // n x m
    Vector s;   // m
    Matrix v;   // m x m
};
Svd jacobi_svd(const Matrix& a);

}

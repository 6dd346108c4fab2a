#include "lagdeconv/baseline.hpp"

#include <cmath>

#include "lagdeconv/errors.hpp"

namespace lagdeconv {

ConvolutionMatrix build_conv_matrix(const std::function<double(double)>& kernel,
                                    std::span<const double> times, QuadRule rule) {
    const std::size_t n = times.size();
    if (n < 2) throw ValidationError("build_conv_matrix: need at least 2 samples");
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw ValidationError("build_conv_matrix: times must increase");
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d = times[i + 1] - times[i];
        if (std::abs(d - dt) > 1e-9 * dt)
            throw ValidationError("build_conv_matrix: grid must be equispaced");
    }
    ConvolutionMatrix c;
    c.rule = rule;
    c.dt = dt;
    c.entries = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double w = dt;
            if (rule == QuadRule::Trapezoid) {
                if (i == 0) {
                    w = 0.0;  // empty integration interval
                } else if (j == 0 || j == i) {
                    w = 0.5 * dt;
                }
            }
            c.entries(i, j) = w * kernel(times[i] - times[j]);
        }
    }
    return c;
}

TikhonovSolver::TikhonovSolver(const ConvolutionMatrix& c, std::span<const double> lambdas)
    : c_(c.entries), lambdas_(lambdas.begin(), lambdas.end()) {
    const std::size_t n = c_.rows();
    Matrix ctc(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += c_(k, i) * c_(k, j);
            ctc(i, j) = ctc(j, i) = acc;
        }
    factors_.reserve(lambdas_.size());
    for (double lambda : lambdas_) {
        if (!(lambda > 0.0))
            throw ValidationError("tikhonov_solve: lambda must be positive");
        Matrix normal = ctc;
        for (std::size_t i = 0; i < n; ++i) normal(i, i) += lambda;
        Matrix l;
        if (!try_cholesky(normal, l, 1e-15))
            throw NumericalError("tikhonov_solve: regularized normal matrix not SPD");
        factors_.push_back(std::move(l));
    }
}

Vector TikhonovSolver::solve(std::span<const double> y, std::size_t lambda_index) const {
    if (lambda_index >= factors_.size())
        throw ValidationError("tikhonov_solve: lambda index out of range");
    const std::size_t n = c_.rows();
    if (y.size() != n) throw ValidationError("tikhonov_solve: dimension mismatch");
    Vector rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += c_(k, i) * y[k];
        rhs[i] = acc;
    }
    solve_lower_inplace(factors_[lambda_index], rhs);
    solve_lower_transposed_inplace(factors_[lambda_index], rhs);
    return rhs;
}

Vector tikhonov_solve(const ConvolutionMatrix& c, std::span<const double> y, double lambda) {
    const double lams[1] = {lambda};
    return TikhonovSolver(c, lams).solve(y, 0);
}

SvdSolver::SvdSolver(const ConvolutionMatrix& c) : svd_(jacobi_svd(c.entries)) {}

Vector SvdSolver::solve(std::span<const double> y, double tau) const {
    if (!(tau > 0.0) || !(tau < 1.0))
        throw ValidationError("svd_truncate_solve: tau must lie in (0, 1)");
    const std::size_t n = svd_.u.rows(), m = svd_.u.cols();
    if (y.size() != n) throw ValidationError("svd_truncate_solve: dimension mismatch");
    const double s_max = svd_.s.empty() ? 0.0 : svd_.s.front();
    Vector coeff(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        if (svd_.s[j] >= tau * s_max && svd_.s[j] > 0.0) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += svd_.u(i, j) * y[i];
            coeff[j] = acc / svd_.s[j];
        }
    }
    Vector x(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += svd_.v(i, j) * coeff[j];
        x[i] = acc;
    }
    return x;
}

Vector svd_truncate_solve(const ConvolutionMatrix& c, std::span<const double> y, double tau) {
    return SvdSolver(c).solve(y, tau);
}

}

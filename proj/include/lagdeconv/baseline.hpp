#pragma once

#include <functional>
#include <span>

#include "lagdeconv/linalg.hpp"

namespace lagdeconv {

enum class QuadRule { Rectangular, Trapezoid };

/// Discretized convolution operator on an equispaced grid:
/// rectangular  C_ij = dt g(t_i - t_j) for j <= i,
/// trapezoid    same with half weights at j = 1 and j = i (first row zero).
struct ConvolutionMatrix {
    Matrix entries;
    QuadRule rule = QuadRule::Rectangular;
    double dt = 0.0;
};

ConvolutionMatrix build_conv_matrix(const std::function<double(double)>& kernel,
                                    std::span<const double> times, QuadRule rule);

/// Ridge-regularized solves: minimizes ||C f - y||^2 + lambda ||f||^2 through
/// the normal system (C^T C + lambda I) f = C^T y with a Cholesky factor.
/// The factors are cached per lambda so sweeps over replicates stay cheap.
class TikhonovSolver {
public:
    TikhonovSolver(const ConvolutionMatrix& c, std::span<const double> lambdas);
    Vector solve(std::span<const double> y, std::size_t lambda_index) const;
    std::span<const double> lambdas() const { return lambdas_; }

private:
    Matrix c_;
    Vector lambdas_;
    std::vector<Matrix> factors_;
};

Vector tikhonov_solve(const ConvolutionMatrix& c, std::span<const double> y, double lambda);

/// Pseudo-inverse keeping singular values >= tau * s_max. The decomposition
/// is cached so sweeps over tau and replicates stay cheap.
class SvdSolver {
public:
    explicit SvdSolver(const ConvolutionMatrix& c);
    Vector solve(std::span<const double> y, double tau) const;
    std::span<const double> singular_values() const { return svd_.s; }

private:
    Svd svd_;
};

Vector svd_truncate_solve(const ConvolutionMatrix& c, std::span<const double> y, double tau);

}

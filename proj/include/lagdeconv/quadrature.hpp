#pragma once

#include <functional>
#include <span>

namespace lagdeconv {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
/// Computed once per order by Newton iteration and cached.
struct GaussLegendreRule {
    std::span<const double> nodes;
    std::span<const double> weights;
};
GaussLegendreRule gauss_legendre_rule(int npoints);

/// Integral of f over [a, b] with a single n-point Gauss-Legendre rule.
double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int npoints = 32);

/// Composite rule: [a, b] split into panels of the given width (the last
/// panel is shortened to fit).
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        double panel_width, int npoints = 32);

/// Adaptive bisection with an embedded GL8/GL16 error estimate.
/// Throws QuadratureError when the target cannot be met within max_depth.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-9, int max_depth = 48);

}

#include "lagdeconv/laguerre.hpp"

#include <algorithm>
#include <cmath>

#include "lagdeconv/errors.hpp"
#include "lagdeconv/quadrature.hpp"

namespace lagdeconv {

LaguerreBasis::LaguerreBasis(double a_, int size_) : a(a_), size(size_) {
    if (!(a > 0.0)) throw ValidationError("LaguerreBasis: scale a must be positive");
    if (size < 1) throw ValidationError("LaguerreBasis: size must be at least 1");
}

double laguerre_poly_eval(int k, double x) {
    if (k < 0) throw ValidationError("laguerre_poly_eval: negative order");
    double prev = 1.0;  // L_0
    if (k == 0) return prev;
    double cur = 1.0 - x;  // L_1
    for (int j = 1; j < k; ++j) {
        const double next = ((2.0 * j + 1.0 - x) * cur - j * prev) / (j + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

double basis_eval(const LaguerreBasis& basis, int k, double t) {
    if (k < 0 || k >= basis.size) throw ValidationError("basis_eval: index out of range");
    if (t < 0.0) throw ValidationError("basis_eval: negative time");
    const double x = 2.0 * basis.a * t;
    const double w = std::exp(-basis.a * t);
    // recurrence on w_k = e^{-at} L_k(2at); |w_k| <= 1 so no overflow
    double prev = w;
    if (k == 0) return std::sqrt(2.0 * basis.a) * prev;
    double cur = (1.0 - x) * w;
    for (int j = 1; j < k; ++j) {
        const double next = ((2.0 * j + 1.0 - x) * cur - j * prev) / (j + 1);
        prev = cur;
        cur = next;
    }
    return std::sqrt(2.0 * basis.a) * cur;
}

void basis_eval_all(const LaguerreBasis& basis, double t, std::span<double> out) {
    if (t < 0.0) throw ValidationError("basis_eval_all: negative time");
    const std::size_t m = out.size();
    if (m == 0) return;
    const double x = 2.0 * basis.a * t;
    const double w = std::exp(-basis.a * t);
    const double scale = std::sqrt(2.0 * basis.a);
    out[0] = w;
    if (m > 1) out[1] = (1.0 - x) * w;
    for (std::size_t k = 1; k + 1 < m; ++k)
        out[k + 1] = ((2.0 * k + 1.0 - x) * out[k] - static_cast<double>(k) * out[k - 1]) /
                     (k + 1.0);
    for (std::size_t k = 0; k < m; ++k) out[k] *= scale;
}

Matrix design_matrix(const LaguerreBasis& basis, std::span<const double> times) {
    if (times.empty()) throw ValidationError("design_matrix: empty time grid");
    for (double t : times)
        if (t < 0.0) throw ValidationError("design_matrix: negative time");
    Matrix phi(times.size(), basis.size);
    std::vector<double> row(basis.size);
    for (std::size_t i = 0; i < times.size(); ++i) {
        basis_eval_all(basis, times[i], row);
        for (int k = 0; k < basis.size; ++k) phi(i, k) = row[k];
    }
    return phi;
}

CoeffVector project_function(const std::function<double(double)>& func,
                             const LaguerreBasis& basis, int m,
                             const QuadratureConfig& quad) {
    if (m < 1 || m > basis.size)
        throw ValidationError("project_function: m out of range for basis");
    const double a = basis.a;
    const double width = 2.0 / a;
    // weight tail e^{-a t} < 1e-12 beyond t0; oscillation of phi_{m-1} can
    // extend further, so panels continue until contributions die out.
    const double t_weight_tail = 12.0 * std::log(10.0) / a;
    const double t_cap =
        quad.tail_cap_factor * std::max(t_weight_tail, (4.4 * m + 30.0) / a);

    const auto rule = gauss_legendre_rule(quad.panel_points);
    Vector coeffs(m, 0.0);
    Vector phis(m);
    double t0 = 0.0;
    int consecutive_small = 0;
    double scale = 0.0;
    while (t0 < t_cap) {
        const double t1 = t0 + width;
        double panel_max = 0.0;
        Vector panel(m, 0.0);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double t = 0.5 * (t0 + t1) + 0.5 * width * rule.nodes[i];
            const double w = rule.weights[i] * 0.5 * width;
            const double fv = func(t);
            basis_eval_all(basis, t, phis);
            for (int k = 0; k < m; ++k) panel[k] += w * fv * phis[k];
        }
        for (int k = 0; k < m; ++k) {
            coeffs[k] += panel[k];
            panel_max = std::max(panel_max, std::abs(panel[k]));
            scale = std::max(scale, std::abs(coeffs[k]));
        }
        if (panel_max < quad.tail_rtol * (1.0 + scale)) {
            if (++consecutive_small >= 3 && t0 >= t_weight_tail) break;
        } else {
            consecutive_small = 0;
        }
        t0 = t1;
    }
    if (t0 >= t_cap && consecutive_small < 3)
        throw QuadratureError(
            "project_function: integrand tail mass did not vanish within the cap");
    return CoeffVector{std::move(coeffs), basis};
}

Vector expand(const CoeffVector& coeffs, std::span<const double> times) {
    Vector out(times.size(), 0.0);
    Vector phis(coeffs.coeffs.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0) throw ValidationError("expand: negative time");
        basis_eval_all(coeffs.basis, times[i], phis);
        double acc = 0.0;
        for (std::size_t k = 0; k < phis.size(); ++k) acc += coeffs.coeffs[k] * phis[k];
        out[i] = acc;
    }
    return out;
}

Vector log_spaced(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 1)
        throw ValidationError("log_spaced: need 0 < lo < hi and count >= 1");
    Vector g(count);
    if (count == 1) {
        g[0] = lo;
        return g;
    }
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) g[i] = lo * std::exp(step * i);
    return g;
}

Vector default_scale_grid() { return log_spaced(0.01, 2.0, 32); }

ScaleSelection select_scale_a(std::span<const double> times, std::span<const double> values,
                              int M, std::span<const double> a_grid) {
    if (a_grid.empty()) throw ValidationError("select_scale_a: empty grid");
    if (times.size() != values.size() || times.empty())
        throw ValidationError("select_scale_a: bad samples");
    for (double a : a_grid)
        if (!(a > 0.0)) throw ValidationError("select_scale_a: grid entries must be positive");

    ScaleSelection best;
    bool have = false;
    for (double a : a_grid) {
        const LaguerreBasis basis(a, M);
        const Matrix phi = design_matrix(basis, times);
        const Vector c = least_squares(phi, values);
        double ss = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            double fit = 0.0;
            for (int k = 0; k < M; ++k) fit += phi(i, k) * c[k];
            const double r = fit - values[i];
            ss += r * r;
        }
        const double err = std::sqrt(ss / static_cast<double>(times.size()));
        if (!have || err < best.fit_error) {
            best = {a, err};
            have = true;
        }
    }
    return best;
}

ScaleSelection select_scale_a(const std::function<double(double)>& g, int M,
                              std::span<const double> a_grid, double horizon, int dense_n) {
    if (!(horizon > 0.0)) throw ValidationError("select_scale_a: horizon must be positive");
    Vector times(dense_n), values(dense_n);
    for (int i = 0; i < dense_n; ++i) {
        times[i] = (i + 1) * horizon / dense_n;
        values[i] = g(times[i]);
    }
    return select_scale_a(times, values, M, a_grid);
}

}

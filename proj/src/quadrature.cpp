#include "lagdeconv/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "lagdeconv/errors.hpp"

namespace lagdeconv {

namespace {

struct Rule {
    std::vector<double> nodes, weights;
};

Rule compute_rule(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

const Rule& cached_rule(int n) {
    static std::mutex mtx;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

}  // namespace

GaussLegendreRule gauss_legendre_rule(int npoints) {
    if (npoints < 2) throw ValidationError("gauss_legendre_rule: need at least 2 points");
    const Rule& r = cached_rule(npoints);
    return {std::span<const double>(r.nodes), std::span<const double>(r.weights)};
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int npoints) {
    const auto rule = gauss_legendre_rule(npoints);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        double panel_width, int npoints) {
    if (!(panel_width > 0.0)) throw ValidationError("integrate_panels: width must be positive");
    double acc = 0.0;
    double t = a;
    while (t < b) {
        const double hi = std::min(t + panel_width, b);
        acc += gauss_legendre(f, t, hi, npoints);
        t = hi;
    }
    return acc;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                    double coarse, double tol, int depth, int max_depth) {
    const double fine = gauss_legendre(f, a, 0.5 * (a + b), 16) +
                        gauss_legendre(f, 0.5 * (a + b), b, 16);
    if (std::abs(fine - coarse) <= tol || depth >= max_depth) {
        if (depth >= max_depth && std::abs(fine - coarse) > tol)
            throw QuadratureError("integrate_adaptive: did not converge");
        return fine;
    }
    const double mid = 0.5 * (a + b);
    return adaptive_rec(f, a, mid, gauss_legendre(f, a, mid, 16), 0.5 * tol, depth + 1,
                        max_depth) +
           adaptive_rec(f, mid, b, gauss_legendre(f, mid, b, 16), 0.5 * tol, depth + 1,
                        max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    return adaptive_rec(f, a, b, gauss_legendre(f, a, b, 16), abs_tol, 0, max_depth);
}

}

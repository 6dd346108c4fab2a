#include "lagdeconv/design.hpp"

#include <cmath>

#include "lagdeconv/errors.hpp"

namespace lagdeconv {

Observations::Observations(Vector times_, Vector values_, double horizon_,
                           std::optional<double> sigma_)
    : times(std::move(times_)), values(std::move(values_)), horizon(horizon_),
      sigma(sigma_) {
    if (times.size() != values.size())
        throw ValidationError("Observations: times and values differ in length");
    if (times.size() < 2) throw ValidationError("Observations: need at least 2 samples");
    if (!(horizon > 0.0)) throw ValidationError("Observations: horizon must be positive");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev))
            throw ValidationError("Observations: times must be strictly increasing and > 0");
        prev = t;
    }
    if (times.back() > horizon * (1.0 + 1e-12))
        throw ValidationError("Observations: a sample lies beyond the horizon");
    if (sigma && !(*sigma >= 0.0))
        throw ValidationError("Observations: sigma must be nonnegative");
}

DesignSummary summarize_design(const Observations& obs, const LaguerreBasis& basis,
                               ZMode zmode) {
    const std::size_t n = obs.n();
    const int M = basis.size;
    if (n < static_cast<std::size_t>(M))
        throw RankDeficientDesign("summarize_design: fewer samples than basis functions");
    const Matrix phi = design_matrix(basis, obs.times);
    const double scale = obs.horizon / static_cast<double>(n);

    Matrix A(M, M);
    for (int k = 0; k < M; ++k)
        for (int l = k; l < M; ++l) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += phi(i, k) * phi(i, l);
            A(k, l) = A(l, k) = scale * acc;
        }

    Matrix chol;
    if (!try_cholesky(A, chol, 1e-10))
        throw RankDeficientDesign(
            "summarize_design: Gram matrix failed the pivot test (basis too large for grid)");
    const Matrix omega = invert_spd(A, 1e-10);

    Vector z(M, 0.0);
    if (zmode == ZMode::LeastSquares) {
        z = least_squares(phi, obs.values);
    } else {
        // trapezoid weights over nodes {0, t_1, .., t_n}; y(0) = 0 so the
        // origin node drops out. Handles irregular grids.
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = (i == 0) ? 0.0 : obs.times[i - 1];
            const double hi = (i + 1 < n) ? obs.times[i + 1] : obs.times[i];
            const double w = 0.5 * (hi - lo);
            for (int k = 0; k < M; ++k) z[k] += w * obs.values[i] * phi(i, k);
        }
    }
    return DesignSummary{A, omega, std::move(z), basis, obs.horizon, n, zmode};
}

Matrix omega_sub(const DesignSummary& summary, int m) {
    if (m < 1 || m > summary.basis.size)
        throw ValidationError("omega_sub: m out of range");
    if (m == summary.basis.size) return summary.Omega;
    return invert_spd(summary.A.block(m, m), 1e-10);
}

Observations shift_delay(const Observations& obs, double delta) {
    if (delta < 0.0) throw ValidationError("shift_delay: delta must be nonnegative");
    if (delta == 0.0) return obs;
    if (!(delta < obs.horizon)) throw ValidationError("shift_delay: delta >= horizon");
    Vector t, y;
    for (std::size_t i = 0; i < obs.n(); ++i) {
        if (obs.times[i] > delta) {
            t.push_back(obs.times[i] - delta);
            y.push_back(obs.values[i]);
        }
    }
    if (t.size() < 2)
        throw EmptyAfterShift("shift_delay: no usable samples remain after the delay");
    return Observations(std::move(t), std::move(y), obs.horizon - delta, obs.sigma);
}

SigmaEstimate estimate_sigma(const Observations& obs) {
    const std::size_t n = obs.n();
    if (n < 3) throw ValidationError("estimate_sigma: need at least 3 samples");
    double ss = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = obs.values[i + 1] - obs.values[i];
        ss += d * d;
    }
    double dmin = obs.times[1] - obs.times[0], dmax = dmin;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d = obs.times[i + 1] - obs.times[i];
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    SigmaEstimate est;
    est.value = std::sqrt(ss / (2.0 * static_cast<double>(n - 1)));
    est.irregular_spacing = dmax > 1.2 * dmin;
    return est;
}

}

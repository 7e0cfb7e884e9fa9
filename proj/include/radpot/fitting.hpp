#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace radpot {
namespace fitting {

/// Least-squares line y = intercept + slope * x with goodness diagnostics.
struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;          ///< coefficient of determination
    double slope_stderr = 0.0;
    std::size_t n = 0;
    bool ok = false;          ///< false when fewer than 3 usable points
};

inline LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::domain_error("linear_fit: size mismatch");
    LinFit f;
    f.n = x.size();
    if (f.n < 3) return f;
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < f.n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / f.n, my = sy / f.n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < f.n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    f.slope_stderr = f.n > 2 ? std::sqrt(ss_res / ((f.n - 2) * sxx)) : 0.0;
    f.ok = true;
    return f;
}

/// Power-law fit y ~ c * x^e over points with x, y > 0: returns slope = e in
/// log-log coordinates; intercept = ln c.
inline LinFit power_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) { lx.push_back(std::log(x[i])); ly.push_back(std::log(y[i])); }
    return linear_fit(lx, ly);
}

/// Exponential-decay fit y ~ c * e^{-rate x} over y > 0: rate = -slope of
/// ln y against x.
inline LinFit exp_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (y[i] > 0.0) { lx.push_back(x[i]); ly.push_back(std::log(y[i])); }
    return linear_fit(lx, ly);
}

/// Fit y ~ a + b * (-ln x); slope = b.
inline LinFit log_model_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx;
    lx.reserve(x.size());
    for (double xi : x) {
        if (!(xi > 0.0)) throw std::domain_error("log_model_fit: x > 0 required");
        lx.push_back(-std::log(xi));
    }
    return linear_fit(lx, y);
}

} // namespace fitting
} // namespace radpot

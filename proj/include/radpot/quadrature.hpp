#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace radpot {
namespace quad {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> x, w;

    explicit GaussLegendre(int n) : x(n), w(n) {
        if (n < 1) throw std::domain_error("GaussLegendre: order >= 1");
        const double pi = 3.141592653589793238462643383279502884;
        const int m = (n + 1) / 2;
        for (int i = 0; i < m; ++i) {
            double z = std::cos(pi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
        }
    }
};

inline const GaussLegendre& gl8() {
    static const GaussLegendre g(8);
    return g;
}

template <class F>
double panel(F&& f, double a, double b, const GaussLegendre& g = gl8()) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(mid + half * g.x[i]);
    return s * half;
}

/// Composite rule on geometrically spaced panels; requires 0 < a.  Handles
/// a > b by orientation.
template <class F>
double log_panels(F&& f, double a, double b, int n_panels, const GaussLegendre& g = gl8()) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }
    if (!(a > 0.0)) throw std::domain_error("log_panels: requires positive endpoints");
    if (n_panels < 1) n_panels = 1;
    const double la = std::log(a), step = (std::log(b) - la) / n_panels;
    double s = 0.0;
    for (int i = 0; i < n_panels; ++i)
        s += panel(f, std::exp(la + i * step), std::exp(la + (i + 1) * step), g);
    return sign * s;
}

/// Adaptive bisection built on the fixed rule: a panel is accepted when
/// splitting it changes the value by less than its share of the tolerance.
template <class F>
double adaptive(F&& f, double a, double b, double tol, int max_depth = 48,
                const GaussLegendre& g = gl8()) {
    struct Rec {
        const GaussLegendre& g;
        double operator()(F& f, double a, double b, double whole, double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double left = panel(f, a, m, g), right = panel(f, m, b, g);
            const double delta = left + right - whole;
            if (std::abs(delta) <= tol || depth <= 0) return left + right;
            return (*this)(f, a, m, left, 0.5 * tol, depth - 1) +
                   (*this)(f, m, b, right, 0.5 * tol, depth - 1);
        }
    } rec{g};
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }
    return sign * rec(f, a, b, panel(f, a, b, g), tol, max_depth);
}

/// Integral over [a, b] with a geometric first split (for integrands with a
/// power-law endpoint at a = 0 side), adaptive within panels.
template <class F>
double adaptive_log(F&& f, double a, double b, double tol, int panels_per_decade = 2) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }
    if (!(a > 0.0)) throw std::domain_error("adaptive_log: requires positive endpoints");
    const double decades = std::log10(b / a);
    const int n = std::max(1, static_cast<int>(decades * panels_per_decade));
    const double la = std::log(a), step = (std::log(b) - la) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += adaptive(f, std::exp(la + i * step), std::exp(la + (i + 1) * step), tol / n, 24);
    return sign * s;
}

} // namespace quad
} // namespace radpot

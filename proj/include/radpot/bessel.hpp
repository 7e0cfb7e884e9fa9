#pragma once

#include <cmath>
#include <stdexcept>

#include "radpot/gamma.hpp"

namespace radpot {
namespace bessel {

/// Which evaluation regime an argument falls in: power series below
/// t = max(10, 2 nu), large-argument machinery above.
enum class BesselRegime { SeriesRegion, AsymptoticRegion };

struct BesselEval {
    double nu = 0.0;
    double t = 0.0;
    double i_value = 0.0;
    double k_value = 0.0;
    BesselRegime regime = BesselRegime::SeriesRegion;
};

namespace detail {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Ascending series for I_nu; every term is positive, so the sum is
// cancellation-free and usable well past the nominal regime boundary.
inline double i_series(double nu, double t, bool scaled) {
    if (t == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const double q = 0.25 * t * t;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (k * (nu + k));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    const double ln_pref = nu * std::log(0.5 * t) - gammafn::lgamma(nu + 1.0) + (scaled ? -t : 0.0);
    const double ln_val = ln_pref + std::log(sum);
    if (ln_val > 709.0) throw std::overflow_error("bessel: I overflow, use scaled entry");
    return std::exp(ln_val);
}

// I_nu(t) = e^t/pi * int_0^pi e^{t(cos h - 1)} cos(nu h) dh  - sin(nu pi)/pi * int_0^inf ...
// The second piece is O(e^{-t}) relative O(e^{t}) and is dropped; callers only
// use this for t > 30 where it sits below 1e-26 of the result.  The trapezoid
// rule on the first piece converges superexponentially (Jacobi-Anger aliasing).
inline double i_large(double nu, double t, bool scaled) {
    const int n = static_cast<int>(0.5 * t + std::sqrt(20.0 * t) + 0.5 * nu) + 40;
    const double h = pi / n;
    double sum = 0.5 * (1.0 + std::exp(-2.0 * t) * std::cos(nu * pi));
    for (int j = 1; j < n; ++j) {
        const double th = j * h;
        sum += std::exp(t * (std::cos(th) - 1.0)) * std::cos(nu * th);
    }
    const double s = sum * h / pi; // e^{-t} I_nu(t)
    if (scaled) return s;
    if (t > 700.0) throw std::overflow_error("bessel: I overflow, use scaled entry");
    return std::exp(t) * s;
}

// Coefficients of 1/Gamma(z) = sum c_k z^k (Abramowitz & Stegun 6.1.34).
inline constexpr double rgamma_c[16] = {
    1.00000000000000000000,  0.57721566490153286061,
    -0.65587807152025388108, -0.04200263503409523553,
    0.16653861138229148950,  -0.04219773455554433675,
    -0.00962197152787697356, 0.00721894324666309954,
    -0.00116516759185906511, -0.00021524167411495097,
    0.00012805028238811619,  -0.00002013485478078824,
    -0.00000125049348214267, 0.00000113302723198170,
    -0.00000020563384169776, 0.00000000611609510448,
};

// gam1(mu) = [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu), analytic at mu = 0.
inline double gam1(double mu) {
    const double m2 = mu * mu;
    double s = 0.0, pw = 1.0;
    for (int k = 1; k < 16; k += 2) { // odd-index c's
        s += rgamma_c[k] * pw;
        pw *= m2;
    }
    return -s;
}

// gam2(mu) = [1/Gamma(1-mu) + 1/Gamma(1+mu)] / 2.
inline double gam2(double mu) {
    const double m2 = mu * mu;
    double s = 0.0, pw = 1.0;
    for (int k = 0; k < 16; k += 2) {
        s += rgamma_c[k] * pw;
        pw *= m2;
    }
    return s;
}

// Temme's series for K_mu(x), K_{mu+1}(x), |mu| <= 1/2, x <= 2.  Handles the
// integer-order limit mu -> 0 through gam1/gam2 instead of the reflection
// formula, which would cancel catastrophically there.
inline void k_temme_pair(double mu, double x, double& kmu, double& kmu1) {
    const double d = -std::log(0.5 * x);
    const double md = mu * d;
    const double sinhc = std::abs(md) < 1e-6 ? 1.0 + md * md / 6.0 : std::sinh(md) / md;
    const double pimu = pi * mu;
    const double fac = std::abs(pimu) < 1e-6 ? 1.0 + pimu * pimu / 6.0 : pimu / std::sin(pimu);
    double f = fac * (std::cosh(md) * gam1(mu) + d * sinhc * gam2(mu));
    double p = 0.5 * std::exp(md) * gammafn::tgamma(1.0 + mu);
    double q = 0.5 * std::exp(-md) * gammafn::tgamma(1.0 - mu);
    double c = 1.0;
    const double q4 = 0.25 * x * x;
    double sum = f, sum1 = p;
    for (int k = 1; k < 400; ++k) {
        f = (k * f + p + q) / (k * k - mu * mu);
        p /= (k - mu);
        q /= (k + mu);
        c *= q4 / k;
        const double dk = c * f;
        const double dk1 = c * (p - k * f);
        sum += dk;
        sum1 += dk1;
        if (std::abs(dk) < 1e-17 * std::abs(sum) && std::abs(dk1) < 1e-17 * std::abs(sum1)) break;
    }
    kmu = sum;
    kmu1 = 2.0 / x * sum1;
}

inline double k_small(double nu, double x, bool scaled) {
    const int n = static_cast<int>(std::floor(nu + 0.5));
    const double mu = nu - n;
    double k0, k1;
    k_temme_pair(mu, x, k0, k1);
    for (int j = 1; j < n; ++j) {
        const double k2 = k0 + 2.0 * (mu + j) / x * k1;
        k0 = k1;
        k1 = k2;
    }
    double v = (n == 0) ? k0 : k1;
    if (scaled) v *= std::exp(x);
    if (!std::isfinite(v)) throw std::overflow_error("bessel: K overflow");
    return v;
}

// K_nu(x) = int_0^inf e^{-x cosh h} cosh(nu h) dh, evaluated scaled by e^{x}.
// Even analytic integrand: trapezoid error ~ e^{-c/h}; step resolves the
// saddle width (x^2 + nu^2)^{-1/4}.
inline double k_integral(double nu, double x, bool scaled) {
    const double h = std::min(0.25, 0.7 / std::pow(x * x + nu * nu, 0.25));
    double thmax = 1.0;
    while (x * (std::cosh(thmax) - 1.0) - nu * thmax < 45.0) thmax += 0.5;
    const int n = static_cast<int>(thmax / h) + 1;
    double sum = 0.5;
    for (int j = 1; j <= n; ++j) {
        const double th = j * h;
        sum += std::exp(-x * (std::cosh(th) - 1.0)) * std::cosh(nu * th);
    }
    const double s = sum * h; // e^{x} K_nu(x)
    if (scaled) return s;
    if (x > 700.0) throw std::overflow_error("bessel: K underflow, use scaled entry");
    return std::exp(-x) * s;
}

inline double i_crossover(double nu) { return std::max(30.0, 2.0 * nu); }

inline void check_args(double nu, double t) {
    if (!std::isfinite(nu) || !std::isfinite(t) || nu < 0.0)
        throw std::domain_error("bessel: requires finite nu >= 0 and finite t");
}

} // namespace detail

/// I_nu(t) for nu >= 0, t >= 0 (the t = 0 limit is 0 for nu > 0, 1 for nu = 0).
inline double eval_i(double nu, double t) {
    detail::check_args(nu, t);
    if (t < 0.0) throw std::domain_error("bessel: I requires t >= 0");
    if (t > 700.0) throw std::overflow_error("bessel: I overflow, use scaled entry");
    return t <= detail::i_crossover(nu) ? detail::i_series(nu, t, false)
                                        : detail::i_large(nu, t, false);
}

/// K_nu(t) for nu >= 0, t > 0.
inline double eval_k(double nu, double t) {
    detail::check_args(nu, t);
    if (t <= 0.0) throw std::domain_error("bessel: K requires t > 0");
    if (t > 700.0) throw std::overflow_error("bessel: K underflow, use scaled entry");
    return t <= 2.0 ? detail::k_small(nu, t, false) : detail::k_integral(nu, t, false);
}

/// e^{-t} I_nu(t); safe for arbitrarily large t.
inline double eval_i_scaled(double nu, double t) {
    detail::check_args(nu, t);
    if (t < 0.0) throw std::domain_error("bessel: I requires t >= 0");
    return t <= detail::i_crossover(nu) ? detail::i_series(nu, t, true)
                                        : detail::i_large(nu, t, true);
}

/// e^{+t} K_nu(t); safe for arbitrarily large t.
inline double eval_k_scaled(double nu, double t) {
    detail::check_args(nu, t);
    if (t <= 0.0) throw std::domain_error("bessel: K requires t > 0");
    return t <= 2.0 ? detail::k_small(nu, t, true) : detail::k_integral(nu, t, true);
}

inline BesselEval eval(double nu, double t, bool scaled = false) {
    detail::check_args(nu, t);
    if (t <= 0.0) throw std::domain_error("bessel: eval requires t > 0");
    BesselEval out;
    out.nu = nu;
    out.t = t;
    out.i_value = scaled ? eval_i_scaled(nu, t) : eval_i(nu, t);
    out.k_value = scaled ? eval_k_scaled(nu, t) : eval_k(nu, t);
    out.regime = t <= std::max(10.0, 2.0 * nu) ? BesselRegime::SeriesRegion
                                               : BesselRegime::AsymptoticRegion;
    return out;
}

struct WeightedKernels {
    double big_i = 0.0; ///< t^{(N+alpha)/(2-alpha)} I_nu(t)
    double big_k = 0.0; ///< t^{(N+alpha)/(2-alpha)} K_nu(t)
};

/// Kernels of the resolvent integral operator: the plain Bessel pair times
/// the measure weight t^{(N+alpha)/(2-alpha)}.  Requires 0 < alpha < 2.
inline WeightedKernels weighted_kernels(double nu, double alpha, int dim, double t) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::domain_error("weighted_kernels: requires 0 < alpha < 2");
    if (dim < 3) throw std::domain_error("weighted_kernels: requires dim >= 3");
    const double w = (dim + alpha) / (2.0 - alpha);
    const double tw = std::pow(t, w);
    return {tw * eval_i(nu, t), tw * eval_k(nu, t)};
}

} // namespace bessel
} // namespace radpot

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace radpot {

/// Gamma function machinery used by the Bessel kernels.
///
/// Lanczos approximation (g = 7, 9 coefficients), relative accuracy
/// better than 1e-13 on the real axis away from the poles.
namespace gammafn {

namespace detail {

inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_c[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

// Lanczos core for z >= 0.5: returns (series, t) with
// Gamma(z) = sqrt(2 pi) * t^(z-1/2) * exp(-t) * series, t = z + g - 1/2.
inline void core(double z, double& series, double& t) {
    const double zm1 = z - 1.0;
    double x = lanczos_c[0];
    for (int i = 1; i < 9; ++i) x += lanczos_c[i] / (zm1 + i);
    series = x;
    t = zm1 + lanczos_g + 0.5;
}

} // namespace detail

/// Gamma(z) for real z, poles at z = 0, -1, -2, ... raise std::domain_error.
inline double tgamma(double z) {
    if (std::isnan(z)) throw std::domain_error("gamma: nan argument");
    if (z <= 0.0 && z == std::floor(z))
        throw std::domain_error("gamma: pole at non-positive integer");
    if (z < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        const double pi = 3.141592653589793238462643383279502884;
        return pi / (std::sin(pi * z) * tgamma(1.0 - z));
    }
    double s, t;
    detail::core(z, s, t);
    const double sqrt2pi = 2.506628274631000502415765284811045253;
    return sqrt2pi * std::pow(t, z - 0.5) * std::exp(-t) * s;
}

/// log Gamma(z) for z > 0; stays finite where Gamma overflows.
inline double lgamma(double z) {
    if (!(z > 0.0)) throw std::domain_error("lgamma: requires z > 0");
    if (z < 0.5) {
        const double pi = 3.141592653589793238462643383279502884;
        return std::log(pi / std::sin(pi * z)) - lgamma(1.0 - z);
    }
    double s, t;
    detail::core(z, s, t);
    const double log_sqrt2pi = 0.9189385332046727417803297364056176398;
    return log_sqrt2pi + (z - 0.5) * std::log(t) - t + std::log(s);
}

/// 1/Gamma(z); entire, zero at the poles of Gamma.
inline double rgamma(double z) {
    if (z <= 0.0 && z == std::floor(z)) return 0.0;
    if (z > 170.0) return 0.0; // Gamma overflows double; reciprocal underflows
    return 1.0 / tgamma(z);
}

} // namespace gammafn
} // namespace radpot

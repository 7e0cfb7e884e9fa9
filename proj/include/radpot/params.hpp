#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace radpot {

/// Exact rational scalar for boundary-sensitive arithmetic.
using Rat = boost::multiprecision::cpp_rational;

/// Problem data for -u'' - (N-1)/r u' + A r^{-alpha} u = u^{p-1}.
struct Parameters {
    int dim = 3;          ///< N >= 3
    double amplitude = 1; ///< A > 0
    double alpha = 1;     ///< singularity strength, > 0
    double power = 4;     ///< p > 2

    void validate() const {
        if (dim < 3) throw std::domain_error("Parameters: dim >= 3 required");
        if (!(amplitude > 0.0)) throw std::domain_error("Parameters: amplitude > 0 required");
        if (!(alpha > 0.0)) throw std::domain_error("Parameters: alpha > 0 required");
        if (!(power > 2.0)) throw std::domain_error("Parameters: power > 2 required");
    }
};

/// Constants derived from Parameters.  Transform-specific fields (nu, b_const,
/// grid weights) are only meaningful when alpha < 2; transform_available says so.
struct DerivedConstants {
    double nu = 0;              ///< (N-2)/(2-alpha)
    double b_const = 0;         ///< ((2-alpha)/(2 A^{1/alpha}))^{2 alpha/(2-alpha)}: coupling after rescaling
    double two_star = 0;        ///< 2N/(N-2)
    double two_alpha = 0;       ///< 2N/(N-alpha), +inf when alpha >= N
    double two_alpha_star = 0;  ///< 2(2N-2+alpha)/(2N-2-alpha), +inf when alpha >= 2N-2
    double beta = 0;            ///< alpha p/(p-2)
    double gamma1 = 0;          ///< beta/p + beta/2 - N + 1
    double gamma2 = 0;          ///< beta (N-beta)(beta-2)/(2p)
    double weight_exponent = 0;    ///< (2N-2-alpha)/(2-alpha): measure weight of the half-line space
    double lp_weight_exponent = 0; ///< (2N-2+alpha)/(2-alpha): weight carrying L^p(r^{N-1}dr)
    double kernel_exponent = 0;    ///< (N+alpha)/(2-alpha) = nu + 1 + 2 alpha/(2-alpha)
    double forcing_exponent = 0;   ///< 2 alpha/(2-alpha): power of t multiplying the nonlinearity
    bool transform_available = false;
};

inline DerivedConstants derive_constants(const Parameters& P) {
    P.validate();
    DerivedConstants d;
    const double N = P.dim, a = P.alpha, p = P.power;
    const double inf = std::numeric_limits<double>::infinity();
    d.two_star = 2.0 * N / (N - 2.0);
    d.two_alpha = a < N ? 2.0 * N / (N - a) : inf;
    d.two_alpha_star = a < 2.0 * N - 2.0 ? 2.0 * (2.0 * N - 2.0 + a) / (2.0 * N - 2.0 - a) : inf;
    d.beta = a * p / (p - 2.0);
    d.gamma1 = d.beta / p + d.beta / 2.0 - N + 1.0;
    d.gamma2 = d.beta * (N - d.beta) * (d.beta - 2.0) / (2.0 * p);
    d.transform_available = a < 2.0;
    if (d.transform_available) {
        d.nu = (N - 2.0) / (2.0 - a);
        d.b_const = std::pow((2.0 - a) / (2.0 * std::pow(P.amplitude, 1.0 / a)), 2.0 * a / (2.0 - a));
        d.weight_exponent = (2.0 * N - 2.0 - a) / (2.0 - a);
        d.lp_weight_exponent = (2.0 * N - 2.0 + a) / (2.0 - a);
        d.kernel_exponent = (N + a) / (2.0 - a);
        d.forcing_exponent = 2.0 * a / (2.0 - a);
    } else {
        d.nu = std::numeric_limits<double>::quiet_NaN();
        d.b_const = std::numeric_limits<double>::quiet_NaN();
        d.weight_exponent = d.lp_weight_exponent = d.kernel_exponent = d.forcing_exponent =
            std::numeric_limits<double>::quiet_NaN();
    }
    return d;
}

/// Exact-rational versions of the exponent bookkeeping, for boundary
/// comparisons and coefficient identities.
struct RatConstants {
    Rat two_star, two_alpha_star;
    std::optional<Rat> two_alpha; ///< empty when alpha = N (pole), negative branch for alpha > N never used
    Rat beta, gamma1, gamma2;
};

inline RatConstants rational_constants(int N, const Rat& alpha, const Rat& p) {
    if (N < 3) throw std::domain_error("rational_constants: N >= 3 required");
    if (!(alpha > 0)) throw std::domain_error("rational_constants: alpha > 0 required");
    if (!(p > 2)) throw std::domain_error("rational_constants: p > 2 required");
    RatConstants rc;
    rc.two_star = Rat(2 * N) / Rat(N - 2);
    if (alpha != N) rc.two_alpha = Rat(2 * N) / (Rat(N) - alpha);
    const Rat denom = Rat(2 * N - 2) - alpha;
    if (denom == 0) throw std::domain_error("rational_constants: alpha = 2N-2 pole of 2_alpha^*");
    rc.two_alpha_star = 2 * (Rat(2 * N - 2) + alpha) / denom;
    rc.beta = alpha * p / (p - 2);
    rc.gamma1 = rc.beta / p + rc.beta / 2 - N + 1;
    rc.gamma2 = rc.beta * (Rat(N) - rc.beta) * (rc.beta - 2) / (2 * p);
    return rc;
}

/// Parse a decimal or fractional literal ("0.05", "10/3", "2e-3") exactly.
inline Rat parse_rational(const std::string& s) {
    if (s.empty()) throw std::domain_error("parse_rational: empty string");
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const Rat num = parse_rational(s.substr(0, slash));
        const Rat den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw std::domain_error("parse_rational: zero denominator");
        return num / den;
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') { neg = s[i] == '-'; ++i; }
    boost::multiprecision::cpp_int mant = 0;
    long expo = 0;
    bool digits = false, frac = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c >= '0' && c <= '9') {
            mant = mant * 10 + (c - '0');
            if (frac) --expo;
            digits = true;
        } else if (c == '.' && !frac) {
            frac = true;
        } else if ((c == 'e' || c == 'E') && digits) {
            expo += std::stol(s.substr(i + 1));
            break;
        } else {
            throw std::domain_error("parse_rational: bad literal '" + s + "'");
        }
    }
    if (!digits) throw std::domain_error("parse_rational: bad literal '" + s + "'");
    Rat r(mant);
    boost::multiprecision::cpp_int pow10 = 1;
    for (long k = 0; k < std::labs(expo); ++k) pow10 *= 10;
    if (expo >= 0) r *= Rat(pow10); else r /= Rat(pow10);
    return neg ? -r : r;
}

} // namespace radpot

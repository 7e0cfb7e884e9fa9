#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "radpot/bessel.hpp"
#include "radpot/fitting.hpp"
#include "radpot/params.hpp"
#include "radpot/profile.hpp"
#include "radpot/quadrature.hpp"
#include "radpot/transform.hpp"

namespace radpot {

/// Origin behavior of half-line profiles: predicted growth class as t -> 0+,
/// the envelope transform w(t) bounding operator images, measured
/// classification of sampled profiles, and the pointwise-decay ratio.
namespace asymptotics {

/// Growth class of v(t) as t -> 0+.
enum class OriginCase { Bounded, Logarithmic, Power };

/// Predicted origin behavior.  The class switches at p = 2* - 1: below it
/// profiles stay O(1), at it they grow like -ln t, above it like t^{t_exponent}
/// with t_exponent = nu (2* - 1 - p) < 0.
struct OriginBehavior {
    OriginCase kind = OriginCase::Bounded;
    double t_exponent = 0.0; ///< nu (2*-1-p) in the Power case, 0 otherwise
    double r_exponent = 0.0; ///< t_exponent (2-alpha)/2, the same growth in r units
    std::optional<double> c1, c2; ///< Power case: t^{-t_exponent} w(t) -> c1 + c2
    std::optional<double> c3;     ///< Logarithmic case: w(t)/(-ln t) -> c3
};

namespace detail {

inline DerivedConstants require_admissible(const Parameters& P) {
    P.validate();
    const auto d = derive_constants(P);
    if (!d.transform_available)
        throw std::domain_error("asymptotics: requires alpha < 2");
    if (!(P.power > d.two_alpha && P.power < d.two_star))
        throw std::domain_error("asymptotics: requires 2_alpha < p < 2*");
    return d;
}

} // namespace detail

inline OriginBehavior predicted_origin_behavior(const Parameters& P) {
    const auto d = detail::require_admissible(P);
    const double edge = d.two_star - 1.0, nu = d.nu;
    OriginBehavior b;
    if (P.power < edge) {
        b.kind = OriginCase::Bounded;
    } else if (P.power == edge) {
        b.kind = OriginCase::Logarithmic;
        b.c3 = 1.0 / (2.0 * nu);
    } else {
        b.kind = OriginCase::Power;
        b.t_exponent = nu * (edge - P.power);
        b.r_exponent = 0.5 * b.t_exponent * (2.0 - P.alpha);
        b.c1 = 1.0 / (2.0 * nu * nu * (d.two_star + 1.0 - P.power));
        b.c2 = -1.0 / (2.0 * nu * nu * (edge - P.power));
    }
    return b;
}

/// Exact-rational origin exponents; both vanish outside the Power case.
struct OriginExponentsExact {
    Rat t_exponent, r_exponent;
};

inline OriginExponentsExact origin_exponents_exact(int N, const Rat& alpha, const Rat& p) {
    if (N < 3) throw std::domain_error("origin_exponents_exact: N >= 3 required");
    if (!(alpha > 0 && alpha < 2))
        throw std::domain_error("origin_exponents_exact: 0 < alpha < 2 required");
    const Rat two_star = Rat(2 * N) / (N - 2);
    const Rat two_alpha = Rat(2 * N) / (Rat(N) - alpha);
    if (!(p > two_alpha && p < two_star))
        throw std::domain_error("origin_exponents_exact: 2_alpha < p < 2* required");
    OriginExponentsExact e{0, 0};
    if (p > two_star - 1) {
        const Rat nu = Rat(N - 2) / (2 - alpha);
        e.t_exponent = nu * (two_star - 1 - p);
        e.r_exponent = e.t_exponent * (2 - alpha) / 2;
    }
    return e;
}

/// Decay rate of r^{beta-2} phi(r)^2 as r -> 0 for profiles growing at the
/// worst admissible origin rate: (2*-1-p)(N-2) + beta - 2.  Positive across
/// the admissible band, which is what forces the limit to vanish.
inline Rat vanishing_exponent_exact(int N, const Rat& alpha, const Rat& p) {
    const auto rc = rational_constants(N, alpha, p);
    return (rc.two_star - 1 - p) * (N - 2) + rc.beta - 2;
}

inline double vanishing_exponent(const Parameters& P) {
    const auto d = derive_constants(P);
    return (d.two_star - 1.0 - P.power) * (P.dim - 2.0) + d.beta - 2.0;
}

/// Envelope transform: the integral operator's kernel pair applied to the
/// decay envelope t^{-nu} in place of v, without the coupling constant:
///   w(t) = t^{-nu} [ I_nu(t) int_t^inf K_nu(s) s^q ds
///                  + K_nu(t) int_0^t   I_nu(s) s^q ds ],  q = w_k - nu (p-1)
/// with w_k the kernel weight exponent.  Any operator image of a profile
/// bounded by C t^{-nu} is bounded by B C^{p-1} w(t).
inline double envelope_w(const Parameters& P, double t) {
    const auto d = detail::require_admissible(P);
    if (!(t > 0.0)) throw std::domain_error("envelope_w: t > 0 required");
    const double nu = d.nu;
    const double q = d.kernel_exponent - nu * (P.power - 1.0);

    // Admissibility pins q > -1 and nu + q + 1 > nu > 0, so both integrals
    // converge at their singular ends.
    auto fi = [&](double s) {
        return bessel::eval_i_scaled(nu, s) * std::pow(s, q) * std::exp(s - t);
    };
    auto fk = [&](double s) {
        return bessel::eval_k_scaled(nu, s) * std::pow(s, q) * std::exp(t - s);
    };
    auto refine = [](auto&& f, double a, double b) {
        const double coarse = quad::log_panels(f, a, b, 4 + static_cast<int>(2.0 * std::log10(b / a)));
        const double tol = std::max(std::abs(coarse), 1e-300) * 1e-11;
        return quad::adaptive_log(f, a, b, tol, 4);
    };

    // inner: e^{-t} int_0^t I s^q, completing the head below the quadrature
    // cut with the exact local power s^{nu+q}
    const double lo = t * 1e-12;
    const double inner = refine(fi, lo, t) + fi(lo) * lo / (nu + q + 1.0);

    // outer: e^{t} int_t^inf K s^q, cut where the integrand has fallen by
    // e^{-45} and patched with a rate-matched exponential tail
    const double hi = t + 45.0;
    const double rate = std::max(1.0 + (0.5 - q) / hi, 0.5);
    const double outer = refine(fk, t, hi) + fk(hi) / rate;

    const double w = std::pow(t, -nu) *
                     (bessel::eval_i_scaled(nu, t) * outer + bessel::eval_k_scaled(nu, t) * inner);
    if (!std::isfinite(w)) throw std::runtime_error("envelope_w: quadrature failure");
    return w;
}

/// Two-point estimate of the envelope's origin limit:
///   Power:       t^{-t_exponent} w(t) -> c1 + c2
///   Logarithmic: w(t)/(-ln t)        -> c3, estimated as a decade slope
///   Bounded:     w(t)                -> finite positive limit
/// A single evaluation at t0 carries an O(t0^e) bias from the next term of
/// the origin expansion; the second evaluation cancels it.
inline double origin_limit_estimate(const Parameters& P, double t0) {
    const auto d = detail::require_admissible(P);
    if (!(t0 > 0.0)) throw std::domain_error("origin_limit_estimate: t0 > 0 required");
    const auto b = predicted_origin_behavior(P);
    if (b.kind == OriginCase::Logarithmic)
        return (envelope_w(P, t0) - envelope_w(P, 10.0 * t0)) / std::log(10.0);
    // Correction exponent: the subleading origin power, capped at 2 where the
    // kernel series' t^2 term takes over.
    const double gap = b.kind == OriginCase::Power ? -b.t_exponent
                                                   : d.nu * (d.two_star - 1.0 - P.power);
    const double e = std::min(gap, 2.0), rho = 4.0, f = std::pow(rho, e);
    auto y = [&](double t) { return std::pow(t, -b.t_exponent) * envelope_w(P, t); };
    return (f * y(t0) - y(rho * t0)) / (f - 1.0);
}

/// Measured origin classification of a sampled profile.
struct OriginFit {
    std::optional<OriginCase> kind;  ///< empty when no model fits cleanly
    double exponent = 0.0;           ///< log-log slope over the smallest grid decade
    double band = std::numeric_limits<double>::infinity(); ///< ~95% half-width on the slope
    double r2 = 0.0;                 ///< goodness of the winning regression
    std::optional<double> log_slope; ///< v against -ln t slope when Logarithmic
};

/// Classify the origin behavior of a sampled profile by model competition on
/// the smallest grid decade: power law against logarithm against constant,
/// ranked by residual sum of squares in v space.  Near-flat data short-cuts
/// to Bounded; a winning fit with r2 below 0.99 is inconclusive, as is a
/// window with mixed-sign samples.
inline OriginFit fit_origin_behavior(const VProfile& vp) {
    const std::size_t n = vp.t.size();
    if (n < 8) throw std::domain_error("fit_origin_behavior: grid too small");
    if (!(vp.t.front() < 1e-3))
        throw std::domain_error("fit_origin_behavior: grid must reach below t = 1e-3");

    std::vector<double> tw, vw;
    const double edge = 10.0 * vp.t.front() * (1.0 + 1e-12);
    for (std::size_t i = 0; i < n && vp.t[i] <= edge; ++i) {
        tw.push_back(vp.t[i]);
        vw.push_back(vp.v[i]);
    }
    if (tw.size() < 5)
        throw std::domain_error("fit_origin_behavior: too few samples in the smallest decade");
    const std::size_t m = tw.size();

    OriginFit out;
    const auto [mn, mx] = std::minmax_element(vw.begin(), vw.end());
    const double scale = std::max(std::abs(*mn), std::abs(*mx));
    bool positive = *mn > 0.0;
    const auto pf = positive ? fitting::power_fit(tw, vw) : fitting::LinFit{};
    if (pf.ok) {
        out.exponent = pf.slope;
        out.band = 2.0 * pf.slope_stderr;
        out.r2 = pf.r2;
    }

    // relative variation too small to resolve an exponent: flat profile
    if (*mx - *mn <= 5e-3 * scale) {
        out.kind = OriginCase::Bounded;
        if (!pf.ok) { out.exponent = 0.0; out.band = 0.0; out.r2 = 1.0; }
        return out;
    }
    if (!positive) return out; // mixed signs near the origin: no clean model

    const auto lf = fitting::log_model_fit(tw, vw);
    double mean = 0.0;
    for (double v : vw) mean += v;
    mean /= static_cast<double>(m);
    double sse_const = 0.0, sse_pow = 0.0, sse_log = 0.0;
    const double amp = std::exp(pf.intercept);
    for (std::size_t i = 0; i < m; ++i) {
        const double ec = vw[i] - mean;
        const double ep = vw[i] - amp * std::pow(tw[i], pf.slope);
        const double el = vw[i] - (lf.intercept - lf.slope * std::log(tw[i]));
        sse_const += ec * ec;
        sse_pow += ep * ep;
        sse_log += el * el;
    }

    if (sse_const <= sse_pow && sse_const <= sse_log) {
        out.kind = OriginCase::Bounded; // trendless scatter around the mean
    } else if (sse_pow <= sse_log) {
        if (pf.r2 >= 0.99)
            out.kind = std::abs(pf.slope) <= 0.02 ? OriginCase::Bounded : OriginCase::Power;
    } else {
        if (lf.r2 >= 0.99) {
            out.kind = OriginCase::Logarithmic;
            out.log_slope = lf.slope;
        }
    }
    return out;
}

/// Sup over the grid of t^{nu} |v(t)| divided by the weighted gradient norm.
/// Finiteness of this ratio is the pointwise-decay content of membership in
/// the half-line space; the sharp constant is not claimed.
inline double radial_bound_check(const Parameters& P, const VProfile& vp) {
    transform::require_transform(P);
    const auto d = derive_constants(P);
    bool all_zero = true;
    for (double v : vp.v) all_zero = all_zero && v == 0.0;
    if (all_zero) return 0.0;
    const auto rep = transform::membership_report(P, vp);
    if (!rep.in_grad_l2 || !(rep.grad_sq > 0.0))
        throw std::domain_error("radial_bound_check: weighted gradient norm vanishing or infinite");
    double sup = 0.0;
    for (std::size_t i = 0; i < vp.t.size(); ++i)
        sup = std::max(sup, std::pow(vp.t[i], d.nu) * std::abs(vp.v[i]));
    return sup / std::sqrt(rep.grad_sq);
}

/// Boundary value and fitted r -> 0 limit of r^{beta-2} phi(r)^2.
struct VanishingReport {
    double boundary_value = 0.0; ///< r^{beta-2} phi^2 at the smallest grid r
    std::optional<double> limit; ///< fitted limit: 0, +infinity, or empty when unresolved
    double exponent = 0.0;       ///< fitted power over the smallest decade
};

/// Fit r^{beta-2} phi(r)^2 over the smallest grid decade and extrapolate to
/// r = 0.  A fitted power above +0.02 gives limit 0, below -0.02 gives
/// +infinity; anything flatter than that, or a failed fit, is unresolved.
inline VanishingReport liminf_check(const Parameters& P, const PhiProfile& ph) {
    P.validate();
    const std::size_t n = ph.r.size();
    if (n < 8) throw std::domain_error("liminf_check: grid too small");
    if (!(ph.r.front() < 1e-3))
        throw std::domain_error("liminf_check: grid must reach below r = 1e-3");
    const double beta = derive_constants(P).beta;

    std::vector<double> rw, yw;
    const double edge = 10.0 * ph.r.front() * (1.0 + 1e-12);
    bool window_zero = true;
    for (std::size_t i = 0; i < n && ph.r[i] <= edge; ++i) {
        rw.push_back(ph.r[i]);
        yw.push_back(std::pow(ph.r[i], beta - 2.0) * ph.phi[i] * ph.phi[i]);
        window_zero = window_zero && ph.phi[i] == 0.0;
    }
    if (rw.size() < 5)
        throw std::domain_error("liminf_check: too few samples in the smallest decade");

    VanishingReport out;
    out.boundary_value = yw.front();
    if (window_zero) {
        out.limit = 0.0; // identically zero at the origin end
        return out;
    }
    for (double y : yw)
        if (!(y > 0.0)) return out; // a vanishing sample breaks the power fit
    const auto pf = fitting::power_fit(rw, yw);
    if (!pf.ok) return out;
    out.exponent = pf.slope;
    if (pf.r2 < 0.99) return out;
    if (pf.slope > 0.02) out.limit = 0.0;
    else if (pf.slope < -0.02) out.limit = std::numeric_limits<double>::infinity();
    return out;
}

} // namespace asymptotics
} // namespace radpot

#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "radpot/fitting.hpp"
#include "radpot/params.hpp"
#include "radpot/profile.hpp"

namespace radpot {

/// Change of variables between the original radial problem and its rescaled
/// half-line form.  Valid for 0 < alpha < 2.
namespace transform {

inline void require_transform(const Parameters& P) {
    P.validate();
    if (!(P.alpha < 2.0)) throw std::domain_error("transform: requires alpha < 2");
}

/// c = (2-alpha)/(2 sqrt(A)); r = (c t)^{2/(2-alpha)}, t = r^{(2-alpha)/2}/c.
inline double scale_c(const Parameters& P) {
    return (2.0 - P.alpha) / (2.0 * std::sqrt(P.amplitude));
}

inline double t_of_r(const Parameters& P, double r) {
    require_transform(P);
    if (!(r > 0.0)) throw std::domain_error("t_of_r: r > 0 required");
    return std::pow(r, 0.5 * (2.0 - P.alpha)) / scale_c(P);
}

inline double r_of_t(const Parameters& P, double t) {
    require_transform(P);
    if (!(t > 0.0)) throw std::domain_error("r_of_t: t > 0 required");
    return std::pow(scale_c(P) * t, 2.0 / (2.0 - P.alpha));
}

/// v(t) = phi(r(t)); v'(t) = phi'(r) r^{alpha/2} / sqrt(A).
inline VProfile v_from_phi(const Parameters& P, const PhiProfile& ph) {
    require_transform(P);
    const double sa = std::sqrt(P.amplitude);
    VProfile out;
    out.t.resize(ph.r.size());
    out.v = ph.phi;
    out.dv.resize(ph.r.size());
    for (std::size_t i = 0; i < ph.r.size(); ++i) {
        out.t[i] = t_of_r(P, ph.r[i]);
        out.dv[i] = ph.dphi[i] * std::pow(ph.r[i], 0.5 * P.alpha) / sa;
    }
    return out;
}

/// phi(r) = v(t(r)); phi'(r) = sqrt(A) v'(t) r^{-alpha/2}.
inline PhiProfile phi_from_v(const Parameters& P, const VProfile& vp) {
    require_transform(P);
    const double sa = std::sqrt(P.amplitude);
    PhiProfile out;
    out.r.resize(vp.t.size());
    out.phi = vp.v;
    out.dphi.resize(vp.t.size());
    for (std::size_t i = 0; i < vp.t.size(); ++i) {
        out.r[i] = r_of_t(P, vp.t[i]);
        out.dphi[i] = sa * vp.dv[i] * std::pow(out.r[i], -0.5 * P.alpha);
    }
    return out;
}

/// Constants carrying the weighted integrals across the change of variables:
///   int phi'^2 r^{N-1} dr      = grad_factor * int v'^2 t^w dt
///   int phi^2  r^{N-1-alpha} dr = mass_factor * int v^2  t^w dt
///   int |phi|^p r^{N-1} dr     = lp_factor  * int |v|^p t^{w_p} dt
/// with w = (2N-2-alpha)/(2-alpha), w_p = (2N-2+alpha)/(2-alpha).
struct NormFactors {
    double grad_factor, mass_factor, lp_factor;
};

inline NormFactors norm_factors(const Parameters& P) {
    require_transform(P);
    const auto d = derive_constants(P);
    const double c = scale_c(P), sa = std::sqrt(P.amplitude);
    NormFactors f;
    f.grad_factor = sa * std::pow(c, d.weight_exponent);
    f.mass_factor = std::pow(c, d.weight_exponent) / sa;
    f.lp_factor = std::pow(c, d.lp_weight_exponent) / sa;
    return f;
}

/// One weighted half-line integral int y(t) t^w dt with endpoint
/// extrapolation: power-law head, exponential-or-power tail.
struct TailedIntegral {
    double value = 0.0;   ///< interior + extrapolated pieces (when finite)
    bool finite = true;
    bool conclusive = true;
};

namespace detail {

inline TailedIntegral weighted_integral(const std::vector<double>& t,
                                        const std::vector<double>& y, double w) {
    TailedIntegral out;
    const std::size_t n = t.size();
    std::vector<double> f(n);
    bool all_zero = true;
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = y[i] * std::pow(t[i], w);
        if (y[i] != 0.0) all_zero = false;
    }
    if (all_zero) return out;

    // interior: trapezoid in x = ln t of f * t
    double interior = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dx = std::log(t[i + 1] / t[i]);
        interior += 0.5 * dx * (f[i] * t[i] + f[i + 1] * t[i + 1]);
    }
    out.value = interior;

    auto window = [&](bool head) {
        std::vector<double> ts, fs;
        const double edge = head ? t.front() * 10.0 : t.back() / 10.0;
        for (std::size_t i = 0; i < n; ++i)
            if (head ? t[i] <= edge : t[i] >= edge) { ts.push_back(t[i]); fs.push_back(f[i]); }
        return std::pair(ts, fs);
    };

    // head: f ~ c t^sigma, finite iff sigma > -1.  A boundary sample that has
    // already decayed to zero extends by zero.
    if (f.front() != 0.0) {
        auto [ts, fs] = window(true);
        bool positive = true;
        for (double v : fs) positive = positive && v > 0.0;
        if (!positive) {
            out.conclusive = false;
        } else {
            const auto fit = fitting::power_fit(ts, fs);
            if (!fit.ok || fit.r2 < 0.8) out.conclusive = false;
            else if (fit.slope <= -1.0) out.finite = false;
            else out.value += f.front() * t.front() / (fit.slope + 1.0);
        }
    }
    // tail: exponential decay preferred, power fallback
    if (f.back() != 0.0) {
        auto [ts, fs] = window(false);
        bool positive = true;
        for (double v : fs) positive = positive && v > 0.0;
        if (!positive) {
            out.conclusive = false;
        } else {
            const auto ef = fitting::exp_fit(ts, fs);
            const double rate = -ef.slope;
            if (ef.ok && rate * (ts.back() - ts.front()) > 2.0 && ef.r2 > 0.9) {
                out.value += f.back() / rate;
            } else {
                const auto pf = fitting::power_fit(ts, fs);
                if (!pf.ok || pf.r2 < 0.8) out.conclusive = false;
                else if (pf.slope >= -1.0) out.finite = false;
                else out.value += f.back() * t.back() / (-pf.slope - 1.0);
            }
        }
    }
    if (!out.finite) out.value = std::numeric_limits<double>::infinity();
    return out;
}

} // namespace detail

/// Membership of a rescaled profile in the weighted Sobolev/Lebesgue triple.
/// Booleans are extrapolation-based finiteness verdicts; `conclusive` drops
/// when an endpoint behavior could not be fitted or the grid span is short.
struct MembershipReport {
    bool in_weighted_l2 = false;  ///< int v^2 t^w dt < inf
    bool in_grad_l2 = false;      ///< int v'^2 t^w dt < inf
    bool in_lp = false;           ///< int |v|^p t^{w_p} dt < inf (= L^p(r^{N-1} dr))
    bool conclusive = true;
    double l2_sq = 0.0, grad_sq = 0.0, lp_pow = 0.0; ///< t-side integrals (extrapolated)
};

inline MembershipReport membership_report(const Parameters& P, const VProfile& vp) {
    require_transform(P);
    if (vp.t.size() < 8) throw std::domain_error("membership_report: grid too small");
    const auto d = derive_constants(P);
    MembershipReport rep;
    if (vp.t.front() > 1.0001e-4 || vp.t.back() < 49.999) rep.conclusive = false;

    std::vector<double> v2(vp.v.size()), g2(vp.v.size()), vp_(vp.v.size());
    for (std::size_t i = 0; i < vp.v.size(); ++i) {
        v2[i] = vp.v[i] * vp.v[i];
        g2[i] = vp.dv[i] * vp.dv[i];
        vp_[i] = std::pow(std::abs(vp.v[i]), P.power);
    }
    const auto a = detail::weighted_integral(vp.t, v2, d.weight_exponent);
    const auto b = detail::weighted_integral(vp.t, g2, d.weight_exponent);
    const auto c = detail::weighted_integral(vp.t, vp_, d.lp_weight_exponent);
    rep.in_weighted_l2 = a.finite;
    rep.in_grad_l2 = b.finite;
    rep.in_lp = c.finite;
    rep.conclusive = rep.conclusive && a.conclusive && b.conclusive && c.conclusive;
    rep.l2_sq = a.value;
    rep.grad_sq = b.value;
    rep.lp_pow = c.value;
    return rep;
}

} // namespace transform
} // namespace radpot

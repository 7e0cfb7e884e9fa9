#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radpot/bessel.hpp"
#include "radpot/fitting.hpp"
#include "radpot/params.hpp"
#include "radpot/profile.hpp"
#include "radpot/quadrature.hpp"

namespace radpot {

/// Resolvent representation of the half-line equation
///   -v'' - ((2 nu + 1)/t) v' + v = rhs(t)
/// through the modified Bessel pair, and the fixed-point iteration for the
/// nonlinear right-hand side B t^{2 alpha/(2-alpha)} v^{p-1}.
namespace green {

/// Linear combination data for the general solution: coefficients of the
/// regular and decaying homogeneous branches plus a sampled forcing term.
/// An empty grid means zero forcing.
struct GeneralSolutionSpec {
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<double> t, g;
};

struct FixedPointOptions {
    int max_iter = 500;
    double tol = 1e-8;
    double damping = 0.5;   ///< weight of the operator image in each update
    double ode_tol = 1e-6;  ///< acceptance bound for the collocation residual
};

enum class FixedPointStatus { Converged, MaxIterations, Diverged };

struct FixedPointResult {
    VProfile profile;
    double residual_sup = 0.0;  ///< sup |Tv - v| over the grid at exit
    int iterations = 0;
    bool converged = false;
    FixedPointStatus status = FixedPointStatus::MaxIterations;
    double ode_residual = 0.0;  ///< normalized collocation residual of the profile
    bool trivial = false;       ///< the identically-zero fixed point
};

namespace detail {

inline void require_halfline(const Parameters& P) {
    P.validate();
    if (!(P.alpha < 2.0))
        throw std::domain_error("green: the half-line form requires alpha < 2");
}

/// Interpolated forcing evaluation with range validation.
class Forcing {
  public:
    explicit Forcing(const GeneralSolutionSpec& s) {
        if (s.t.empty()) return;
        if (s.t.size() != s.g.size() || s.t.size() < 5)
            throw std::domain_error("green: forcing needs >= 5 samples");
        for (double gv : s.g)
            if (!std::isfinite(gv)) throw std::domain_error("green: forcing has a non-finite sample");
        lo_ = s.t.front();
        hi_ = s.t.back();
        interp_.emplace(s.t, s.g);
    }

    bool zero() const { return !interp_.has_value(); }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double operator()(double t) const {
        if (!interp_) return 0.0;
        return (*interp_)(t);
    }

  private:
    std::optional<ProfileInterp> interp_;
    double lo_ = 0.0, hi_ = 0.0;
};

} // namespace detail

/// Value at t of the general solution of -v'' - ((2nu+1)/t)v' + v = g:
///   t^{-nu} [ (c1 - int_1^t s^{1+nu} K_nu g ds) I_nu(t)
///           + (c2 + int_1^t s^{1+nu} I_nu g ds) K_nu(t) ],
/// with the basepoint fixed at 1.
inline double general_solution(const Parameters& P, const GeneralSolutionSpec& spec, double t) {
    detail::require_halfline(P);
    if (!(t > 0.0)) throw std::domain_error("general_solution: t > 0 required");
    if (t > 600.0)
        throw std::overflow_error("general_solution: t too large for the unscaled kernel pair");
    const double nu = derive_constants(P).nu;
    const detail::Forcing g(spec);

    double ik = 0.0, ii = 0.0;
    if (!g.zero() && t != 1.0) {
        const double a = std::min(1.0, t), b = std::max(1.0, t);
        if (a < g.lo() * (1.0 - 1e-12) || b > g.hi() * (1.0 + 1e-12))
            throw std::runtime_error("general_solution: forcing grid does not cover [min(1,t), max(1,t)]");
        ik = quad::adaptive_log(
            [&](double s) { return std::pow(s, 1.0 + nu) * bessel::eval_k(nu, s) * g(s); }, 1.0, t,
            1e-12, 4);
        ii = quad::adaptive_log(
            [&](double s) { return std::pow(s, 1.0 + nu) * bessel::eval_i(nu, s) * g(s); }, 1.0, t,
            1e-12, 4);
    }
    return std::pow(t, -nu) *
           ((spec.c1 - ik) * bessel::eval_i(nu, t) + (spec.c2 + ii) * bessel::eval_k(nu, t));
}

namespace detail {

/// One Gauss panel of s^{w} X_nu(s) h(s) e^{s_sign (s - ref)} with the scaled
/// kernel X in {I, K}; the exponential shift keeps every factor representable.
template <class H>
double scaled_panel(double nu, double w, const H& h, double a, double b, double ref, bool use_i) {
    return quad::panel(
        [&](double s) {
            const double ker = use_i ? bessel::eval_i_scaled(nu, s) : bessel::eval_k_scaled(nu, s);
            const double shift = use_i ? s - ref : ref - s;
            return std::pow(s, w) * ker * h(s) * std::exp(shift);
        },
        a, b);
}

} // namespace detail

/// Image of the profile under the resolvent integral operator
///   (Tv)(t) = B t^{-nu} [ K_nu(t) int_0^t s^w I_nu(s) v^{p-1} ds
///                       + I_nu(t) int_t^inf s^w K_nu(s) v^{p-1} ds ],
/// w = (N+alpha)/(2-alpha), sampled on the input grid.  The head integral is
/// extended below the grid by a fitted power law (its exponent must exceed -1)
/// and the tail by a fitted exponential decay (its rate must be positive).
inline VProfile apply_operator(const Parameters& P, const VProfile& vp) {
    detail::require_halfline(P);
    const auto d = derive_constants(P);
    const double nu = d.nu, w = d.kernel_exponent, pw = P.power - 1.0;
    const std::size_t n = vp.t.size();
    if (n < 8) throw std::domain_error("apply_operator: grid too small");
    for (double x : vp.v)
        if (!(x >= 0.0)) throw std::domain_error("apply_operator: profile must be nonnegative");

    bool all_zero = true;
    for (double x : vp.v) all_zero = all_zero && x == 0.0;
    if (all_zero) {
        VProfile out;
        out.t = vp.t;
        out.v.assign(n, 0.0);
        out.dv.assign(n, 0.0);
        return out;
    }

    // right-end growth gate: the outer integral needs v = O(t^{-nu})
    {
        std::vector<double> ts, vs;
        for (std::size_t i = 0; i < n; ++i)
            if (vp.t[i] >= vp.t.back() / 10.0) { ts.push_back(vp.t[i]); vs.push_back(vp.v[i]); }
        const auto fit = fitting::power_fit(ts, vs);
        if (fit.ok && fit.slope > -nu + 0.25)
            throw std::domain_error("apply_operator: profile does not decay like t^{-nu} at the right end");
    }

    const ProfileInterp interp(vp.t, vp.v);
    auto h = [&](double s) {
        const double val = interp(s);
        return val > 0.0 ? std::pow(val, pw) : 0.0;
    };

    // inner accumulant J_i = e^{-t_i} int_0^{t_i} s^w I_nu(s) h(s) ds
    std::vector<double> J(n, 0.0);
    {
        auto f_in = [&](double s) { return std::pow(s, w) * bessel::eval_i(nu, s) * h(s); };
        const double f0 = f_in(vp.t.front());
        if (f0 > 0.0) {
            std::vector<double> ts, fs;
            for (std::size_t i = 0; i < n && vp.t[i] <= vp.t.front() * 10.0; ++i) {
                const double f = f_in(vp.t[i]);
                if (f > 0.0) { ts.push_back(vp.t[i]); fs.push_back(f); }
            }
            const auto fit = fitting::power_fit(ts, fs);
            if (!fit.ok || !(fit.slope > -1.0))
                throw std::runtime_error("apply_operator: head integrand is not integrable");
            J[0] = std::exp(-vp.t.front()) * f0 * vp.t.front() / (fit.slope + 1.0);
        }
        for (std::size_t i = 1; i < n; ++i)
            J[i] = std::exp(-(vp.t[i] - vp.t[i - 1])) * J[i - 1] +
                   detail::scaled_panel(nu, w, h, vp.t[i - 1], vp.t[i], vp.t[i], true);
    }

    // outer accumulant O_i = e^{+t_i} int_{t_i}^{inf} s^w K_nu(s) h(s) ds
    std::vector<double> O(n, 0.0);
    {
        auto fhat_out = [&](double s) { return std::pow(s, w) * bessel::eval_k_scaled(nu, s) * h(s); };
        const double fn = fhat_out(vp.t.back());
        if (fn > 0.0) {
            std::vector<double> ss, ys;
            for (std::size_t i = 0; i < n; ++i) {
                if (vp.t[i] < vp.t.back() / 10.0) continue;
                const double f = fhat_out(vp.t[i]);
                if (f > 0.0) { ss.push_back(vp.t[i]); ys.push_back(std::log(f) - (vp.t[i] - vp.t.back())); }
            }
            const auto fit = fitting::linear_fit(ss, ys);
            const double rate = -fit.slope;
            if (!fit.ok || !(rate > 0.0))
                throw std::runtime_error("apply_operator: divergent tail fit beyond the grid");
            O[n - 1] = fn / rate;
        }
        for (std::size_t i = n - 1; i-- > 0;)
            O[i] = std::exp(-(vp.t[i + 1] - vp.t[i])) * O[i + 1] +
                   detail::scaled_panel(nu, w, h, vp.t[i], vp.t[i + 1], vp.t[i], false);
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = vp.t[i];
        out[i] = d.b_const * std::pow(t, -nu) *
                 (bessel::eval_k_scaled(nu, t) * J[i] + bessel::eval_i_scaled(nu, t) * O[i]);
    }
    return make_profile(vp.t, std::move(out));
}

/// Normalized sup of the collocation residual of
///   -(v_xx + 2 nu v_x) + t^2 (v - B t^{2alpha/(2-alpha)} v^{p-1}) = 0,
/// the x = ln t form of the equation, with log-grid finite differences.
/// Dividing by t^2 instead would amplify double-rounding noise of v by
/// 1/(dx^2 t^2) and drown the left end of any grid reaching below ~1e-3.
/// Ends of the grid are skipped (one-sided stencils dominate there).
inline double ode_residual_sup(const Parameters& P, const VProfile& vp) {
    detail::require_halfline(P);
    const auto d = derive_constants(P);
    const std::size_t n = vp.t.size();
    if (n < 9) throw std::domain_error("ode_residual_sup: grid too small");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::log(vp.t[i]);
    const auto vx = fd::derivative(x, vp.v, 1);
    const auto vxx = fd::derivative(x, vp.v, 2);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double t2 = vp.t[i] * vp.t[i];
        const double nl = d.b_const * std::pow(vp.t[i], d.forcing_exponent) *
                          std::pow(std::abs(vp.v[i]), P.power - 1.0);
        const double lin = vxx[i] + 2.0 * d.nu * vx[i];
        worst = std::max(worst, std::abs(-lin + t2 * (vp.v[i] - nl)));
        scale = std::max(scale, std::abs(vxx[i]) + std::abs(2.0 * d.nu * vx[i]) +
                                    t2 * (std::abs(vp.v[i]) + nl));
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

/// Damped iteration v <- (1-damping) v + damping Tv, with an exact rescaling
/// of each iterate to unit operator gain.  The rescale uses the (p-1)-homogeneity
/// of T; without it the scaling direction is expanding for every damping in
/// (0,1] and the plain iteration cannot settle on a nontrivial fixed point.
inline FixedPointResult fixed_point_solve(const Parameters& P, const VProfile& init,
                                          const FixedPointOptions& opts = {}) {
    detail::require_halfline(P);
    const auto d = derive_constants(P);
    if (!(P.power > d.two_alpha && P.power < d.two_star))
        throw std::domain_error("fixed_point_solve: power outside the admissible range");
    const std::size_t n = init.t.size();
    if (n < 9) throw std::domain_error("fixed_point_solve: grid too small");

    FixedPointResult res;
    bool zero = true;
    for (double x : init.v) {
        if (!(x >= 0.0)) throw std::domain_error("fixed_point_solve: init must be nonnegative");
        zero = zero && x == 0.0;
    }
    if (zero) {
        res.profile = init;
        res.trivial = true;
        res.converged = true;
        res.status = FixedPointStatus::Converged;
        return res;
    }

    auto sup = [](const std::vector<double>& a) {
        double m = 0.0;
        for (double x : a) m = std::max(m, std::abs(x));
        return m;
    };

    VProfile cur = init;
    const double lam = opts.damping;
    for (int k = 1; k <= opts.max_iter; ++k) {
        VProfile img = apply_operator(P, cur);
        const double sv = sup(cur.v), si = sup(img.v);
        if (!std::isfinite(si) || si > 1e8 || sv > 1e8) {
            res.profile = cur;
            res.iterations = k;
            res.status = FixedPointStatus::Diverged;
            res.residual_sup = std::numeric_limits<double>::infinity();
            return res;
        }
        if (si == 0.0) { // image collapsed; only the trivial point remains
            res.profile = img;
            res.iterations = k;
            res.trivial = true;
            res.converged = true;
            res.status = FixedPointStatus::Converged;
            return res;
        }
        // unit-gain rescale: v <- cv with c = (sup v / sup Tv)^{1/(p-2)}
        const double c = std::pow(sv / si, 1.0 / (P.power - 2.0));
        const double cimg = std::pow(c, P.power - 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            cur.v[i] *= c;
            img.v[i] *= cimg;
        }
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(img.v[i] - cur.v[i]));
        res.residual_sup = r;
        res.iterations = k;
        if (r <= opts.tol) {
            res.profile = make_profile(cur.t, std::move(cur.v));
            res.ode_residual = ode_residual_sup(P, res.profile);
            res.converged = res.ode_residual <= opts.ode_tol;
            res.status = res.converged ? FixedPointStatus::Converged : FixedPointStatus::MaxIterations;
            return res;
        }
        for (std::size_t i = 0; i < n; ++i) cur.v[i] = (1.0 - lam) * cur.v[i] + lam * img.v[i];
    }
    res.profile = cur;
    res.status = FixedPointStatus::MaxIterations;
    return res;
}

} // namespace green
} // namespace radpot

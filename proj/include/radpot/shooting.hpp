#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "radpot/fitting.hpp"
#include "radpot/params.hpp"
#include "radpot/profile.hpp"

namespace radpot {

/// Direct integration of the half-line equation
///   v'' = -((2 nu + 1)/t) v' + v - B t^{2 alpha/(2-alpha)} v^{p-1}
/// from regular initial data at t_min, with trajectory classification and
/// bisection on the initial height for the decaying separatrix.
namespace shooting {

enum class Classification { Crossing, Growing, Decaying, Inconclusive };

struct Trajectory {
    VProfile profile;
    Classification classification = Classification::Inconclusive;
    std::optional<double> event_t;  ///< first zero of v when Crossing
    std::string diagnostic;
};

struct TSpan {
    double lo = 1e-4;
    double hi = 40.0;
};

struct IntegrateOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double growth_factor = 1e6;        ///< |v| > growth_factor * v0 declares Growing
    double samples_per_decade = 120.0;
    bool linear_only = false;          ///< drop the nonlinear term (basis checks)
};

namespace detail {

using State = std::array<double, 2>;

/// Sustained decay over the last decade: the fitted log-log slope must stay
/// below -1/2 on every sub-window.  A single whole-decade fit would also
/// accept trajectories captured by the slowly shrinking nonlinear turning
/// point, which ring around an algebraic envelope instead of decaying.
inline bool sustained_decay(const std::vector<double>& t, const std::vector<double>& v,
                            double hi) {
    const double lo = hi / 10.0;
    const int windows = 6;
    for (int w = 0; w < windows; ++w) {
        const double a = lo * std::pow(10.0, static_cast<double>(w) / windows);
        const double b = lo * std::pow(10.0, static_cast<double>(w + 1) / windows);
        std::vector<double> ts, vs;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < a || t[i] > b) continue;
            if (!(v[i] > 0.0)) return false;
            ts.push_back(t[i]);
            vs.push_back(v[i]);
        }
        if (ts.size() < 3) return false;
        const auto fit = fitting::power_fit(ts, vs);
        if (!fit.ok || !(fit.slope < -0.5)) return false;
    }
    return true;
}

} // namespace detail

/// Integrate from regular two-term initial data
///   v(t_min) = v0 (1 + t_min^2/(4(nu+1))),  v'(t_min) = v0 t_min/(2(nu+1))
/// and classify the trajectory.
inline Trajectory integrate_v(const Parameters& P, double v0, TSpan span = {},
                              const IntegrateOptions& opts = {}) {
    P.validate();
    if (!(P.alpha < 2.0))
        throw std::domain_error("integrate_v: the half-line form requires alpha < 2");
    if (!(v0 >= 0.0)) throw std::domain_error("integrate_v: v0 >= 0 required");
    if (!(span.lo > 0.0 && span.hi > span.lo))
        throw std::domain_error("integrate_v: need 0 < lo < hi");

    const auto d = derive_constants(P);
    const double nu = d.nu, B = d.b_const, sigma = d.forcing_exponent, pw = P.power - 1.0;

    const std::size_t n = static_cast<std::size_t>(
        std::ceil(std::log10(span.hi / span.lo) * opts.samples_per_decade)) + 1;
    const auto grid = make_log_grid(span.lo, span.hi, std::max<std::size_t>(n, 9));

    Trajectory out;
    if (v0 == 0.0) {
        out.profile.t = grid;
        out.profile.v.assign(grid.size(), 0.0);
        out.profile.dv.assign(grid.size(), 0.0);
        out.classification = Classification::Decaying;
        out.diagnostic = "trivial zero trajectory";
        return out;
    }

    auto sys = [&](const detail::State& y, detail::State& dy, double t) {
        // odd extension of the power keeps the field smooth across v = 0
        const double nl = opts.linear_only
                              ? 0.0
                              : B * std::pow(t, sigma) *
                                    std::copysign(std::pow(std::abs(y[0]), pw), y[0]);
        dy[0] = y[1];
        dy[1] = -(2.0 * nu + 1.0) / t * y[1] + y[0] - nl;
    };

    namespace odeint = boost::numeric::odeint;
    auto stepper =
        odeint::make_dense_output(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<detail::State>());
    detail::State y0{v0 * (1.0 + span.lo * span.lo / (4.0 * (nu + 1.0))),
                     v0 * span.lo / (2.0 * (nu + 1.0))};
    stepper.initialize(y0, span.lo, 0.01 * span.lo);

    std::vector<double> ts, vs, dvs;
    ts.reserve(grid.size());
    vs.reserve(grid.size());
    dvs.reserve(grid.size());
    ts.push_back(span.lo);
    vs.push_back(y0[0]);
    dvs.push_back(y0[1]);

    const double bound = opts.growth_factor * v0;
    std::size_t idx = 1;
    long steps = 0;

    auto finish = [&](Classification c, std::optional<double> ev, std::string why) {
        out.profile.t = std::move(ts);
        out.profile.v = std::move(vs);
        out.profile.dv = std::move(dvs);
        out.classification = c;
        out.event_t = ev;
        out.diagnostic = std::move(why);
        return out;
    };

    while (stepper.current_time() < span.hi) {
        if (++steps > 2'000'000)
            return finish(Classification::Inconclusive, std::nullopt, "step budget exceeded");
        const auto iv = stepper.do_step(sys);
        if (!(iv.second - iv.first > 1e-14 * std::max(1.0, iv.first)))
            return finish(Classification::Inconclusive, std::nullopt,
                          "step size underflow at t = " + std::to_string(iv.first));
        // everything recorded so far is positive, so a zero anywhere in this
        // interval can be bracketed from the last recorded time
        auto cross_at = [&](double tr) {
            double tl = std::max(iv.first, ts.back());
            detail::State ym;
            for (int it = 0; it < 100 && tr - tl > 1e-15 * tr; ++it) {
                const double tm = 0.5 * (tl + tr);
                stepper.calc_state(tm, ym);
                (ym[0] > 0.0 ? tl : tr) = tm;
            }
            stepper.calc_state(tr, ym);
            ts.push_back(tr);
            vs.push_back(ym[0]);
            dvs.push_back(ym[1]);
            return finish(Classification::Crossing, tr, "");
        };
        while (idx < grid.size() && grid[idx] <= iv.second) {
            detail::State y;
            stepper.calc_state(grid[idx], y);
            if (y[0] <= 0.0) return cross_at(grid[idx]);
            ts.push_back(grid[idx]);
            vs.push_back(y[0]);
            dvs.push_back(y[1]);
            ++idx;
            if (vs.back() > bound)
                return finish(Classification::Growing, std::nullopt, "");
        }
        // a zero may also sit between the last sample and the interval end
        if (stepper.current_state()[0] <= 0.0) return cross_at(iv.second);
    }

    if (detail::sustained_decay(ts, vs, span.hi))
        return finish(Classification::Decaying, std::nullopt, "");
    return finish(Classification::Inconclusive, std::nullopt,
                  "tail windows not uniformly decaying");
}

/// Bisect on the initial height between two differently classified endpoint
/// trajectories; returns the decaying separatrix candidate when one emerges.
inline std::optional<VProfile> find_ground_state(const Parameters& P,
                                                 std::pair<double, double> bracket,
                                                 TSpan span = {},
                                                 const IntegrateOptions& opts = {}) {
    double a = bracket.first, b = bracket.second;
    if (!(a >= 0.0 && b > a && std::isfinite(b)))
        throw std::domain_error("find_ground_state: need 0 <= low < high");
    const auto ta = integrate_v(P, a, span, opts);
    const auto tb = integrate_v(P, b, span, opts);
    if (ta.classification == tb.classification)
        throw std::domain_error("find_ground_state: bracket endpoints classify identically");
    if (ta.classification == Classification::Decaying) return ta.profile;
    if (tb.classification == Classification::Decaying) return tb.profile;

    Classification ca = ta.classification, cb = tb.classification;
    while (b - a > 1e-12 * 0.5 * (a + b)) {
        const double mid = 0.5 * (a + b);
        const auto tm = integrate_v(P, mid, span, opts);
        if (tm.classification == Classification::Decaying) return tm.profile;
        if (tm.classification == ca) {
            a = mid;
        } else if (tm.classification == cb) {
            b = mid;
        } else {
            return std::nullopt;  // bracket lost to a third classification
        }
    }

    // near the separatrix the distance to it grows like e^{+t}; probe only
    // as far as the trajectory still tracks it
    const double mid = 0.5 * (a + b);
    const double width_rel = (b - a) / mid;
    TSpan probe = span;
    probe.hi = std::min(span.hi, std::max(10.0 * span.lo, 0.45 * -std::log(width_rel)));
    const auto tm = integrate_v(P, mid, probe, opts);
    if (tm.classification == Classification::Decaying) return tm.profile;
    return std::nullopt;
}

} // namespace shooting
} // namespace radpot

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "radpot/fitting.hpp"
#include "radpot/params.hpp"
#include "radpot/profile.hpp"
#include "radpot/quadrature.hpp"

namespace radpot::pohozaev {

/// Radial energy of the state (phi, phi') at radius r, together with its
/// r^beta-weighted value.  Along solutions of
///   phi'' + (N-1)/r phi' = A r^{-alpha} phi - |phi|^{p-2} phi
/// the energy obeys dE/dr = -(N-1)/r phi'^2 + (alpha/2) A r^{-alpha-1} phi^2.
struct EnergyRecord {
    double r = 0.0;
    double E = 0.0;
    double E_beta = 0.0;
};

/// Both sides of the weighted identity on [a, b]:
///   gamma1 int r^{beta-1} phi'^2 + gamma2 int r^{beta-3} phi^2 = B(b) - B(a)
/// with the boundary functional B of boundary_term below.  The residual
/// lhs - rhs vanishes exactly on solutions.
struct IdentityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// Identity tail on [a, infinity) against the origin functional F(a) = -B(a).
/// On a decaying solution the two agree; a strictly positive margin certifies
/// that no solution matches the candidate's data at a.
struct ObstructionReport {
    double lhs_tail = 0.0;
    double F_a = 0.0;
    double contradiction_margin = 0.0;
};

/// Energy of a raw state.  E = phi'^2/2 - A r^{-alpha} phi^2/2 + |phi|^p/p.
inline EnergyRecord energy(const Parameters& P, double r, double phi, double dphi) {
    P.validate();
    if (!(r > 0.0)) throw std::domain_error("energy: r > 0 required");
    const auto d = derive_constants(P);
    EnergyRecord rec;
    rec.r = r;
    rec.E = 0.5 * dphi * dphi -
            0.5 * P.amplitude * std::pow(r, -P.alpha) * phi * phi +
            std::pow(std::abs(phi), P.power) / P.power;
    rec.E_beta = std::pow(r, d.beta) * rec.E;
    return rec;
}

/// Value of dE/dr along solutions: dissipation from the radial friction term
/// plus the drift of the potential weight.  States off a solution do not obey
/// it; comparing against a finite-difference derivative of E is a solution
/// check.
inline double energy_flux(const Parameters& P, double r, double phi, double dphi) {
    P.validate();
    if (!(r > 0.0)) throw std::domain_error("energy_flux: r > 0 required");
    return -(P.dim - 1.0) / r * dphi * dphi +
           0.5 * P.alpha * P.amplitude * std::pow(r, -P.alpha - 1.0) * phi * phi;
}

/// Boundary functional of the weighted identity,
///   B(r) = r^beta E + (beta/p) (r^{beta-1} phi phi' + (N-beta)/2 r^{beta-2} phi^2).
/// Multiplying the equation by r^{beta-1} phi and by the weighted energy rule
/// gives d/dr B = gamma1 r^{beta-1} phi'^2 + gamma2 r^{beta-3} phi^2 along
/// solutions: the remaining bulk term carries the factor
/// (alpha - beta)/2 + beta/p, identically zero for beta = alpha p/(p-2).
inline double boundary_term(const Parameters& P, double r, double phi, double dphi) {
    const auto rec = energy(P, r, phi, dphi);
    const auto d = derive_constants(P);
    const double bracket = std::pow(r, d.beta - 1.0) * phi * dphi +
                           0.5 * (P.dim - d.beta) * std::pow(r, d.beta - 2.0) * phi * phi;
    return rec.E_beta + d.beta / P.power * bracket;
}

/// Origin functional F(a) = -B(a): the a-side contribution to the identity
/// once the far boundary terms decay.
inline double origin_functional(const Parameters& P, double a, double phi, double dphi) {
    return -boundary_term(P, a, phi, dphi);
}

/// F(a) rearranged around a completed square,
///   F = -a^{beta-2} (a phi' + (beta/p) phi)^2 / 2 - a^beta |phi|^p / p
///       + (beta^2/(2p^2) - beta (N-beta)/(2p)) a^{beta-2} phi^2
///       + (A/2) a^{beta-alpha} phi^2.
/// The square and the |phi|^p term are nonpositive; the rest vanishes with a
/// for bounded states, which is what forces the contradiction margin.
inline double origin_functional_square_form(const Parameters& P, double a, double phi,
                                            double dphi) {
    P.validate();
    if (!(a > 0.0)) throw std::domain_error("origin_functional_square_form: a > 0 required");
    const auto d = derive_constants(P);
    const double bp = d.beta / P.power;
    const double sq = a * dphi + bp * phi;
    return -0.5 * std::pow(a, d.beta - 2.0) * sq * sq -
           std::pow(a, d.beta) * std::pow(std::abs(phi), P.power) / P.power +
           (0.5 * bp * bp - 0.5 * d.beta * (P.dim - d.beta) / P.power) *
               std::pow(a, d.beta - 2.0) * phi * phi +
           0.5 * P.amplitude * std::pow(a, d.beta - P.alpha) * phi * phi;
}

namespace detail {

/// Monotone interpolants for both profile columns with a shared range guard.
struct PhiInterp {
    ProfileInterp phi, dphi;
    double lo, hi;

    explicit PhiInterp(const PhiProfile& ph)
        : phi(ph.r, ph.phi), dphi(ph.r, ph.dphi), lo(ph.r.front()), hi(ph.r.back()) {}

    void require(double r, const char* who) const {
        if (!(r >= lo && r <= hi))
            throw std::domain_error(std::string(who) + ": radius outside the profile grid");
    }
};

template <class F>
double refine(F&& f, double a, double b) {
    const double coarse = quad::log_panels(f, a, b, 4 + static_cast<int>(2.0 * std::log10(b / a)));
    const double tol = std::max(std::abs(coarse), 1e-300) * 1e-12;
    return quad::adaptive_log(f, a, b, tol, 4);
}

/// Remainder of int_{r_back}^inf r^w y(r)^2 dr from a decay fit over the last
/// grid decade; exponential decay preferred, integrable power law fallback.
inline double tail_remainder(const std::vector<double>& r, const std::vector<double>& y,
                             double w) {
    const double rb = r.back();
    std::vector<double> rs, gs;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < rb / 10.0) continue;
        rs.push_back(r[i]);
        gs.push_back(std::pow(r[i], w) * y[i] * y[i]);
    }
    if (gs.back() == 0.0) return 0.0;
    const auto ef = fitting::exp_fit(rs, gs);
    const double rate = -ef.slope;
    if (ef.ok && rate * (rs.back() - rs.front()) > 2.0 && ef.r2 > 0.9) return gs.back() / rate;
    const auto pf = fitting::power_fit(rs, gs);
    if (pf.ok && pf.r2 >= 0.8 && pf.slope < -1.0)
        return gs.back() * rs.back() / (-pf.slope - 1.0);
    throw std::runtime_error("obstruction: integrand tail beyond the grid is unresolved");
}

} // namespace detail

/// Energy at r read off an interpolated profile.
inline EnergyRecord energy(const Parameters& P, const PhiProfile& ph, double r) {
    const detail::PhiInterp f(ph);
    f.require(r, "energy");
    return energy(P, r, f.phi(r), f.dphi(r));
}

/// Evaluate both sides of the weighted identity over [a, b] on an
/// interpolated profile.  The bulk potential term is never integrated: its
/// coefficient vanishes identically at beta = alpha p/(p-2).
inline IdentityReport identity_residual(const Parameters& P, const PhiProfile& ph, double a,
                                        double b) {
    P.validate();
    if (!(a > 0.0 && a < b)) throw std::domain_error("identity_residual: 0 < a < b required");
    const detail::PhiInterp f(ph);
    f.require(a, "identity_residual");
    f.require(b, "identity_residual");
    const auto d = derive_constants(P);

    const double i1 = detail::refine(
        [&](double r) {
            const double dp = f.dphi(r);
            return std::pow(r, d.beta - 1.0) * dp * dp;
        },
        a, b);
    const double i2 = detail::refine(
        [&](double r) {
            const double ph_ = f.phi(r);
            return std::pow(r, d.beta - 3.0) * ph_ * ph_;
        },
        a, b);

    IdentityReport rep;
    rep.a = a;
    rep.b = b;
    rep.lhs = d.gamma1 * i1 + d.gamma2 * i2;
    rep.rhs = boundary_term(P, b, f.phi(b), f.dphi(b)) -
              boundary_term(P, a, f.phi(a), f.dphi(a));
    rep.residual = rep.lhs - rep.rhs;
    return rep;
}

/// Identity tail on [a, infinity) against F(a).  Requires 0 < alpha < 2 and
/// 2N/(N-alpha) < p <= 2(2N-2+alpha)/(2N-2-alpha) so that gamma1 >= 0 and
/// gamma2 > 0 make the tail one-signed.  The b -> infinity limit is taken as
/// zero only after the boundary terms decrease in magnitude across the three
/// largest grid decades; integrals beyond the grid are extrapolated from the
/// fitted decay of the integrands.
inline ObstructionReport obstruction(const Parameters& P, const PhiProfile& ph, double a) {
    P.validate();
    const auto d = derive_constants(P);
    if (!(P.alpha < 2.0) || !(P.power > d.two_alpha) ||
        !(P.power <= d.two_alpha_star * (1.0 + 1e-12)))
        throw std::domain_error(
            "obstruction: needs 0 < alpha < 2 and 2N/(N-alpha) < p <= 2(2N-2+alpha)/(2N-2-alpha)");

    const detail::PhiInterp f(ph);
    f.require(a, "obstruction");
    const double rb = ph.r.back();
    if (!(rb / 100.0 >= ph.r.front()))
        throw std::domain_error("obstruction: profile must span at least two decades");

    double prev = std::numeric_limits<double>::infinity();
    for (double rg : {rb / 100.0, rb / 10.0, rb}) {
        const double mag = std::abs(boundary_term(P, rg, f.phi(rg), f.dphi(rg)));
        if (!(mag <= prev))
            throw std::runtime_error(
                "obstruction: boundary terms do not decay over the outer grid decades");
        prev = mag;
    }

    const double i1 = detail::refine(
                          [&](double r) {
                              const double dp = f.dphi(r);
                              return std::pow(r, d.beta - 1.0) * dp * dp;
                          },
                          a, rb) +
                      detail::tail_remainder(ph.r, ph.dphi, d.beta - 1.0);
    const double i2 = detail::refine(
                          [&](double r) {
                              const double ph_ = f.phi(r);
                              return std::pow(r, d.beta - 3.0) * ph_ * ph_;
                          },
                          a, rb) +
                      detail::tail_remainder(ph.r, ph.phi, d.beta - 3.0);

    ObstructionReport rep;
    rep.lhs_tail = d.gamma1 * i1 + d.gamma2 * i2;
    rep.F_a = origin_functional(P, a, f.phi(a), f.dphi(a));
    rep.contradiction_margin = rep.lhs_tail - rep.F_a;
    return rep;
}

} // namespace radpot::pohozaev

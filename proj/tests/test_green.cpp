#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "radpot/green.hpp"

using Catch::Approx;
using namespace radpot;

namespace {

Parameters params(double p) { return Parameters{3, 1.0, 1.0, p}; }

std::vector<double> pinned_log_grid(double lo, double hi, std::size_t n,
                                    const std::vector<double>& pins) {
    auto t = make_log_grid(lo, hi, n);
    for (double pin : pins) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < t.size(); ++i)
            if (std::abs(t[i] - pin) < std::abs(t[best] - pin)) best = i;
        t[best] = pin;
    }
    return t;
}

std::size_t index_of(const std::vector<double>& t, double val) {
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] == val) return i;
    throw std::logic_error("pin not on grid");
}

} // namespace

TEST_CASE("general solution reproduces the homogeneous branches") {
    const auto P = params(4.0);
    const double nu = derive_constants(P).nu;
    green::GeneralSolutionSpec hom;

    hom.c1 = 1.0;
    for (double t : {0.05, 0.7, 1.0, 4.0, 25.0}) {
        const double want = std::pow(t, -nu) * bessel::eval_i(nu, t);
        CHECK(green::general_solution(P, hom, t) == Approx(want).epsilon(1e-13));
    }

    hom.c1 = 0.0;
    hom.c2 = 1.0;
    for (double t : {0.05, 0.7, 1.0, 4.0, 25.0}) {
        const double want = std::pow(t, -nu) * bessel::eval_k(nu, t);
        CHECK(green::general_solution(P, hom, t) == Approx(want).epsilon(1e-13));
    }

    green::GeneralSolutionSpec mix;
    mix.c1 = 0.8;
    mix.c2 = -2.5;
    const double t = 3.0;
    const double want = std::pow(t, -nu) * (0.8 * bessel::eval_i(nu, t) - 2.5 * bessel::eval_k(nu, t));
    CHECK(green::general_solution(P, mix, t) == Approx(want).epsilon(1e-13));
}

TEST_CASE("general solution with unit forcing recovers the constant solution") {
    // with c1 = K_{nu+1}(1) and c2 = I_{nu+1}(1) the basepoint-1 integrals
    // telescope through the Wronskian pair and the solution is exactly 1
    const auto P = params(4.0);
    const double nu = derive_constants(P).nu;
    const auto tg = make_log_grid(0.02, 40.0, 400);
    green::GeneralSolutionSpec spec;
    spec.c1 = bessel::eval_k(nu + 1.0, 1.0);
    spec.c2 = bessel::eval_i(nu + 1.0, 1.0);
    spec.t = tg;
    spec.g.assign(tg.size(), 1.0);
    for (double t : {0.05, 0.3, 1.0, 2.0, 8.0})
        CHECK(green::general_solution(P, spec, t) == Approx(1.0).epsilon(1e-9));
    // far out the bounded branch is exponentially ill-conditioned in c1:
    // perturbing c1 by eps changes v(t) by eps t^{-nu} I_nu(t), so double
    // rounding of c1 alone already costs ~3e-6 here
    CHECK(green::general_solution(P, spec, 30.0) == Approx(1.0).epsilon(1e-4));
}

TEST_CASE("general solution satisfies the forced equation") {
    const auto P = params(4.0);
    const double nu = derive_constants(P).nu;
    const auto tg = make_log_grid(0.02, 40.0, 500);
    green::GeneralSolutionSpec spec;
    spec.c1 = 0.4;
    spec.c2 = 0.1;
    spec.t = tg;
    spec.g.resize(tg.size());
    for (std::size_t i = 0; i < tg.size(); ++i) spec.g[i] = tg[i] * tg[i];

    const auto xs = make_log_grid(0.1, 5.0, 301);
    std::vector<double> x(xs.size()), v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        x[i] = std::log(xs[i]);
        v[i] = green::general_solution(P, spec, xs[i]);
    }
    const auto vx = fd::derivative(x, v, 1);
    const auto vxx = fd::derivative(x, v, 2);
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < xs.size(); ++i) {
        const double t2 = xs[i] * xs[i];
        const double lhs = -(vxx[i] + 2.0 * nu * vx[i]) / t2 + v[i];
        worst = std::max(worst, std::abs(lhs - t2));
    }
    CHECK(worst < 1e-5 * 25.0);
}

TEST_CASE("general solution argument errors") {
    const auto P = params(4.0);
    green::GeneralSolutionSpec hom;
    hom.c1 = 1.0;
    CHECK_THROWS_AS(green::general_solution(P, hom, 0.0), std::domain_error);
    CHECK_THROWS_AS(green::general_solution(P, hom, -1.0), std::domain_error);
    CHECK_THROWS_AS(green::general_solution(P, hom, 601.0), std::overflow_error);
    CHECK_THROWS_AS(green::general_solution(Parameters{3, 1.0, 2.5, 4.0}, hom, 1.0),
                    std::domain_error);

    green::GeneralSolutionSpec bad;
    bad.t = {0.5, 1.0, 2.0, 3.0, 4.0};
    bad.g = {1.0, 1.0, std::nan(""), 1.0, 1.0};
    CHECK_THROWS_AS(green::general_solution(P, bad, 2.0), std::domain_error);

    green::GeneralSolutionSpec narrow;
    narrow.t = make_log_grid(0.5, 2.0, 50);
    narrow.g.assign(50, 1.0);
    CHECK_THROWS_AS(green::general_solution(P, narrow, 5.0), std::runtime_error);
}

TEST_CASE("integral operator matches quadrature references on a decaying power input") {
    const std::vector<double> pins = {0.5, 2.0, 10.0};
    const auto t = pinned_log_grid(1e-5, 80.0, 601, pins);
    const auto vin = sample_profile(t, [](double s) { return 1.0 / s; });

    struct Row { double p, t, want; };
    const Row rows[] = {
        {4.0, 0.5, 0.16018362264250616989},  {4.0, 2.0, 0.095794438149321896163},
        {4.0, 10.0, 0.024740768356465496651},
        {5.0, 0.5, 0.17177943999834955315},  {5.0, 2.0, 0.045016764772934696589},
        {5.0, 10.0, 0.0024995337806636543604},
        {5.5, 0.5, 0.22030726036675904513},  {5.5, 2.0, 0.034185951404942047268},
        {5.5, 10.0, 0.00080176838607203074367},
    };
    double prev_p = 0.0;
    VProfile out;
    for (const auto& row : rows) {
        if (row.p != prev_p) {
            out = green::apply_operator(params(row.p), vin);
            prev_p = row.p;
        }
        CHECK(out.v[index_of(t, row.t)] == Approx(row.want).epsilon(1e-7));
    }
}

TEST_CASE("integral operator image satisfies the inhomogeneous equation") {
    const auto P = params(4.0);
    const auto d = derive_constants(P);
    const auto t = make_log_grid(1e-5, 80.0, 601);
    const auto vin = sample_profile(t, [](double s) { return 1.0 / s; });
    const auto out = green::apply_operator(P, vin);

    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::log(t[i]);
    const auto vx = fd::derivative(x, out.v, 1);
    const auto vxx = fd::derivative(x, out.v, 2);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 2; i + 2 < t.size(); ++i) {
        if (t[i] < 1e-3 || t[i] > 30.0) continue;
        const double t2 = t[i] * t[i];
        const double lhs = -(vxx[i] + 2.0 * d.nu * vx[i]) / t2 + out.v[i];
        const double rhs = d.b_const * std::pow(t[i], d.forcing_exponent) *
                           std::pow(vin.v[i], P.power - 1.0);
        worst = std::max(worst, std::abs(lhs - rhs));
        scale = std::max(scale, std::abs(rhs));
    }
    CHECK(worst < 1e-6 * scale);
}

TEST_CASE("integral operator structural properties") {
    const auto P = params(4.0);
    const auto t = make_log_grid(1e-4, 60.0, 401);

    SECTION("zero maps to zero") {
        VProfile z;
        z.t = t;
        z.v.assign(t.size(), 0.0);
        z.dv.assign(t.size(), 0.0);
        const auto out = green::apply_operator(P, z);
        for (double v : out.v) CHECK(v == 0.0);
    }

    SECTION("positivity") {
        const auto vin = sample_profile(t, [](double s) { return std::exp(-s); });
        const auto out = green::apply_operator(P, vin);
        for (double v : out.v) CHECK(v > 0.0);
    }

    SECTION("homogeneity of degree p-1") {
        const auto vin = sample_profile(t, [](double s) { return 1.0 / s; });
        auto half = vin;
        for (double& v : half.v) v *= 0.5;
        const auto a = green::apply_operator(P, vin);
        const auto b = green::apply_operator(P, half);
        const double factor = std::pow(0.5, P.power - 1.0);
        for (std::size_t i = 0; i < t.size(); ++i)
            CHECK(b.v[i] == Approx(factor * a.v[i]).epsilon(1e-12));
    }

    SECTION("monotone in the input") {
        const auto lo = sample_profile(t, [](double s) { return std::exp(-s); });
        const auto hi = sample_profile(t, [](double s) { return std::exp(-s) + 0.3 / (1.0 + s); });
        const auto a = green::apply_operator(P, lo);
        const auto b = green::apply_operator(P, hi);
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(b.v[i] >= a.v[i]);
    }

    SECTION("stable under grid refinement") {
        const auto coarse_t = make_log_grid(1e-5, 80.0, 301);
        const auto fine_t = make_log_grid(1e-5, 80.0, 601);
        const auto a = green::apply_operator(P, sample_profile(coarse_t, [](double s) { return 1.0 / s; }));
        const auto b = green::apply_operator(P, sample_profile(fine_t, [](double s) { return 1.0 / s; }));
        const ProfileInterp bi(b.t, b.v);
        double worst = 0.0;
        for (std::size_t i = 0; i < coarse_t.size(); ++i) {
            if (coarse_t[i] < 1e-3 || coarse_t[i] > 50.0) continue;
            worst = std::max(worst, std::abs(a.v[i] - bi(coarse_t[i])) / bi(coarse_t[i]));
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("integral operator input gates") {
    const auto t = make_log_grid(1e-4, 60.0, 301);

    SECTION("negative samples rejected") {
        auto vin = sample_profile(t, [](double s) { return std::exp(-s); });
        vin.v[10] = -1e-3;
        CHECK_THROWS_AS(green::apply_operator(params(4.0), vin), std::domain_error);
    }

    SECTION("non-decaying right end rejected") {
        const auto vin = sample_profile(t, [](double s) { return 1.0 + s; });
        CHECK_THROWS_AS(green::apply_operator(params(4.0), vin), std::domain_error);
    }

    SECTION("grid too small") {
        VProfile vin;
        vin.t = {0.1, 0.3, 0.5, 1.0};
        vin.v = {1.0, 0.8, 0.6, 0.3};
        vin.dv = {0.0, 0.0, 0.0, 0.0};
        CHECK_THROWS_AS(green::apply_operator(params(4.0), vin), std::domain_error);
    }

    SECTION("non-integrable head rejected") {
        // v = 1/t with p = 7.5 puts the inner integrand at s^{-1.5} near zero
        const auto vin = sample_profile(t, [](double s) { return 1.0 / s; });
        CHECK_THROWS_AS(green::apply_operator(params(7.5), vin), std::runtime_error);
    }

    SECTION("no half-line form") {
        const auto vin = sample_profile(t, [](double s) { return std::exp(-s); });
        CHECK_THROWS_AS(green::apply_operator(Parameters{3, 1.0, 2.0, 4.0}, vin),
                        std::domain_error);
    }
}

TEST_CASE("fixed point iteration finds the decaying ground profile") {
    const auto P = params(4.0);
    const auto t = make_log_grid(1e-4, 60.0, 961);
    const auto init = sample_profile(t, [](double s) { return std::exp(-s); });

    const auto res = green::fixed_point_solve(P, init);
    REQUIRE(res.status == green::FixedPointStatus::Converged);
    CHECK(res.converged);
    CHECK_FALSE(res.trivial);
    CHECK(res.residual_sup <= 1e-8);
    CHECK(res.ode_residual <= 1e-6);
    CHECK(res.iterations <= 500);

    // the returned profile is a genuine fixed point of the operator
    const auto img = green::apply_operator(P, res.profile);
    double r = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        r = std::max(r, std::abs(img.v[i] - res.profile.v[i]));
    CHECK(r <= 2e-8);

    // positive, bounded at the left end, decaying at the right end
    for (double v : res.profile.v) CHECK(v > 0.0);
    CHECK(res.profile.v.front() < 10.0 * res.profile.v[t.size() / 4]);
    CHECK(res.profile.v.back() < 1e-10 * res.profile.v.front());
}

TEST_CASE("fixed point iteration reports the trivial point for zero init") {
    const auto P = params(4.0);
    const auto t = make_log_grid(1e-4, 60.0, 201);
    VProfile z;
    z.t = t;
    z.v.assign(t.size(), 0.0);
    z.dv.assign(t.size(), 0.0);
    const auto res = green::fixed_point_solve(P, z);
    CHECK(res.trivial);
    CHECK(res.converged);
    CHECK(res.residual_sup == 0.0);
}

TEST_CASE("fixed point iteration input gates") {
    const auto t = make_log_grid(1e-4, 60.0, 201);
    const auto init = sample_profile(t, [](double s) { return std::exp(-s); });
    CHECK_THROWS_AS(green::fixed_point_solve(params(2.5), init), std::domain_error);
    CHECK_THROWS_AS(green::fixed_point_solve(params(6.5), init), std::domain_error);
    auto neg = init;
    neg.v[3] = -1.0;
    CHECK_THROWS_AS(green::fixed_point_solve(params(4.0), neg), std::domain_error);
}

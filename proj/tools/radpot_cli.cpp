#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "radpot/asymptotics.hpp"
#include "radpot/bessel.hpp"
#include "radpot/green.hpp"
#include "radpot/params.hpp"
#include "radpot/pohozaev.hpp"
#include "radpot/profile.hpp"
#include "radpot/region.hpp"
#include "radpot/shooting.hpp"
#include "radpot/transform.hpp"

using nlohmann::json;
using namespace radpot;

namespace {

constexpr const char* kToolVersion = "0.1.0";

Parameters read_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    json j;
    in >> j;
    Parameters P;
    P.dim = j.at("N").get<int>();
    P.amplitude = j.at("A").get<double>();
    P.alpha = j.at("alpha").get<double>();
    P.power = j.at("p").get<double>();
    P.validate();
    return P;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
}

const char* classification_name(shooting::Classification c) {
    switch (c) {
        case shooting::Classification::Crossing: return "Crossing";
        case shooting::Classification::Growing: return "Growing";
        case shooting::Classification::Decaying: return "Decaying";
        case shooting::Classification::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

const char* status_name(green::FixedPointStatus s) {
    switch (s) {
        case green::FixedPointStatus::Converged: return "Converged";
        case green::FixedPointStatus::MaxIterations: return "MaxIterations";
        case green::FixedPointStatus::Diverged: return "Diverged";
    }
    return "Diverged";
}

const char* origin_case_name(asymptotics::OriginCase c) {
    switch (c) {
        case asymptotics::OriginCase::Bounded: return "bounded";
        case asymptotics::OriginCase::Logarithmic: return "logarithmic";
        case asymptotics::OriginCase::Power: return "power";
    }
    return "bounded";
}

struct Range {
    double lo = 0.0, hi = 0.0;
    std::size_t cells = 0;
};

// "lo:hi:step" with step > 0; the cell count rounds (hi - lo)/step
Range parse_range(const std::string& s) {
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::runtime_error("range must look like lo:hi:step, got '" + s + "'");
    Range r;
    r.lo = std::stod(s.substr(0, c1));
    r.hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(s.substr(c2 + 1));
    if (!(step > 0.0 && r.hi > r.lo))
        throw std::runtime_error("range needs hi > lo and step > 0: '" + s + "'");
    r.cells = static_cast<std::size_t>(std::llround((r.hi - r.lo) / step));
    if (r.cells == 0) r.cells = 1;
    return r;
}

std::pair<double, double> parse_pair(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw std::runtime_error("expected two comma-separated values, got '" + s + "'");
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

json scan_summary(const region::RegionMap& map, const region::ScanSpec& spec) {
    std::map<std::string, int> classes, sources, evidence;
    int timed_out = 0;
    for (std::size_t i = 0; i < map.cells.size(); ++i) {
        for (std::size_t j = 0; j < map.cells[i].size(); ++j) {
            ++classes[region::kind_name(map.cells[i][j].kind)];
            ++sources[region::source_name(map.cells[i][j].source)];
            if (!map.evidence.empty()) {
                const auto st = map.evidence[i][j].status;
                ++evidence[region::status_name(st)];
                if (st == region::EvidenceStatus::TimedOut) ++timed_out;
            }
        }
    }
    json out = {
        {"tool", "radpot"},
        {"version", kToolVersion},
        {"dim", spec.dim},
        {"alpha", {{"lo", spec.alpha_lo}, {"hi", spec.alpha_hi}, {"cells", spec.alpha_cells}}},
        {"p", {{"lo", spec.p_lo}, {"hi", spec.p_hi}, {"cells", spec.p_cells}}},
        {"with_numerics", spec.with_numerics},
        {"cell_seconds", spec.cell_seconds},
        {"classes", classes},
        {"sources", sources},
        {"timed_out", timed_out},
    };
    if (!map.evidence.empty()) out["evidence"] = evidence;
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial zero-mass solver toolkit"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    int rc = 0;

    // bessel-eval
    double b_nu = 0.0, b_t = 0.0;
    bool b_scaled = false;
    auto* bes = app.add_subcommand("bessel-eval", "evaluate the modified kernel pair I, K");
    bes->add_option("--nu", b_nu, "order, nu >= 0")->required();
    bes->add_option("--t", b_t, "argument, t > 0")->required();
    bes->add_flag("--scaled", b_scaled, "emit e^{-t} I and e^{t} K");
    bes->callback([&] {
        const auto e = bessel::eval(b_nu, b_t, b_scaled);
        const json out = {
            {"nu", e.nu},
            {"t", e.t},
            {"I", e.i_value},
            {"K", e.k_value},
            {"regime",
             e.regime == bessel::BesselRegime::SeriesRegion ? "series" : "asymptotic"},
            {"scaled", b_scaled},
        };
        std::cout << out.dump(2) << "\n";
    });

    // solve
    std::string s_params, s_init = "builtin:expdecay", s_out = "solution.csv";
    std::string s_grid = "1e-4:60:961";
    double s_tol = 1e-8, s_damping = 0.5;
    int s_max_iter = 500;
    auto* sol = app.add_subcommand("solve", "run the damped operator iteration to a fixed point");
    sol->add_option("--params", s_params, "JSON file with N, A, alpha, p")->required();
    sol->add_option("--init", s_init, "starting profile CSV, or builtin:expdecay");
    sol->add_option("--grid", s_grid, "log grid lo:hi:n for builtin starts");
    sol->add_option("--tol", s_tol, "sup-norm update tolerance");
    sol->add_option("--max-iter", s_max_iter, "iteration cap");
    sol->add_option("--damping", s_damping, "update weight in (0, 1]");
    sol->add_option("--out", s_out, "output profile CSV");
    sol->callback([&] {
        const auto P = read_params(s_params);
        VProfile init;
        if (s_init.rfind("builtin:", 0) == 0) {
            if (s_init != "builtin:expdecay")
                throw std::runtime_error("unknown builtin start: " + s_init);
            const auto c1 = s_grid.find(':'), c2 = s_grid.rfind(':');
            if (c1 == std::string::npos || c2 == c1)
                throw std::runtime_error("grid must look like lo:hi:n");
            const auto grid = make_log_grid(std::stod(s_grid.substr(0, c1)),
                                            std::stod(s_grid.substr(c1 + 1, c2 - c1 - 1)),
                                            std::stoul(s_grid.substr(c2 + 1)));
            init = sample_profile(grid, [](double t) { return std::exp(-t); });
        } else {
            init = read_v_profile_csv(s_init);
        }
        green::FixedPointOptions opts;
        opts.max_iter = s_max_iter;
        opts.tol = s_tol;
        opts.damping = s_damping;
        const auto res = green::fixed_point_solve(P, init, opts);
        write_v_profile_csv(s_out, res.profile);
        const json out = {
            {"status", status_name(res.status)},
            {"converged", res.converged},
            {"iterations", res.iterations},
            {"residual_sup", res.residual_sup},
            {"ode_residual", res.ode_residual},
            {"trivial", res.trivial},
            {"profile_csv", s_out},
        };
        std::cout << out.dump(2) << "\n";
        if (!res.converged) rc = 1;
    });

    // shoot
    std::string sh_params, sh_out = "trajectory.csv", sh_bracket;
    double sh_v0 = 0.0, sh_tlo = 1e-4, sh_thi = 40.0;
    auto* sho = app.add_subcommand("shoot", "integrate the origin-regular branch from v(0) = v0");
    sho->add_option("--params", sh_params, "JSON file with N, A, alpha, p")->required();
    auto* opt_v0 = sho->add_option("--v0", sh_v0, "single starting value");
    auto* opt_br = sho->add_option("--bracket", sh_bracket, "a,b bisection bracket");
    opt_v0->excludes(opt_br);
    sho->add_option("--t-lo", sh_tlo, "start of the integration span");
    sho->add_option("--t-hi", sh_thi, "end of the integration span");
    sho->add_option("--out", sh_out, "output trajectory CSV");
    sho->callback([&] {
        const auto P = read_params(sh_params);
        const shooting::TSpan span{sh_tlo, sh_thi};
        if (opt_v0->count() == 0 && opt_br->count() == 0)
            throw std::runtime_error("shoot needs --v0 or --bracket");
        if (opt_br->count() > 0) {
            const auto [a, b] = parse_pair(sh_bracket);
            const auto g = shooting::find_ground_state(P, {a, b}, span);
            json out = {{"mode", "bracket"}, {"bracket", {a, b}}, {"found", g.has_value()}};
            if (g) {
                write_v_profile_csv(sh_out, *g);
                out["classification"] = "Decaying";
                out["profile_csv"] = sh_out;
                out["v0"] = g->v.front();
            }
            std::cout << out.dump(2) << "\n";
            if (!g) rc = 1;
            return;
        }
        const auto tr = shooting::integrate_v(P, sh_v0, span);
        write_v_profile_csv(sh_out, tr.profile);
        json out = {
            {"mode", "single"},
            {"v0", sh_v0},
            {"classification", classification_name(tr.classification)},
            {"diagnostic", tr.diagnostic},
            {"profile_csv", sh_out},
        };
        if (tr.event_t) out["event_t"] = *tr.event_t;
        std::cout << out.dump(2) << "\n";
    });

    // verify-asymptotics
    std::string va_params, va_profile;
    double va_tol = 0.05;
    auto* ver = app.add_subcommand("verify-asymptotics",
                                   "compare a profile's origin behavior with the prediction");
    ver->add_option("--params", va_params, "JSON file with N, A, alpha, p")->required();
    ver->add_option("--profile", va_profile, "profile CSV with columns t,v,dv")->required();
    ver->add_option("--exponent-tol", va_tol, "allowed exponent mismatch");
    ver->callback([&] {
        const auto P = read_params(va_params);
        const auto vp = read_v_profile_csv(va_profile);
        const auto pred = asymptotics::predicted_origin_behavior(P);
        const auto fit = asymptotics::fit_origin_behavior(vp);
        const auto d = derive_constants(P);

        json predicted = {
            {"case", origin_case_name(pred.kind)},
            {"t_exponent", pred.t_exponent},
            {"r_exponent", pred.r_exponent},
        };
        json constants = {{"nu", d.nu}, {"two_star", d.two_star}};
        if (pred.c1) constants["c1"] = *pred.c1;
        if (pred.c2) constants["c2"] = *pred.c2;
        if (pred.c3) constants["c3"] = *pred.c3;

        json measured = {
            {"exponent", fit.exponent},
            {"band", fit.band},
            {"r2", fit.r2},
        };
        if (fit.kind) measured["case"] = origin_case_name(*fit.kind);
        if (fit.log_slope) measured["log_slope"] = *fit.log_slope;

        bool pass = fit.kind.has_value() && *fit.kind == pred.kind;
        if (pass && pred.kind == asymptotics::OriginCase::Power)
            pass = std::abs(fit.exponent - pred.t_exponent) <= va_tol;
        if (pass && pred.kind == asymptotics::OriginCase::Bounded)
            pass = std::abs(fit.exponent) <= va_tol;

        const json out = {
            {"predicted", predicted},
            {"measured", measured},
            {"constants", constants},
            {"pass", pass},
        };
        std::cout << out.dump(2) << "\n";
        if (!pass) rc = 1;
    });

    // pohozaev-check
    std::string pc_params, pc_profile;
    double pc_a = 0.0, pc_b = 0.0;
    auto* poh = app.add_subcommand("pohozaev-check",
                                   "weighted identity residual, or the obstruction margin");
    poh->add_option("--params", pc_params, "JSON file with N, A, alpha, p")->required();
    poh->add_option("--profile", pc_profile, "profile CSV with columns r,phi,dphi")->required();
    poh->add_option("--a", pc_a, "inner radius")->required();
    auto* opt_b = poh->add_option("--b", pc_b, "outer radius; omit to run the obstruction");
    poh->callback([&] {
        const auto P = read_params(pc_params);
        const auto ph = read_phi_profile_csv(pc_profile);
        if (opt_b->count() > 0) {
            const auto rep = pohozaev::identity_residual(P, ph, pc_a, pc_b);
            const double scale =
                std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-300});
            const json out = {
                {"mode", "identity"}, {"a", rep.a},
                {"b", rep.b},         {"lhs", rep.lhs},
                {"rhs", rep.rhs},     {"residual", rep.residual},
                {"normalized", std::abs(rep.residual) / scale},
            };
            std::cout << out.dump(2) << "\n";
            return;
        }
        const auto rep = pohozaev::obstruction(P, ph, pc_a);
        const json out = {
            {"mode", "obstruction"},
            {"a", pc_a},
            {"lhs_tail", rep.lhs_tail},
            {"F_a", rep.F_a},
            {"contradiction_margin", rep.contradiction_margin},
        };
        std::cout << out.dump(2) << "\n";
    });

    // region-map
    int rm_n = 3;
    std::string rm_alpha = "0:4:0.08", rm_p = "2:8:0.12";
    std::string rm_out = "map.csv", rm_svg, rm_config;
    bool rm_numerics = false, rm_strict = false;
    double rm_cell_seconds = 30.0;
    auto* reg = app.add_subcommand("region-map", "classify a grid of the (alpha, p) plane");
    auto* o_n = reg->add_option("--N", rm_n, "space dimension");
    auto* o_a = reg->add_option("--alpha", rm_alpha, "alpha range lo:hi:step");
    auto* o_p = reg->add_option("--p", rm_p, "p range lo:hi:step");
    auto* o_w = reg->add_flag("--with-numerics", rm_numerics, "corroborate each cell");
    auto* o_o = reg->add_option("--out", rm_out, "output CSV; a JSON sidecar lands next to it");
    auto* o_s = reg->add_option("--svg", rm_svg, "optional SVG output");
    auto* o_c = reg->add_option("--cell-seconds", rm_cell_seconds, "per-cell time budget");
    auto* o_t = reg->add_flag("--strict", rm_strict, "exit 2 when any cell times out");
    reg->add_option("--config", rm_config, "JSON config mirroring the flags");
    reg->callback([&] {
        if (!rm_config.empty()) {
            std::ifstream in(rm_config);
            if (!in) throw std::runtime_error("cannot open config file: " + rm_config);
            json cfg;
            in >> cfg;
            // explicit flags outrank the config file
            if (o_n->count() == 0 && cfg.contains("N")) rm_n = cfg["N"].get<int>();
            if (o_a->count() == 0 && cfg.contains("alpha"))
                rm_alpha = cfg["alpha"].get<std::string>();
            if (o_p->count() == 0 && cfg.contains("p")) rm_p = cfg["p"].get<std::string>();
            if (o_w->count() == 0 && cfg.contains("with_numerics"))
                rm_numerics = cfg["with_numerics"].get<bool>();
            if (o_o->count() == 0 && cfg.contains("out")) rm_out = cfg["out"].get<std::string>();
            if (o_s->count() == 0 && cfg.contains("svg")) rm_svg = cfg["svg"].get<std::string>();
            if (o_c->count() == 0 && cfg.contains("cell_seconds"))
                rm_cell_seconds = cfg["cell_seconds"].get<double>();
            if (o_t->count() == 0 && cfg.contains("strict"))
                rm_strict = cfg["strict"].get<bool>();
        }
        const Range ra = parse_range(rm_alpha), rp = parse_range(rm_p);
        region::ScanSpec spec;
        spec.dim = rm_n;
        spec.alpha_lo = ra.lo;
        spec.alpha_hi = ra.hi;
        spec.p_lo = rp.lo;
        spec.p_hi = rp.hi;
        spec.alpha_cells = ra.cells;
        spec.p_cells = rp.cells;
        spec.with_numerics = rm_numerics;
        spec.cell_seconds = rm_cell_seconds;
        const auto map = region::scan_grid(spec);
        const auto art = region::render_map(map);
        write_text(rm_out, art.csv);
        if (!rm_svg.empty()) write_text(rm_svg, art.svg);

        json summary = scan_summary(map, spec);
        summary["out"] = rm_out;
        if (!rm_svg.empty()) summary["svg"] = rm_svg;
        write_text(rm_out + ".json", summary.dump(2) + "\n");
        std::cout << summary.dump(2) << "\n";
        if (rm_strict && summary["timed_out"].get<int>() > 0) rc = 2;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "radpot: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

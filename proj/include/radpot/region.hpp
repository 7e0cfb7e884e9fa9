#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "radpot/green.hpp"
#include "radpot/params.hpp"
#include "radpot/pohozaev.hpp"
#include "radpot/profile.hpp"
#include "radpot/shooting.hpp"
#include "radpot/transform.hpp"

namespace radpot::region {

/// Verdict for one (alpha, p) pair.  The plane splits along the exponents
/// 2* = 2N/(N-2), 2_a = 2N/(N-alpha) and 2_a* = 2(2N-2+alpha)/(2N-2-alpha).
enum class RegionKind {
    Nonexistence,        ///< no positive solution at all
    RadialNonexistence,  ///< no radial solution in the weighted energy space
    ExistenceRadial,     ///< a radial solution exists
    ExistenceExplicit,   ///< the closed-form family at the crossing point
    Open,                ///< no statement applies
};

/// Mechanism that decides the class.
enum class RegionSource {
    CriticalLine,      ///< the lines alpha = 2 and p = 2N/(N-2), and their crossing
    CriticalMismatch,  ///< supercritical p with weak singularity, or the reverse
    HardyBand,         ///< p on the wrong side of 2N/(N-alpha)
    WeightedEmbedding, ///< existence via the compact weighted embedding
    ObstructionBand,   ///< the sign obstruction band 2N/(N-alpha) < p <= 2_a*
    Boundary,          ///< assigned by the closed-edge conventions on a curve
    Unattributed,      ///< open cells carry no mechanism
};

struct RegionClass {
    RegionKind kind = RegionKind::Open;
    RegionSource source = RegionSource::Unattributed;
    std::optional<std::string> boundary_note;
};

inline const char* kind_name(RegionKind k) {
    switch (k) {
        case RegionKind::Nonexistence: return "Nonexistence";
        case RegionKind::RadialNonexistence: return "RadialNonexistence";
        case RegionKind::ExistenceRadial: return "ExistenceRadial";
        case RegionKind::ExistenceExplicit: return "ExistenceExplicit";
        case RegionKind::Open: return "Open";
    }
    return "Open";
}

inline const char* source_name(RegionSource s) {
    switch (s) {
        case RegionSource::CriticalLine: return "CriticalLine";
        case RegionSource::CriticalMismatch: return "CriticalMismatch";
        case RegionSource::HardyBand: return "HardyBand";
        case RegionSource::WeightedEmbedding: return "WeightedEmbedding";
        case RegionSource::ObstructionBand: return "ObstructionBand";
        case RegionSource::Boundary: return "Boundary";
        case RegionSource::Unattributed: return "Unattributed";
    }
    return "Unattributed";
}

/// Total, deterministic classification of (N, alpha, p), p > 2, alpha > 0.
/// Boundary lines resolve by fixed precedence: the explicit crossing point,
/// then the lines alpha = 2, p = 2*, p = 2_a, then the closed band edge
/// p = 2_a*, then the open-inequality interiors, then Open.  Comparisons are
/// exact when T is rational; with doubles a pair sits on a line only when
/// both sides round identically.
template <class T>
RegionClass classify(int N, const T& alpha, const T& p) {
    static_assert(std::is_floating_point_v<T> || std::is_same_v<T, Rat>,
                  "classify wants floating point or exact rational inputs");
    if (N < 3) throw std::domain_error("classify: N >= 3 required");
    if (!(alpha > 0)) throw std::domain_error("classify: alpha > 0 required");
    if (!(p > 2)) throw std::domain_error("classify: p > 2 required");

    using K = RegionKind;
    using S = RegionSource;
    auto note = [](const char* s) { return std::optional<std::string>(s); };

    const T two_star = T(2 * N) / T(N - 2);
    if (alpha == 2) {
        if (p == two_star)
            return {K::ExistenceExplicit, S::CriticalLine, note("crossing alpha = 2, p = 2N/(N-2)")};
        return {K::Nonexistence, S::CriticalLine, note("on the line alpha = 2")};
    }
    if (p == two_star)
        return {K::Nonexistence, S::CriticalLine, note("on the line p = 2N/(N-2)")};

    if (alpha < N) {
        const T two_a = T(2 * N) / (T(N) - alpha);
        if (p == two_a)
            return {K::Nonexistence, S::Boundary, note("on the line p = 2N/(N-alpha)")};
        if (alpha < 2) {
            if (p < two_a) return {K::Nonexistence, S::HardyBand, {}};
            const T two_as = T(2) * (T(2 * N - 2) + alpha) / (T(2 * N - 2) - alpha);
            if (p == two_as)
                return {K::RadialNonexistence, S::Boundary,
                        note("on the line p = 2(2N-2+alpha)/(2N-2-alpha)")};
            if (p < two_as) return {K::RadialNonexistence, S::ObstructionBand, {}};
            if (p < two_star) return {K::ExistenceRadial, S::WeightedEmbedding, {}};
            return {K::Nonexistence, S::CriticalMismatch, {}};
        }
        // 2 < alpha < N
        if (p < two_star) return {K::Nonexistence, S::CriticalMismatch, {}};
        if (p > two_a) return {K::Nonexistence, S::HardyBand, {}};
        const T two_as = T(2) * (T(2 * N - 2) + alpha) / (T(2 * N - 2) - alpha);
        if (p < two_as) return {K::ExistenceRadial, S::WeightedEmbedding, {}};
        return {K::Open, S::Unattributed, {}};
    }

    // alpha >= N (> 2): only the subcritical statement and the embedding apply
    if (p < two_star) return {K::Nonexistence, S::CriticalMismatch, {}};
    if (alpha < T(2 * N - 2)) {
        const T two_as = T(2) * (T(2 * N - 2) + alpha) / (T(2 * N - 2) - alpha);
        if (p < two_as) return {K::ExistenceRadial, S::WeightedEmbedding, {}};
    }
    return {K::Open, S::Unattributed, {}};
}

/// The three critical exponents at one alpha; the optional entries are left
/// empty at and beyond their poles (alpha >= N, alpha >= 2N-2).
struct CriticalCurves {
    double two_star = 0.0;
    std::optional<double> two_alpha, two_alpha_star;
};

inline CriticalCurves critical_curves(int N, double alpha) {
    if (N < 3) throw std::domain_error("critical_curves: N >= 3 required");
    if (!(alpha > 0.0)) throw std::domain_error("critical_curves: alpha > 0 required");
    CriticalCurves c;
    c.two_star = 2.0 * N / (N - 2.0);
    if (alpha < static_cast<double>(N)) c.two_alpha = 2.0 * N / (N - alpha);
    if (alpha < 2.0 * N - 2.0)
        c.two_alpha_star = 2.0 * (2.0 * N - 2.0 + alpha) / (2.0 * N - 2.0 - alpha);
    return c;
}

/// Outcome of the numerical corroboration of one cell.
enum class EvidenceStatus { Skipped, Supports, Contradicts, Inconclusive, TimedOut };

inline const char* status_name(EvidenceStatus s) {
    switch (s) {
        case EvidenceStatus::Skipped: return "Skipped";
        case EvidenceStatus::Supports: return "Supports";
        case EvidenceStatus::Contradicts: return "Contradicts";
        case EvidenceStatus::Inconclusive: return "Inconclusive";
        case EvidenceStatus::TimedOut: return "TimedOut";
    }
    return "Skipped";
}

/// One candidate profile run through the named solution checks.
struct CandidateReport {
    std::string source;
    std::vector<std::string> failed_checks;
    bool checks_complete = false;

    bool passes() const { return checks_complete && failed_checks.empty(); }
};

struct CellEvidence {
    EvidenceStatus status = EvidenceStatus::Skipped;
    std::vector<CandidateReport> candidates;
    double seconds = 0.0;
};

/// Run the named solution checks on a candidate: strict positivity (a
/// recorded zero crossing fails it outright), membership in the weighted
/// gradient space, membership in L^p(r^{N-1} dr), and closure of the weighted
/// identity on a mid-range window.  checks_complete drops when the identity
/// window is unusable, so an unchecked candidate never counts as passing.
inline CandidateReport check_candidate(const Parameters& P, const VProfile& vp,
                                       std::string source, bool crossed_zero) {
    CandidateReport rep;
    rep.source = std::move(source);
    bool positive = !crossed_zero;
    for (double x : vp.v) positive = positive && x > 0.0;
    if (!positive) rep.failed_checks.push_back("positivity");
    try {
        const auto mem = transform::membership_report(P, vp);
        if (!(mem.in_weighted_l2 && mem.in_grad_l2))
            rep.failed_checks.push_back("weighted-membership");
        if (!mem.in_lp) rep.failed_checks.push_back("lp-membership");
        const auto ph = transform::phi_from_v(P, vp);
        const double a = std::max(0.1, 1.1 * ph.r.front());
        const double b = std::min(10.0, 0.9 * ph.r.back());
        if (a < b) {
            const auto idr = pohozaev::identity_residual(P, ph, a, b);
            const double scale = std::max({std::abs(idr.lhs), std::abs(idr.rhs), 1e-12});
            if (!(std::abs(idr.residual) <= 1e-5 * scale))
                rep.failed_checks.push_back("identity-residual");
            rep.checks_complete = true;
        }
    } catch (const std::exception&) {
        rep.checks_complete = false;
    }
    return rep;
}

namespace detail {

inline std::string format_number(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

} // namespace detail

/// Numerical corroboration of one cell's class at the A = 1 representative
/// (the class itself is amplitude-free).  Candidate sources, cheapest first:
/// the shooting separatrix, plain trajectories when no separatrix emerges,
/// and the operator iterate inside its admissible band.  Evidence never
/// overrides the analytic class; it only records agreement.
inline CellEvidence evidence_for_cell(const Parameters& P, RegionKind kind,
                                      double budget_seconds) {
    CellEvidence ev;
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    auto finish = [&](EvidenceStatus s) {
        ev.status = s;
        ev.seconds = elapsed();
        return ev;
    };

    // the transform-based machinery lives on alpha < 2; open cells have no
    // claim to corroborate
    if (kind == RegionKind::Open || !(P.alpha < 2.0)) return finish(EvidenceStatus::Skipped);

    const bool wants_existence =
        kind == RegionKind::ExistenceRadial || kind == RegionKind::ExistenceExplicit;

    bool have_separatrix = false;
    try {
        const auto g = shooting::find_ground_state(P, {1e-3, 1e3});
        if (g) {
            ev.candidates.push_back(check_candidate(P, *g, "shooting separatrix", false));
            have_separatrix = true;
        }
    } catch (const std::exception&) {
        // endpoints classified identically: no separatrix from this bracket
    }
    if (elapsed() > budget_seconds) return finish(EvidenceStatus::TimedOut);

    if (!have_separatrix) {
        for (double v0 : {1e-3, 1.0, 1e3}) {
            try {
                const auto tr = shooting::integrate_v(P, v0);
                ev.candidates.push_back(check_candidate(
                    P, tr.profile, "trajectory from v0 = " + detail::format_number(v0),
                    tr.event_t.has_value()));
            } catch (const std::exception&) {
            }
            if (elapsed() > budget_seconds) return finish(EvidenceStatus::TimedOut);
        }
    }

    auto any_pass = [&] {
        for (const auto& c : ev.candidates)
            if (c.passes()) return true;
        return false;
    };

    // the operator iterate: decisive extra witness, but only inside the band
    // where the fixed-point map is defined, and only when worth its cost
    const auto d = derive_constants(P);
    const bool band = P.power > d.two_alpha && P.power < d.two_star;
    if (band && (!wants_existence || !any_pass()) && elapsed() < 0.5 * budget_seconds) {
        try {
            const auto t = make_log_grid(1e-4, 60.0, 961);
            const auto init = sample_profile(t, [](double s) { return std::exp(-s); });
            const auto res = green::fixed_point_solve(P, init);
            if (!res.trivial)
                ev.candidates.push_back(check_candidate(
                    P, res.profile,
                    res.converged ? "operator fixed point" : "operator iterate (not converged)",
                    false));
        } catch (const std::exception&) {
        }
    }
    if (elapsed() > budget_seconds) return finish(EvidenceStatus::TimedOut);

    if (ev.candidates.empty()) return finish(EvidenceStatus::Inconclusive);
    if (wants_existence)
        return finish(any_pass() ? EvidenceStatus::Supports : EvidenceStatus::Inconclusive);
    if (any_pass()) return finish(EvidenceStatus::Contradicts);
    bool all_fail = true;
    for (const auto& c : ev.candidates) all_fail = all_fail && !c.failed_checks.empty();
    return finish(all_fail ? EvidenceStatus::Supports : EvidenceStatus::Inconclusive);
}

/// Rectangular scan request.  Cells are sampled at midpoints, so the open
/// boundary values alpha = 0 and p = 2 are never evaluated.
struct ScanSpec {
    int dim = 3;
    double alpha_lo = 0.0, alpha_hi = 4.0;
    double p_lo = 2.0, p_hi = 8.0;
    std::size_t alpha_cells = 50, p_cells = 50;
    bool with_numerics = false;
    double cell_seconds = 30.0;
};

struct RegionMap {
    int dim = 3;
    double alpha_lo = 0.0, alpha_hi = 0.0, p_lo = 0.0, p_hi = 0.0;
    std::vector<double> alpha_grid, p_grid;            ///< cell midpoints
    std::vector<std::vector<RegionClass>> cells;       ///< [alpha index][p index]
    std::vector<std::vector<CellEvidence>> evidence;   ///< same shape, only with numerics
};

/// Classify every cell midpoint; optionally corroborate each cell
/// numerically.  Cells are independent, and results are keyed by index, so a
/// concurrent executor would assemble the identical map; this implementation
/// runs them in index order.
inline RegionMap scan_grid(const ScanSpec& spec) {
    if (spec.dim < 3) throw std::domain_error("scan_grid: dim >= 3 required");
    if (spec.alpha_cells == 0 || spec.p_cells == 0)
        throw std::domain_error("scan_grid: resolution must be positive");
    if (!(spec.alpha_lo >= 0.0 && spec.alpha_hi > spec.alpha_lo))
        throw std::domain_error("scan_grid: need 0 <= alpha_lo < alpha_hi");
    if (!(spec.p_lo >= 2.0 && spec.p_hi > spec.p_lo))
        throw std::domain_error("scan_grid: need 2 <= p_lo < p_hi");

    RegionMap map;
    map.dim = spec.dim;
    map.alpha_lo = spec.alpha_lo;
    map.alpha_hi = spec.alpha_hi;
    map.p_lo = spec.p_lo;
    map.p_hi = spec.p_hi;
    const double da = (spec.alpha_hi - spec.alpha_lo) / spec.alpha_cells;
    const double dp = (spec.p_hi - spec.p_lo) / spec.p_cells;
    for (std::size_t i = 0; i < spec.alpha_cells; ++i)
        map.alpha_grid.push_back(spec.alpha_lo + (i + 0.5) * da);
    for (std::size_t j = 0; j < spec.p_cells; ++j)
        map.p_grid.push_back(spec.p_lo + (j + 0.5) * dp);

    map.cells.resize(spec.alpha_cells);
    if (spec.with_numerics) map.evidence.resize(spec.alpha_cells);
    for (std::size_t i = 0; i < spec.alpha_cells; ++i) {
        map.cells[i].reserve(spec.p_cells);
        for (std::size_t j = 0; j < spec.p_cells; ++j)
            map.cells[i].push_back(classify(spec.dim, map.alpha_grid[i], map.p_grid[j]));
        if (spec.with_numerics) {
            map.evidence[i].reserve(spec.p_cells);
            for (std::size_t j = 0; j < spec.p_cells; ++j) {
                const Parameters P{spec.dim, 1.0, map.alpha_grid[i], map.p_grid[j]};
                map.evidence[i].push_back(
                    evidence_for_cell(P, map.cells[i][j].kind, spec.cell_seconds));
            }
        }
    }
    return map;
}

struct MapStyle {
    int width = 640;
    int height = 480;
    int margin = 48;
    std::string nonexistence_fill = "#d9d9d9";
    std::string existence_fill = "#7f7f7f";
    std::string open_fill = "#ffffff";
};

struct RenderedMap {
    std::string svg;
    std::string csv;
};

namespace detail {

inline const std::string& cell_fill(const MapStyle& style, RegionKind k) {
    static const std::string hatch = "url(#hatch)";
    switch (k) {
        case RegionKind::Nonexistence: return style.nonexistence_fill;
        case RegionKind::RadialNonexistence: return hatch;
        case RegionKind::ExistenceRadial:
        case RegionKind::ExistenceExplicit: return style.existence_fill;
        case RegionKind::Open: return style.open_fill;
    }
    return style.open_fill;
}

} // namespace detail

/// Render the map as a self-contained SVG (nonexistence light gray, the
/// obstruction band hatched, existence dark gray, open white, the three
/// critical curves overlaid) plus a CSV table with one row per cell.
inline RenderedMap render_map(const RegionMap& map, const MapStyle& style = {}) {
    if (map.cells.empty() || map.alpha_grid.empty() || map.p_grid.empty())
        throw std::domain_error("render_map: empty map");

    const double pw = style.width - 2.0 * style.margin;
    const double phh = style.height - 2.0 * style.margin;
    auto sx = [&](double a) {
        return style.margin + (a - map.alpha_lo) / (map.alpha_hi - map.alpha_lo) * pw;
    };
    auto sy = [&](double p) {
        return style.height - style.margin - (p - map.p_lo) / (map.p_hi - map.p_lo) * phh;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
        << style.height << "\" viewBox=\"0 0 " << style.width << " " << style.height << "\">\n";
    svg << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\""
           " patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\""
        << style.nonexistence_fill
        << "\"/><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#8c8c8c\""
           " stroke-width=\"1.5\"/></pattern></defs>\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height
        << "\" fill=\"#ffffff\"/>\n";

    const double da = (map.alpha_hi - map.alpha_lo) / map.alpha_grid.size();
    const double dp = (map.p_hi - map.p_lo) / map.p_grid.size();
    for (std::size_t i = 0; i < map.alpha_grid.size(); ++i) {
        const double a0 = map.alpha_lo + i * da;
        for (std::size_t j = 0; j < map.p_grid.size(); ++j) {
            const double p0 = map.p_lo + j * dp;
            svg << "<rect class=\"cell\" x=\"" << sx(a0) << "\" y=\"" << sy(p0 + dp)
                << "\" width=\"" << sx(a0 + da) - sx(a0) << "\" height=\""
                << sy(p0) - sy(p0 + dp) << "\" fill=\""
                << detail::cell_fill(style, map.cells[i][j].kind) << "\"/>\n";
        }
    }

    // the three critical curves, clipped to the plot window and split at
    // poles; curve samples are denser than any reasonable grid
    struct CurveSpec {
        const char* css;
        const char* dash;
        int which;  // 0: 2*, 1: 2_a, 2: 2_a*
    };
    for (const CurveSpec cs :
         {CurveSpec{"curve-two-star", "", 0}, CurveSpec{"curve-two-alpha", "6,4", 1},
          CurveSpec{"curve-two-alpha-star", "2,3", 2}}) {
        std::vector<std::pair<double, double>> run;
        auto flush = [&] {
            if (run.size() >= 2) {
                svg << "<polyline class=\"" << cs.css << "\" fill=\"none\" stroke=\"#000000\""
                       " stroke-width=\"1.2\"";
                if (cs.dash[0] != '\0') svg << " stroke-dasharray=\"" << cs.dash << "\"";
                svg << " points=\"";
                for (const auto& [x, y] : run) svg << x << "," << y << " ";
                svg << "\"/>\n";
            }
            run.clear();
        };
        const int samples = 257;
        for (int k = 0; k < samples; ++k) {
            const double a =
                map.alpha_lo + (map.alpha_hi - map.alpha_lo) * k / double(samples - 1);
            if (!(a > 0.0)) continue;
            const auto cur = critical_curves(map.dim, a);
            std::optional<double> p;
            if (cs.which == 0) p = cur.two_star;
            if (cs.which == 1) p = cur.two_alpha;
            if (cs.which == 2) p = cur.two_alpha_star;
            if (!p || !(*p >= map.p_lo && *p <= map.p_hi)) {
                flush();
                continue;
            }
            run.emplace_back(sx(a), sy(*p));
        }
        flush();
    }

    svg << "<rect x=\"" << style.margin << "\" y=\"" << style.margin << "\" width=\"" << pw
        << "\" height=\"" << phh << "\" fill=\"none\" stroke=\"#000000\"/>\n";
    svg << "<text x=\"" << style.width / 2.0 << "\" y=\"" << style.height - 10
        << "\" text-anchor=\"middle\" font-size=\"14\">alpha</text>\n";
    svg << "<text x=\"14\" y=\"" << style.height / 2.0
        << "\" text-anchor=\"middle\" font-size=\"14\">p</text>\n";
    svg << "<text x=\"" << style.margin << "\" y=\"" << style.height - style.margin + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << map.alpha_lo << "</text>\n";
    svg << "<text x=\"" << style.width - style.margin << "\" y=\""
        << style.height - style.margin + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << map.alpha_hi << "</text>\n";
    svg << "<text x=\"" << style.margin - 8 << "\" y=\"" << style.height - style.margin
        << "\" text-anchor=\"end\" font-size=\"11\">" << map.p_lo << "</text>\n";
    svg << "<text x=\"" << style.margin - 8 << "\" y=\"" << style.margin + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << map.p_hi << "</text>\n";
    svg << "</svg>\n";

    std::ostringstream csv;
    csv << "alpha,p,class,source\n";
    csv.precision(12);
    for (std::size_t i = 0; i < map.alpha_grid.size(); ++i)
        for (std::size_t j = 0; j < map.p_grid.size(); ++j)
            csv << map.alpha_grid[i] << "," << map.p_grid[j] << ","
                << kind_name(map.cells[i][j].kind) << "," << source_name(map.cells[i][j].source)
                << "\n";

    RenderedMap out;
    out.svg = svg.str();
    out.csv = csv.str();
    return out;
}

} // namespace radpot::region

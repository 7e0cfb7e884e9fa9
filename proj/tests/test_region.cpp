#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "radpot/params.hpp"
#include "radpot/region.hpp"

using Catch::Approx;
using namespace radpot;
using region::EvidenceStatus;
using region::RegionKind;
using region::RegionSource;

namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

bool has_check(const region::CandidateReport& c, const std::string& name) {
    return std::find(c.failed_checks.begin(), c.failed_checks.end(), name) !=
           c.failed_checks.end();
}

} // namespace

TEST_CASE("classification matches the expected verdicts at exact rationals") {
    using K = RegionKind;
    using S = RegionSource;
    struct Row {
        int N;
        Rat alpha, p;
        K kind;
        S source;
    };
    const Row rows[] = {
        {3, Rat(2), Rat(6), K::ExistenceExplicit, S::CriticalLine},
        {3, Rat(1), Rat(16, 5), K::RadialNonexistence, S::ObstructionBand},
        {3, Rat(1), Rat(4), K::ExistenceRadial, S::WeightedEmbedding},
        {3, Rat(1), Rat(7), K::Nonexistence, S::CriticalMismatch},
        {3, Rat(1), Rat(3), K::Nonexistence, S::Boundary},
        {3, Rat(5, 2), Rat(10), K::Open, S::Unattributed},
        {3, Rat(1), Rat(10, 3), K::RadialNonexistence, S::Boundary},
        {3, Rat(1), Rat(6), K::Nonexistence, S::CriticalLine},
        {3, Rat(2), Rat(5), K::Nonexistence, S::CriticalLine},
        {3, Rat(3), Rat(4), K::Nonexistence, S::CriticalMismatch},
        {3, Rat(7, 2), Rat(7), K::ExistenceRadial, S::WeightedEmbedding},
        {4, Rat(3), Rat(3), K::Nonexistence, S::CriticalMismatch},
        {5, Rat(4), Rat(12), K::Nonexistence, S::HardyBand},
    };
    for (const auto& row : rows) {
        INFO("N=" << row.N << " alpha=" << row.alpha << " p=" << row.p);
        const auto rc = region::classify(row.N, row.alpha, row.p);
        CHECK(rc.kind == row.kind);
        CHECK(rc.source == row.source);
    }

    // curve hits carry a note naming the line, interior cells do not
    CHECK(region::classify(3, Rat(1), Rat(3)).boundary_note.has_value());
    CHECK(region::classify(3, Rat(1), Rat(10, 3)).boundary_note.has_value());
    CHECK(region::classify(3, Rat(2), Rat(5)).boundary_note.has_value());
    CHECK(region::classify(3, Rat(1), Rat(6)).boundary_note.has_value());
    CHECK_FALSE(region::classify(3, Rat(1), Rat(4)).boundary_note.has_value());
    CHECK_FALSE(region::classify(3, Rat(5, 2), Rat(10)).boundary_note.has_value());

    // repeated calls agree, and doubles land with the rationals off the curves
    const auto first = region::classify(3, 1.0, 3.2);
    const auto again = region::classify(3, 1.0, 3.2);
    CHECK(first.kind == again.kind);
    CHECK(first.source == again.source);
    CHECK(first.kind == K::RadialNonexistence);

    CHECK_THROWS_AS(region::classify(2, 1.0, 4.0), std::domain_error);
    CHECK_THROWS_AS(region::classify(3, 0.0, 4.0), std::domain_error);
    CHECK_THROWS_AS(region::classify(3, 1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(region::classify(3, Rat(-1), Rat(3)), std::domain_error);
}

TEST_CASE("critical curves keep their ordering across the admissible band") {
    for (int N : {3, 4, 7}) {
        for (int k = 1; k <= 15; ++k) {
            const Rat a = Rat(k, 8);
            INFO("N=" << N << " alpha=" << a);
            const auto rc = rational_constants(N, a, Rat(3));
            REQUIRE(rc.two_alpha.has_value());
            CHECK(*rc.two_alpha > 2);
            CHECK(rc.two_alpha_star > *rc.two_alpha);
            CHECK(rc.two_star > rc.two_alpha_star);
        }
        for (int k = 1; k <= 7; ++k) {
            const Rat a = 2 + Rat(k * (2 * N - 4), 8);
            INFO("N=" << N << " alpha=" << a);
            const auto rc = rational_constants(N, a, Rat(3));
            CHECK(rc.two_alpha_star > rc.two_star);
        }
        const auto deg = rational_constants(N, Rat(2), Rat(3));
        REQUIRE(deg.two_alpha.has_value());
        CHECK(*deg.two_alpha == deg.two_star);
        CHECK(deg.two_alpha_star == deg.two_star);
    }

    const auto c = region::critical_curves(3, 1.0);
    CHECK(c.two_star == Approx(6.0));
    REQUIRE(c.two_alpha.has_value());
    CHECK(*c.two_alpha == Approx(3.0));
    REQUIRE(c.two_alpha_star.has_value());
    CHECK(*c.two_alpha_star == Approx(10.0 / 3.0));
    CHECK_FALSE(region::critical_curves(3, 3.0).two_alpha.has_value());
    CHECK_FALSE(region::critical_curves(3, 4.0).two_alpha_star.has_value());
    CHECK_THROWS_AS(region::critical_curves(2, 1.0), std::domain_error);
    CHECK_THROWS_AS(region::critical_curves(3, 0.0), std::domain_error);
}

TEST_CASE("grid scan partitions the plane into the expected cell counts") {
    const auto map = region::scan_grid({});
    REQUIRE(map.alpha_grid.size() == 50);
    REQUIRE(map.p_grid.size() == 50);
    REQUIRE(map.cells.size() == 50);
    for (const auto& col : map.cells) REQUIRE(col.size() == 50);
    CHECK(map.evidence.empty());
    CHECK(std::is_sorted(map.alpha_grid.begin(), map.alpha_grid.end(), std::less_equal<>{}));
    CHECK(std::is_sorted(map.p_grid.begin(), map.p_grid.end(), std::less_equal<>{}));
    CHECK(map.alpha_grid.front() == Approx(0.04));
    CHECK(map.p_grid.back() == Approx(7.94));

    std::map<std::string, int> kinds, sources;
    for (const auto& col : map.cells) {
        for (const auto& cell : col) {
            ++kinds[region::kind_name(cell.kind)];
            ++sources[region::source_name(cell.source)];
        }
    }
    CHECK(kinds["Nonexistence"] == 1547);
    CHECK(kinds["RadialNonexistence"] == 54);
    CHECK(kinds["ExistenceRadial"] == 884);
    CHECK(kinds["ExistenceExplicit"] == 0);
    CHECK(kinds["Open"] == 15);
    CHECK(sources["CriticalLine"] == 0);
    CHECK(sources["CriticalMismatch"] == 1250);
    CHECK(sources["HardyBand"] == 297);
    CHECK(sources["WeightedEmbedding"] == 884);
    CHECK(sources["ObstructionBand"] == 54);
    CHECK(sources["Boundary"] == 0);
    CHECK(sources["Unattributed"] == 15);

    // the double midpoints agree cell by cell with their exact rational twins
    int mismatches = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t j = 0; j < 50; ++j) {
            const Rat a = Rat(2 * static_cast<int>(i) + 1, 25);
            const Rat p = 2 + Rat(3 * (2 * static_cast<int>(j) + 1), 50);
            const auto exact = region::classify(3, a, p);
            if (exact.kind != map.cells[i][j].kind || exact.source != map.cells[i][j].source)
                ++mismatches;
        }
    }
    CHECK(mismatches == 0);

    // a one-cell scan lands on the representative existence point
    const auto one = region::scan_grid({3, 0.9, 1.1, 3.9, 4.1, 1, 1});
    REQUIRE(one.cells.size() == 1);
    CHECK(one.alpha_grid[0] == Approx(1.0));
    CHECK(one.p_grid[0] == Approx(4.0));
    CHECK(one.cells[0][0].kind == RegionKind::ExistenceRadial);

    region::ScanSpec bad;
    bad.alpha_cells = 0;
    CHECK_THROWS_AS(region::scan_grid(bad), std::domain_error);
    bad = {};
    bad.p_cells = 0;
    CHECK_THROWS_AS(region::scan_grid(bad), std::domain_error);
    bad = {};
    bad.dim = 2;
    CHECK_THROWS_AS(region::scan_grid(bad), std::domain_error);
    bad = {};
    bad.alpha_lo = -1.0;
    CHECK_THROWS_AS(region::scan_grid(bad), std::domain_error);
    bad = {};
    bad.alpha_hi = bad.alpha_lo;
    CHECK_THROWS_AS(region::scan_grid(bad), std::domain_error);
    bad = {};
    bad.p_lo = 1.5;
    CHECK_THROWS_AS(region::scan_grid(bad), std::domain_error);
    bad = {};
    bad.p_hi = 1.0;
    CHECK_THROWS_AS(region::scan_grid(bad), std::domain_error);
}

TEST_CASE("rendered map carries shading, hatching, and the curve overlays") {
    const auto map = region::scan_grid({});
    const auto art = region::render_map(map);

    CHECK(art.svg.rfind("<svg", 0) == 0);
    CHECK(art.svg.find("</svg>") != std::string::npos);
    CHECK(count_of(art.svg, "class=\"cell\"") == 2500);
    CHECK(count_of(art.svg, "url(#hatch)") == 54);
    CHECK(count_of(art.svg, "fill=\"#7f7f7f\"") == 884);
    // light gray cells plus the rect backing the hatch pattern
    CHECK(count_of(art.svg, "fill=\"#d9d9d9\"") == 1548);
    CHECK(count_of(art.svg, "fill=\"#ffffff\"") == 16);
    CHECK(count_of(art.svg, "<polyline") == 3);
    CHECK(art.svg.find("curve-two-star") != std::string::npos);
    CHECK(art.svg.find("curve-two-alpha\"") != std::string::npos);
    CHECK(art.svg.find("curve-two-alpha-star") != std::string::npos);

    CHECK(count_of(art.csv, "\n") == 2501);
    CHECK(art.csv.rfind("alpha,p,class,source\n0.04,2.06,", 0) == 0);
    CHECK(art.csv.find("\n1,3.14,RadialNonexistence,ObstructionBand\n") != std::string::npos);
    CHECK(art.csv.find("\n1,4.1,ExistenceRadial,WeightedEmbedding\n") != std::string::npos);

    const auto one = region::scan_grid({3, 0.9, 1.1, 3.9, 4.1, 1, 1});
    region::MapStyle style;
    style.existence_fill = "#303030";
    const auto tiny = region::render_map(one, style);
    CHECK(count_of(tiny.svg, "class=\"cell\"") == 1);
    CHECK(count_of(tiny.svg, "fill=\"#303030\"") == 1);
    // every curve leaves this tight window, so no overlay is drawn
    CHECK(count_of(tiny.svg, "<polyline") == 0);
    CHECK(count_of(tiny.csv, "\n") == 2);

    CHECK_THROWS_AS(region::render_map(region::RegionMap{}), std::domain_error);
}

TEST_CASE("cell evidence corroborates existence and nonexistence verdicts") {
    SECTION("the separatrix candidate carries an existence cell") {
        const Parameters P{3, 1.0, 1.0, 4.0};
        const auto ev = region::evidence_for_cell(P, RegionKind::ExistenceRadial, 60.0);
        CHECK(ev.status == EvidenceStatus::Supports);
        REQUIRE_FALSE(ev.candidates.empty());
        CHECK(ev.candidates.front().source == "shooting separatrix");
        bool passing = false;
        for (const auto& c : ev.candidates) passing = passing || c.passes();
        CHECK(passing);
        CHECK(ev.seconds > 0.0);
    }

    SECTION("every candidate in the obstruction band fails a named check") {
        const Parameters P{3, 1.0, 1.0, 3.2};
        const auto ev = region::evidence_for_cell(P, RegionKind::RadialNonexistence, 120.0);
        CHECK(ev.status == EvidenceStatus::Supports);
        REQUIRE(ev.candidates.size() >= 4);
        bool saw_positivity = false, saw_identity = false;
        for (const auto& c : ev.candidates) {
            INFO("candidate " << c.source);
            CHECK_FALSE(c.passes());
            REQUIRE_FALSE(c.failed_checks.empty());
            if (c.source.rfind("trajectory", 0) == 0)
                saw_positivity = saw_positivity || has_check(c, "positivity");
            if (c.source.rfind("operator", 0) == 0)
                saw_identity = saw_identity || has_check(c, "identity-residual");
        }
        CHECK(saw_positivity);
        CHECK(saw_identity);
    }

    SECTION("below the band only sign-crossing trajectories appear") {
        const Parameters P{3, 1.0, 1.0, 2.5};
        const auto ev = region::evidence_for_cell(P, RegionKind::Nonexistence, 60.0);
        CHECK(ev.status == EvidenceStatus::Supports);
        REQUIRE_FALSE(ev.candidates.empty());
        for (const auto& c : ev.candidates) CHECK(has_check(c, "positivity"));
    }

    SECTION("open cells and strong singularities stand down") {
        const Parameters P{3, 1.0, 2.5, 10.0};
        CHECK(region::evidence_for_cell(P, RegionKind::Open, 60.0).status ==
              EvidenceStatus::Skipped);
        CHECK(region::evidence_for_cell(P, RegionKind::Nonexistence, 60.0).status ==
              EvidenceStatus::Skipped);
    }

    SECTION("a vanishing budget reports a timeout") {
        const Parameters P{3, 1.0, 1.0, 4.0};
        const auto ev = region::evidence_for_cell(P, RegionKind::ExistenceRadial, 0.0);
        CHECK(ev.status == EvidenceStatus::TimedOut);
    }
}

TEST_CASE("a small existence subgrid yields passing candidates in most cells") {
    region::ScanSpec spec;
    spec.alpha_lo = 0.2;
    spec.alpha_hi = 1.0;
    spec.p_lo = 3.4;
    spec.p_hi = 5.4;
    spec.alpha_cells = 5;
    spec.p_cells = 5;
    spec.with_numerics = true;
    spec.cell_seconds = 15.0;
    const auto map = region::scan_grid(spec);
    REQUIRE(map.evidence.size() == 5);
    for (const auto& col : map.evidence) REQUIRE(col.size() == 5);

    int supports = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            REQUIRE(map.cells[i][j].kind == RegionKind::ExistenceRadial);
            if (map.evidence[i][j].status == EvidenceStatus::Supports) ++supports;
        }
    }
    CHECK(supports >= 20);

    // numerics never touch the analytic classification
    spec.with_numerics = false;
    const auto plain = region::scan_grid(spec);
    int changed = 0;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            if (plain.cells[i][j].kind != map.cells[i][j].kind ||
                plain.cells[i][j].source != map.cells[i][j].source)
                ++changed;
    CHECK(changed == 0);
}

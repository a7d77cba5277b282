#include "doctest.h"

#include "qpr/errors.hpp"
#include "qpr/google.hpp"
#include "qpr/graph.hpp"
#include "qpr/oracle.hpp"
#include "qpr/perturb.hpp"
#include "qpr/spectral.hpp"
#include "qpr/szegedy.hpp"

#include <cmath>
#include <complex>

using namespace qpr;

namespace {

const char* kRand5 = "1\t2\n1\t5\n2\t3\n2\t4\n3\t1\n4\t5\n5\t1\n5\t3\n";
const char* kRand5Perturb = R"({
    "order_terms": [
        {"order": 1, "entries": [
            {"i": 1, "j": 1, "value": 0.03}, {"i": 1, "j": 2, "value": -0.05},
            {"i": 1, "j": 5, "value": 0.02}, {"i": 2, "j": 2, "value": 0.04},
            {"i": 2, "j": 3, "value": -0.06}, {"i": 2, "j": 4, "value": 0.02},
            {"i": 3, "j": 1, "value": -0.04}, {"i": 3, "j": 3, "value": 0.04},
            {"i": 4, "j": 4, "value": 0.03}, {"i": 4, "j": 5, "value": -0.03},
            {"i": 5, "j": 1, "value": -0.02}, {"i": 5, "j": 3, "value": 0.05},
            {"i": 5, "j": 5, "value": -0.03}
        ]}
    ]
})";
const char* kZeroPerturb = R"({"order_terms": [{"order": 1, "entries": []}]})";

} // namespace

TEST_CASE("direct-propagation rank at chi = 0 meets the eigenpair computation") {
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kZeroPerturb, 5, "inline");

    WalkOperators wo = build_walk(gm.g);
    SpectralData sd = decompose_symmetric(build_symmetric_core(gm.g));
    WalkSpectrum ws = walk_eigenpairs(wo, sd);
    CVec psi0 = uniform_start_state(wo);

    for (long m : {0L, 1L, 3L}) {
        for (std::size_t node = 0; node < 5; ++node) {
            for (RankVariant variant : {RankVariant::coherent, RankVariant::summed}) {
                const double direct = oracle::rank_at(gm, ps, 0.0, node, m, variant);
                const double via_pairs = quantum_rank(ws, psi0, node, m, variant);
                CHECK(direct == doctest::Approx(via_pairs).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("rank continuation is real on the real axis and equals the coherent rank") {
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kRand5Perturb, 5, "inline");
    for (double chi : {0.0, 0.01, -0.02}) {
        const cxd cont = oracle::rank_continuation_at(gm, ps, cxd(chi, 0.0), 0, 1);
        CHECK(std::abs(cont.imag()) < 1e-10);
        const double direct = oracle::rank_at(gm, ps, chi, 0, 1, RankVariant::coherent);
        CHECK(cont.real() == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("amplitude matching requires every eigenphase to sit off the real axis") {
    // the 2-cycle walk has eigenvalue 1 from the reversible core: no matching
    GoogleMatrix gm2 = build_google(parse_edge_list("1\t2\n2\t1\n", "inline"));
    PerturbationSeries ps2 = parse_perturbation(kZeroPerturb, 2, "inline");
    CHECK_THROWS_AS(oracle::amplitude_at(gm2, ps2, cxd(0.0, 0.0), 0, 1), NumericalError);

    // on a non-reversible graph the matched amplitude reproduces the rank
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kRand5Perturb, 5, "inline");
    for (double chi : {0.0, 0.015}) {
        const cxd amp = oracle::amplitude_at(gm, ps, cxd(chi, 0.0), 1, 2);
        const double direct = oracle::rank_at(gm, ps, chi, 1, 2, RankVariant::coherent);
        CHECK(std::norm(amp) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("circle extraction of a constant function returns it and nothing else") {
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kZeroPerturb, 5, "inline");
    const double base = oracle::rank_at(gm, ps, 0.0, 0, 1, RankVariant::coherent);
    const cxd c0 = oracle::circle_coefficient(gm, ps, 0, 1, 0, 0.05, 32);
    CHECK(std::abs(c0 - cxd(base, 0.0)) < 1e-10);
    for (std::size_t n : {std::size_t(1), std::size_t(3)}) {
        const cxd cn = oracle::circle_coefficient(gm, ps, 0, 1, n, 0.05, 32);
        CHECK(std::abs(cn) < 1e-9);
    }
    CHECK_THROWS_AS(oracle::circle_coefficient(gm, ps, 0, 1, 0, 0.05, 0), ParseError);
}

TEST_CASE("circle extraction recovers low-order rank coefficients") {
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kRand5Perturb, 5, "inline");
    PerturbationAnalysis an = analyze_perturbation(gm, ps, {{0, 1}}, 3);
    REQUIRE(an.phases_resolved);
    for (std::size_t n = 0; n <= 2; ++n) {
        const cxd cn = oracle::circle_coefficient(gm, ps, 0, 1, n, 0.02, 64);
        CHECK(std::abs(cn.imag()) < 1e-8);
        CHECK(cn.real() == doctest::Approx(an.ranks[0].at(n)).epsilon(1e-4));
    }
}

TEST_CASE("truncation comparison rows carry consistent errors and known slopes") {
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kRand5Perturb, 5, "inline");
    PerturbationAnalysis an = analyze_perturbation(gm, ps, {{0, 1}}, 3);

    std::vector<double> grid = oracle::dyadic_grid(0.02, 5);
    REQUIRE(grid.size() == 5);
    CHECK(grid[0] == 0.02);
    CHECK(grid[4] == doctest::Approx(0.02 / 16.0));

    SeriesScalar trunc1 = series_truncate(an.ranks[0], 1);
    auto rows = oracle::compare_truncation(gm, ps, trunc1, 0, 1, RankVariant::coherent, grid);
    REQUIRE(rows.size() == grid.size());
    for (const auto& r : rows) {
        CHECK(r.error == doctest::Approx(std::abs(r.exact - r.truncated)));
        CHECK(r.truncated == doctest::Approx(series_eval(trunc1, r.chi)).epsilon(1e-12));
        CHECK(r.exact ==
              doctest::Approx(oracle::rank_at(gm, ps, r.chi, 0, 1, RankVariant::coherent)));
    }
    // dropping the series after chi^1 leaves a quadratic-looking error
    const double slope = oracle::loglog_slope(rows);
    CHECK(slope > 1.7);
}

TEST_CASE("loglog slope ignores points below the floor and needs two survivors") {
    std::vector<oracle::TruncationRow> rows;
    for (double chi : {0.4, 0.2, 0.1, 0.05}) {
        oracle::TruncationRow r;
        r.chi = chi;
        r.error = chi * chi * chi;
        rows.push_back(r);
    }
    CHECK(oracle::loglog_slope(rows) == doctest::Approx(3.0).epsilon(1e-12));

    rows[2].error = 1e-16; // below the default floor: dropped, slope unchanged
    rows[3].error = 1e-16;
    CHECK(oracle::loglog_slope(rows) == doctest::Approx(3.0).epsilon(1e-12));

    rows[1].error = 1e-16;
    CHECK_THROWS_AS(oracle::loglog_slope(rows), NumericalError);
}

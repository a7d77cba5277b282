#include "doctest.h"

#include "qpr/errors.hpp"
#include "qpr/google.hpp"
#include "qpr/graph.hpp"
#include "qpr/perturb.hpp"
#include "qpr/spectral.hpp"

#include <cmath>
#include <complex>
#include <string>

using namespace qpr;

namespace {

PerturbationSeries perturbation_from(const std::string& json_text, std::size_t n) {
    return parse_perturbation(json_text, n, "inline");
}

const char* kTwoCyclePerturb = R"({
    "order_terms": [
        {"order": 1, "entries": [
            {"i": 1, "j": 1, "value": 0.1},
            {"i": 1, "j": 2, "value": -0.1}
        ]}
    ]
})";

} // namespace

TEST_CASE("symmetrized core series starts at the core and matches the closed first order") {
    GoogleMatrix gm = build_google(parse_edge_list("1\t2\n2\t1\n", "inline"));
    PerturbationSeries ps = perturbation_from(kTwoCyclePerturb, 2);
    SeriesMat tser = core_series(gm.g, ps, 3);

    REQUIRE(tser.c.size() == 4);
    CHECK(max_abs(tser.c[0] - build_symmetric_core(gm.g)) < 1e-14);

    Mat closed = core_first_order(gm.g, ps.terms[0]);
    CHECK(max_abs(tser.c[1] - closed) < 1e-12);
    // t_12 = sqrt(g_12 g_21); d/dchi at 0 = (g1_12 g_21 + g1_21 g_12) / (2 t_12)
    const double t12 = std::sqrt(gm.g(0, 1) * gm.g(1, 0));
    const double expect = (-0.1 * gm.g(1, 0) + 0.0 * gm.g(0, 1)) / (2.0 * t12);
    CHECK(tser.c[1](0, 1) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(tser.c[1](0, 1) == doctest::Approx(-0.05).epsilon(1e-12));
    // symmetry at every order
    for (const Mat& m : tser.c) CHECK(max_abs(m - transpose(m)) < 1e-13);
}

TEST_CASE("core series agrees with direct symmetrization at a small parameter") {
    GoogleMatrix gm = build_google(parse_edge_list("1\t2\n1\t3\n2\t1\n2\t3\n3\t1\n3\t2\n", "inline"));
    const std::string text = R"({
        "order_terms": [
            {"order": 1, "entries": [
                {"i": 1, "j": 1, "value": 0.02}, {"i": 1, "j": 2, "value": -0.03},
                {"i": 1, "j": 3, "value": 0.01}, {"i": 2, "j": 1, "value": -0.01},
                {"i": 2, "j": 2, "value": 0.03}, {"i": 2, "j": 3, "value": -0.02},
                {"i": 3, "j": 1, "value": 0.01}, {"i": 3, "j": 2, "value": 0.02},
                {"i": 3, "j": 3, "value": -0.03}
            ]}
        ]
    })";
    PerturbationSeries ps = perturbation_from(text, 3);
    SeriesMat tser = core_series(gm.g, ps, 4);
    const double chi = 1e-2;
    Mat exact = build_symmetric_core(eval_perturbed(gm, ps, chi));
    Mat approx(3, 3);
    for (std::size_t r = 0; r < tser.c.size(); ++r)
        approx += std::pow(chi, double(r)) * tser.c[r];
    CHECK(max_abs(exact - approx) < 1e-11);
}

TEST_CASE("projection and eigenvalue series reproduce textbook 2x2 perturbation theory") {
    // T = diag(a, b), T1 pure off-diagonal: lambda_top(chi) = a + c^2 chi^2/(a-b) + O(chi^4)
    const double a = 0.7, b = 0.2, c = 0.3;
    Mat t(2, 2);
    t(0, 0) = a;
    t(1, 1) = b;
    Mat t1(2, 2);
    t1(0, 1) = c;
    t1(1, 0) = c;
    SpectralData sd = decompose_symmetric(t);
    REQUIRE(sd.clusters.size() == 2);

    SeriesMat tser;
    tser.c = {t, t1};
    SeriesScalar lam = core_eigenvalue_series(sd, 0, tser, 3);
    CHECK(lam.at(0) == doctest::Approx(a).epsilon(1e-14));
    CHECK(std::abs(lam.at(1)) < 1e-13);
    CHECK(lam.at(2) == doctest::Approx(c * c / (a - b)).epsilon(1e-12));
    CHECK(std::abs(lam.at(3)) < 1e-12);

    // projection series against the dense projection of T(chi)
    SeriesMat pser = core_projection_series(sd, 0, tser, 3);
    const double chi = 1e-3;
    Mat papprox(2, 2);
    for (std::size_t r = 0; r < pser.c.size(); ++r)
        papprox += std::pow(chi, double(r)) * pser.c[r];
    // exact top eigenvector of [[a, c chi], [c chi, b]]
    Mat tchi = t + chi * t1;
    SpectralData sdc = decompose_symmetric(tchi);
    CHECK(max_abs(papprox - sdc.clusters[0].projection) < 1e-10);

    // idempotence order by order: sum_{r+s=n} P_r P_s = P_n
    for (std::size_t n = 0; n < pser.c.size(); ++n) {
        Mat conv(2, 2);
        for (std::size_t r = 0; r <= n; ++r) conv += matmul(pser.c[r], pser.c[n - r]);
        CHECK(max_abs(conv - pser.c[n]) < 1e-11);
    }
}

TEST_CASE("degenerate reduction splits the double cluster at the right level") {
    GoogleMatrix gm = build_google(parse_edge_list("1\t2\n1\t3\n2\t1\n2\t3\n3\t1\n3\t2\n", "inline"));
    SpectralData sd = decompose_symmetric(build_symmetric_core(gm.g));

    SUBCASE("splitting perturbation resolves at level 1") {
        const std::string text = R"({
            "order_terms": [
                {"order": 1, "entries": [
                    {"i": 1, "j": 1, "value": 0.02}, {"i": 1, "j": 2, "value": -0.03},
                    {"i": 1, "j": 3, "value": 0.01}, {"i": 2, "j": 1, "value": -0.01},
                    {"i": 2, "j": 2, "value": 0.03}, {"i": 2, "j": 3, "value": -0.02},
                    {"i": 3, "j": 1, "value": 0.01}, {"i": 3, "j": 2, "value": 0.02},
                    {"i": 3, "j": 3, "value": -0.03}
                ]}
            ]
        })";
        PerturbationSeries ps = perturbation_from(text, 3);
        SeriesMat tser = core_series(gm.g, ps, 3);
        ReductionTree tree = reduce_eigenvalues(sd, tser);

        REQUIRE(tree.roots.size() == 2);
        const EigenNode& top = tree.roots[0];
        CHECK(top.multiplicity == 1);
        CHECK(top.leaf);
        const EigenNode& deg = tree.roots[1];
        CHECK(deg.multiplicity == 2);
        CHECK_FALSE(deg.leaf);
        REQUIRE(deg.children.size() == 2);
        for (const EigenNode& child : deg.children) {
            CHECK(child.level == 1);
            CHECK(child.multiplicity == 1);
            CHECK(child.leaf);
        }

        std::vector<EigenBranch> branches = collect_branches(tree);
        REQUIRE(branches.size() == 3);
        // every branch evaluated at small chi matches a dense eigenvalue
        const double chi = 1e-3;
        SpectralData direct =
            decompose_symmetric(build_symmetric_core(eval_perturbed(gm, ps, chi)), 1e-14);
        for (const EigenBranch& br : branches) {
            double predicted = series_eval(br.series, chi);
            double best = 1e9;
            for (double lam : direct.eigenvalues) best = std::min(best, std::abs(lam - predicted));
            CHECK(best < 1e-11);
        }
    }

    SUBCASE("symmetry-preserving perturbation defers the split to level 2") {
        const std::string text = R"({
            "order_terms": [
                {"order": 1, "entries": [
                    {"i": 1, "j": 1, "value": 0.1}, {"i": 1, "j": 2, "value": 0.05},
                    {"i": 1, "j": 3, "value": -0.15}, {"i": 2, "j": 1, "value": 0.05},
                    {"i": 2, "j": 3, "value": -0.05}, {"i": 3, "j": 1, "value": 0.15},
                    {"i": 3, "j": 2, "value": -0.05}, {"i": 3, "j": 3, "value": -0.1}
                ]}
            ]
        })";
        PerturbationSeries ps = perturbation_from(text, 3);
        SeriesMat tser = core_series(gm.g, ps, 3);
        ReductionTree tree = reduce_eigenvalues(sd, tser);

        REQUIRE(tree.roots.size() == 2);
        const EigenNode& deg = tree.roots[1];
        REQUIRE(deg.children.size() == 1);
        CHECK(deg.children[0].multiplicity == 2);
        REQUIRE(deg.children[0].children.size() == 2);
        for (const EigenNode& grandchild : deg.children[0].children) {
            CHECK(grandchild.level == 2);
            CHECK(grandchild.leaf);
        }
        CHECK(collect_branches(tree).size() == 3);
    }
}

TEST_CASE("a cluster moving in lockstep becomes a scalar leaf with an exact tail") {
    GoogleMatrix gm = build_google(parse_edge_list("1\t2\n2\t3\n3\t4\n4\t1\n", "inline"));
    SpectralData sd = decompose_symmetric(build_symmetric_core(gm.g));
    const std::string text = R"({
        "order_terms": [
            {"order": 1, "entries": [
                {"i": 1, "j": 1, "value": -0.05}, {"i": 1, "j": 2, "value": 0.05},
                {"i": 2, "j": 2, "value": -0.05}, {"i": 2, "j": 3, "value": 0.05},
                {"i": 3, "j": 3, "value": -0.05}, {"i": 3, "j": 4, "value": 0.05},
                {"i": 4, "j": 4, "value": -0.05}, {"i": 4, "j": 1, "value": 0.05}
            ]}
        ]
    })";
    PerturbationSeries ps = perturbation_from(text, 4);
    SeriesMat tser = core_series(gm.g, ps, 3);
    ReductionTree tree = reduce_eigenvalues(sd, tser);

    // locate the multiplicity-2 root at lambda = 0
    const EigenNode* zero = nullptr;
    for (const EigenNode& root : tree.roots)
        if (root.multiplicity == 2) zero = &root;
    REQUIRE(zero != nullptr);
    CHECK(std::abs(zero->value) < 1e-12);
    CHECK(zero->leaf);
    CHECK(zero->children.empty());

    std::vector<EigenBranch> branches = collect_branches(tree);
    const EigenBranch* deg = nullptr;
    for (const EigenBranch& br : branches)
        if (br.multiplicity == 2) deg = &br;
    REQUIRE(deg != nullptr);
    // the circulant shift moves the whole cluster as lambda(chi) = -0.05 chi exactly
    CHECK(std::abs(deg->series.at(0)) < 1e-13);
    CHECK(deg->series.at(1) == doctest::Approx(-0.05).epsilon(1e-11));
    CHECK(std::abs(deg->series.at(2)) < 1e-11);
    CHECK(std::abs(deg->series.at(3)) < 1e-11);
}

TEST_CASE("eigenphase series composes the square root and guards the branch point") {
    SeriesScalar lam;
    lam.c = {0.3, 0.5, -0.2};
    for (int branch : {+1, -1}) {
        SeriesComplex mu = eigenphase_series(lam, branch, 6);
        for (double chi : {1e-3, 1e-2}) {
            const double lchi = series_eval(lam, chi);
            const cxd expect(lchi, branch * std::sqrt(1.0 - lchi * lchi));
            CHECK(std::abs(series_eval(mu, cxd(chi, 0.0)) - expect) < 1e-10);
        }
    }
    SeriesScalar unit;
    unit.c = {1.0, 0.5};
    CHECK_THROWS_AS(eigenphase_series(unit, +1, 3), NumericalError);
    CHECK_THROWS_AS(eigenphase_series(lam, 0, 3), std::invalid_argument);
}

TEST_CASE("rank series is the squared modulus of the amplitude series") {
    SeriesComplex amp;
    amp.c = {cxd(0.4, 0.1), cxd(-0.2, 0.3), cxd(0.05, -0.02)};
    SeriesScalar rank = rank_series(amp, 4);
    for (double chi : {0.0, 0.05, -0.03}) {
        const cxd n = series_eval(amp, cxd(chi, 0.0));
        CHECK(series_eval(rank, chi) == doctest::Approx(std::norm(n)).epsilon(1e-12));
    }
}

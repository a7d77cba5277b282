#include "doctest.h"

#include "qpr/google.hpp"
#include "qpr/graph.hpp"
#include "qpr/oracle.hpp"
#include "qpr/perturb.hpp"
#include "qpr/spectral.hpp"
#include "qpr/szegedy.hpp"

#include <cmath>
#include <complex>
#include <string>

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

template <class T>
Matrix<T> eval_mat_series(const Series<Matrix<T>>& s, double chi) {
    Matrix<T> acc = s.c.front();
    double w = 1.0;
    for (std::size_t r = 1; r < s.c.size(); ++r) {
        w *= chi;
        acc += w * s.c[r];
    }
    return acc;
}

} // namespace

TEST_CASE("walk operator series tracks the directly built perturbed walk") {
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kRand5Perturb, 5, "inline");
    WalkOperators wo = build_walk(gm.g);
    WalkSeries wser = walk_series(wo, gm.g, ps, 4);

    REQUIRE(wser.u.c.size() == 5);
    CHECK(max_abs(wser.u.c[0] - wo.u) < 1e-13);

    for (double chi : {5e-3, 2e-2}) {
        WalkOperators direct = oracle::walk_at(gm, ps, chi);
        CHECK(max_abs(eval_mat_series(wser.u, chi) - direct.u) < 2e-9);
        // the state rows follow the columns of the duplication basis
        for (std::size_t j = 0; j < wo.n; ++j) {
            const auto& pser = wser.psi[j];
            for (std::size_t i = 0; i < wo.n * wo.n; ++i) {
                double acc = 0.0, w = 1.0;
                for (std::size_t r = 0; r < pser.c.size(); ++r) {
                    acc += w * pser.c[r][i];
                    w *= chi;
                }
                CHECK(std::abs(acc - direct.a(i, j)) < 2e-9);
            }
        }
    }
}

TEST_CASE("walk projection series are idempotent order by order and sum to the identity") {
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kRand5Perturb, 5, "inline");
    PerturbationAnalysis an = analyze_perturbation(gm, ps, {}, 3);
    REQUIRE(an.phases_resolved);

    const std::size_t n2 = an.walk.n * an.walk.n;
    REQUIRE(an.projections.size() == an.walk_data.clusters.size());

    for (std::size_t h = 0; h < an.projections.size(); ++h) {
        const auto& pser = an.projections[h];
        for (std::size_t n = 0; n <= 3; ++n) {
            CMat conv(n2, n2);
            for (std::size_t r = 0; r <= n; ++r) conv += matmul(pser.at(r), pser.at(n - r));
            CHECK(max_abs(conv - pser.at(n)) < 1e-9);
        }
    }
    // completeness: coefficients of sum_h P_h(chi) vanish past the constant term
    for (std::size_t n = 0; n <= 3; ++n) {
        CMat sum(n2, n2);
        for (const auto& pser : an.projections) sum += pser.at(n);
        if (n == 0)
            CHECK(max_abs(sum - CMat::identity(n2)) < 1e-10);
        else
            CHECK(max_abs(sum) < 1e-9);
    }
}

TEST_CASE("transformation series integrates its generator and stays unitary") {
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kRand5Perturb, 5, "inline");
    PerturbationAnalysis an = analyze_perturbation(gm, ps, {}, 3);

    const std::size_t n2 = an.walk.n * an.walk.n;
    // V' = Q V: (r+1) V_{r+1} = sum_{s<=r} Q_s V_{r-s}
    for (std::size_t r = 0; r < 3; ++r) {
        CMat rhs(n2, n2);
        for (std::size_t s = 0; s <= r; ++s) rhs += matmul(an.qser.at(s), an.vser.at(r - s));
        CMat lhs = an.vser.at(r + 1);
        lhs *= cxd(double(r + 1), 0.0);
        CHECK(max_abs(lhs - rhs) < 1e-9);
    }
    // unitarity order by order: sum_{a+b=n} V_a^* V_b = [n == 0] I
    for (std::size_t n = 0; n <= 3; ++n) {
        CMat acc(n2, n2);
        for (std::size_t a = 0; a <= n; ++a) acc += matmul(adjoint(an.vser.at(a)), an.vser.at(n - a));
        if (n == 0)
            CHECK(max_abs(acc - CMat::identity(n2)) < 1e-12);
        else
            CHECK(max_abs(acc) < 1e-9);
    }
    // V maps unperturbed projections to perturbed ones: P_h(chi) = V P_h(0) V^*
    for (std::size_t h = 0; h < an.projections.size(); ++h) {
        for (std::size_t n = 0; n <= 3; ++n) {
            CMat acc(n2, n2);
            for (std::size_t a = 0; a <= n; ++a)
                acc += matmul(matmul(an.vser.at(a), an.projections[h].at(0)),
                              adjoint(an.vser.at(n - a)));
            CHECK(max_abs(acc - an.projections[h].at(n)) < 1e-8);
        }
    }
}

TEST_CASE("eigenphase and amplitude series agree with direct evaluation at small chi") {
    GoogleMatrix gm = build_google(parse_edge_list(kRand5, "inline"));
    PerturbationSeries ps = parse_perturbation(kRand5Perturb, 5, "inline");
    PerturbationAnalysis an = analyze_perturbation(gm, ps, {{0, 1}, {2, 2}}, 4);
    REQUIRE(an.phases_resolved);
    REQUIRE(an.expansions.size() == an.spectrum.pairs.size());

    const double chi = 5e-3;
    // each expanded eigenphase lands on an eigenvalue of the perturbed walk
    CMat uchi = to_complex(oracle::walk_at(gm, ps, chi).u);
    ComplexEig eig = eig_complex(uchi);
    for (const auto& e : an.expansions) {
        const cxd predicted = series_eval(e.mu, cxd(chi, 0.0));
        double best = 1e9;
        for (const cxd& mu : eig.values) best = std::min(best, std::abs(mu - predicted));
        CHECK(best < 1e-9);
    }

    // amplitude and rank series against the independent oracle
    for (std::size_t r = 0; r < an.requests.size(); ++r) {
        const auto& req = an.requests[r];
        const cxd amp_direct = oracle::amplitude_at(gm, ps, cxd(chi, 0.0), req.node, req.m);
        const cxd amp_series = series_eval(an.amplitudes[r], cxd(chi, 0.0));
        CHECK(std::abs(amp_series - amp_direct) < 1e-8);

        // the rank series truncates |N(chi)|^2 at order 4, so its defect at chi
        // is the order-5 tail: small in absolute terms and quintic in scaling
        const double err1 = std::abs(series_eval(an.ranks[r], chi) -
                                     oracle::rank_at(gm, ps, chi, req.node, req.m,
                                                     RankVariant::coherent));
        const double err2 = std::abs(series_eval(an.ranks[r], 0.5 * chi) -
                                     oracle::rank_at(gm, ps, 0.5 * chi, req.node, req.m,
                                                     RankVariant::coherent));
        CHECK(err1 < 2e-4);
        CHECK(err2 <= err1 / 12.0 + 1e-12);
    }
}

TEST_CASE("analysis rejects rank requests when a unit-modulus eigenvalue moves") {
    // reversible 2-node graph: lambda = 1 stays put, every series is fine
    GoogleMatrix gm2 = build_google(parse_edge_list("1\t2\n2\t1\n", "inline"));
    const std::string move = R"({
        "order_terms": [
            {"order": 1, "entries": [
                {"i": 1, "j": 1, "value": 0.1}, {"i": 1, "j": 2, "value": -0.1}
            ]}
        ]
    })";
    PerturbationSeries ps2 = parse_perturbation(move, 2, "inline");
    PerturbationAnalysis an2 = analyze_perturbation(gm2, ps2, {{0, 1}}, 3);
    CHECK(an2.phases_resolved);
    CHECK_FALSE(an2.ranks.empty());

    // chain with a sink: top eigenvalue of the symmetrized core is below 1 and
    // all pairs expand, so rank requests work there too
    GoogleMatrix gm3 = build_google(parse_edge_list("1\t2\n2\t1\n2\t3\n", "inline"));
    const std::string generic = R"({
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
    PerturbationSeries ps3 = parse_perturbation(generic, 3, "inline");
    PerturbationAnalysis an3 = analyze_perturbation(gm3, ps3, {{0, 1}}, 3);
    CHECK(an3.phases_resolved);
    CHECK_FALSE(an3.ranks.empty());
}

#include "qpr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qpr/acceptance.hpp"
#include "qpr/bounds.hpp"
#include "qpr/errors.hpp"
#include "qpr/google.hpp"
#include "qpr/graph.hpp"
#include "qpr/oracle.hpp"
#include "qpr/perturb.hpp"
#include "qpr/report.hpp"
#include "qpr/spectral.hpp"
#include "qpr/szegedy.hpp"

namespace qpr {
namespace {

using report::Artifact;
using report::cell_bool;
using report::cell_empty;
using report::cell_int;
using report::cell_num;
using report::cell_size;
using report::cell_str;
using report::OutputFormat;
using report::Section;
using report::Table;

// Walk matrices are dense n^2 x n^2; refuse anything past desk scale.
constexpr std::size_t kDefaultCap = 16;

struct CommonOpts {
    std::string graph;
    double alpha = 0.85;
    std::string format = "json";
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--graph", o.graph, "edge-list TSV file")->required();
    cmd->add_option("--alpha", o.alpha, "damping factor in (0,1)");
    cmd->add_option("--format", o.format, "output format: json or csv");
    cmd->add_option("--out", o.out, "output path (stdout when omitted)");
}

std::string ssize(std::size_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%zu", v);
    return buf;
}

/** Start state from file: one amplitude per line as "re" or "re im", '#'
 *  comments allowed.  Normalized to unit length. */
CVec load_start_state(const std::string& path, std::size_t dim) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open start-state file: " + path);
    CVec v;
    v.reserve(dim);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double re = 0.0, im = 0.0;
        if (!(ls >> re)) continue;
        if (!(ls >> im)) im = 0.0;
        std::string extra;
        if (ls >> extra) throw ParseError(path + ": more than two fields on a line");
        v.emplace_back(re, im);
    }
    if (v.size() != dim)
        throw ParseError(path + ": expected " + ssize(dim) + " amplitudes, got " +
                         ssize(v.size()));
    double n2 = 0.0;
    for (const auto& z : v) n2 += std::norm(z);
    if (n2 <= 0.0) throw ParseError(path + ": start state is identically zero");
    const double s = 1.0 / std::sqrt(n2);
    for (auto& z : v) z *= s;
    return v;
}

/** 1-based node picks -> sorted unique 0-based indices; empty means all. */
std::vector<std::size_t> resolve_nodes(const std::vector<long>& picked, std::size_t n) {
    std::vector<std::size_t> nodes;
    if (picked.empty()) {
        for (std::size_t i = 0; i < n; ++i) nodes.push_back(i);
        return nodes;
    }
    std::set<std::size_t> seen;
    for (long v : picked) {
        if (v < 1 || static_cast<std::size_t>(v) > n)
            throw ParseError("node index " + std::to_string(v) + " outside 1.." + ssize(n));
        seen.insert(static_cast<std::size_t>(v) - 1);
    }
    nodes.assign(seen.begin(), seen.end());
    return nodes;
}

void check_cap(std::size_t n, std::size_t cap) {
    if (n > cap)
        throw ScaleError("graph has " + ssize(n) + " nodes, cap is " + ssize(cap) +
                         " (dense walk matrices are n^2 x n^2)");
}

Section run_section(const std::string& command, const CommonOpts& o, std::size_t n) {
    Section s;
    s.name = "run";
    s.add("command", cell_str(command));
    s.add("graph", cell_str(o.graph));
    s.add("alpha", cell_num(o.alpha));
    s.add("n", cell_size(n));
    return s;
}

// ---- rank-classical --------------------------------------------------------

struct ClassicalOpts {
    CommonOpts common;
    double tol = 1e-12;
    int max_iter = 100000;
};

void run_rank_classical(const ClassicalOpts& o, const OutputFormat fmt) {
    const DirectedGraph graph = load_edge_list(o.common.graph);
    const GoogleMatrix gm = build_google(graph, o.common.alpha);
    const PageRankResult pr = classical_pagerank(gm, o.tol, o.max_iter);

    Artifact art;
    Section run = run_section("rank-classical", o.common, gm.size());
    run.add("tol", cell_num(o.tol));
    run.add("iterations", cell_int(pr.iterations));
    run.add("residual", cell_num(pr.residual));
    art.sections.push_back(std::move(run));

    Table scores;
    scores.name = "scores";
    scores.columns = {"node", "score"};
    for (std::size_t i = 0; i < pr.scores.size(); ++i)
        scores.add_row({cell_size(i + 1), cell_num(pr.scores[i])});
    art.tables.push_back(std::move(scores));

    report::emit(art.render(fmt), o.common.out);
}

// ---- rank-quantum ----------------------------------------------------------

struct QuantumOpts {
    CommonOpts common;
    std::string variant = "coherent";
    std::vector<long> m{1};
    std::vector<long> t;
    std::vector<long> nodes;
    std::string psi0_path;
    std::size_t cap = kDefaultCap;
};

void run_rank_quantum(const QuantumOpts& o, const OutputFormat fmt) {
    const RankVariant variant = parse_variant(o.variant);
    const DirectedGraph graph = load_edge_list(o.common.graph);
    const GoogleMatrix gm = build_google(graph, o.common.alpha);
    check_cap(gm.size(), o.cap);
    for (long m : o.m)
        if (m < 0) throw ParseError("step count m must be nonnegative");
    for (long t : o.t)
        if (t < 1) throw ParseError("average window t must be positive");

    const WalkOperators wo = build_walk(gm.g, o.cap);
    const SpectralData sd = decompose_symmetric(build_symmetric_core(gm.g));
    const WalkSpectrum ws = walk_eigenpairs(wo, sd);
    const CVec psi0 = o.psi0_path.empty() ? uniform_start_state(wo)
                                          : load_start_state(o.psi0_path, wo.n * wo.n);
    const std::vector<std::size_t> nodes = resolve_nodes(o.nodes, gm.size());
    const bool summed = variant == RankVariant::summed;

    Artifact art;
    Section run = run_section("rank-quantum", o.common, gm.size());
    run.add("variant", cell_str(o.variant));
    run.add("walk_dim", cell_size(wo.n * wo.n));
    run.add("psi0", cell_str(o.psi0_path.empty() ? "uniform" : o.psi0_path));
    run.add("subspace_residual", cell_num(walk_subspace_residual(ws, psi0)));
    art.sections.push_back(std::move(run));

    // limit and mixing bound are the summed-variant theory; the columns stay
    // empty under the coherent variant
    Table inst;
    inst.name = "instantaneous";
    inst.columns = {"node", "m", "value", "limit"};
    for (std::size_t node : nodes) {
        const double lim = summed ? limit_quantum_rank(ws, psi0, node) : 0.0;
        for (long m : o.m)
            inst.add_row({cell_size(node + 1), cell_int(m),
                          cell_num(quantum_rank(ws, psi0, node, m, variant)),
                          summed ? cell_num(lim) : cell_empty()});
    }
    art.tables.push_back(std::move(inst));

    if (!o.t.empty()) {
        Table avg;
        avg.name = "averaged";
        avg.columns = {"node", "t", "average", "limit", "mixing_bound"};
        for (std::size_t node : nodes) {
            const double lim = summed ? limit_quantum_rank(ws, psi0, node) : 0.0;
            for (long t : o.t)
                avg.add_row({cell_size(node + 1), cell_int(t),
                             cell_num(average_quantum_rank(ws, psi0, node, t, variant)),
                             summed ? cell_num(lim) : cell_empty(),
                             summed ? cell_num(mixing_bound(ws, psi0, t)) : cell_empty()});
        }
        art.tables.push_back(std::move(avg));
    }

    report::emit(art.render(fmt), o.common.out);
}

// ---- perturb ---------------------------------------------------------------

struct PerturbOpts {
    CommonOpts common;
    std::string perturbation;
    std::size_t order = 4;
    std::vector<long> m{1};
    std::vector<long> nodes;
    std::vector<double> chi;
    std::string psi0_path;
    std::size_t cap = kDefaultCap;
    bool no_rank = false;
};

Section radius_section(const RadiusEstimate& re) {
    Section s;
    s.name = "radius";
    s.add("r_entry", cell_num(re.r_entry));
    s.add("r_tree", cell_num(re.r_tree));
    s.add("r1", cell_num(re.r1));
    s.add("varrho", cell_num(re.varrho));
    s.add("r2", cell_num(re.r2));
    s.add("r0", cell_num(re.r0));
    s.add("resolved", cell_bool(re.resolved));
    return s;
}

Section ledger_section(const BoundLedger& bl) {
    Section s;
    s.name = "ledger";
    s.add("a0", cell_num(bl.prefix.a0));
    s.add("b0", cell_num(bl.prefix.b0));
    s.add("g_min", cell_num(bl.prefix.g_min));
    s.add("t_max", cell_num(bl.prefix.t_max));
    s.add("delta", cell_num(bl.prefix.delta));
    s.add("eps0", cell_num(bl.prefix.eps0));
    s.add("a1", cell_num(bl.prefix.a1));
    s.add("b1", cell_num(bl.prefix.b1));
    s.add("a2", cell_num(bl.prefix.a2));
    s.add("b2", cell_num(bl.prefix.b2));
    s.add("a3", cell_num(bl.prefix.a3));
    s.add("b3", cell_num(bl.prefix.b3));
    s.add("walk_dim", cell_size(bl.walk_dim));
    s.add("pair_count", cell_size(bl.pair_count));
    s.add("cluster_count", cell_size(bl.cluster_count));
    s.add("d_hat_min", cell_num(bl.d_hat_min));
    s.add("a6", cell_num(bl.a6));
    s.add("b6", cell_num(bl.b6));
    s.add("q0", cell_num(bl.q0));
    s.add("a7", cell_num(bl.a7));
    s.add("b7", cell_num(bl.b7));
    s.add("b9", cell_num(bl.b9));
    s.add("eps1", cell_num(bl.eps1));
    s.add("a12", cell_num(bl.a12));
    s.add("b12", cell_num(bl.b12));
    s.add("a13", cell_num(bl.a13));
    s.add("b13", cell_num(bl.b13));
    s.add("b14", cell_num(bl.b14));
    s.add("bstar", cell_num(bl.bstar));
    return s;
}

std::vector<double> default_chi_grid(double r0) {
    double start = 0.3 * r0;
    if (!std::isfinite(start) || start > 0.1) start = 0.1;
    return oracle::dyadic_grid(start, 6);
}

void run_perturb(const PerturbOpts& o, const OutputFormat fmt) {
    // the rank series expands |N(chi)|^2, which is the coherent variant
    const RankVariant variant = RankVariant::coherent;
    if (o.order < 1 || o.order > 8)
        throw ParseError("order must lie in 1..8");
    for (long m : o.m)
        if (m < 0) throw ParseError("step count m must be nonnegative");
    const DirectedGraph graph = load_edge_list(o.common.graph);
    const GoogleMatrix gm = build_google(graph, o.common.alpha);
    check_cap(gm.size(), o.cap);
    const PerturbationSeries ps = load_perturbation(o.perturbation, gm.size());
    const std::vector<std::size_t> nodes = resolve_nodes(o.nodes, gm.size());

    std::optional<CVec> psi0;
    if (!o.psi0_path.empty())
        psi0 = load_start_state(o.psi0_path, gm.size() * gm.size());

    std::vector<RankSeriesRequest> requests;
    if (!o.no_rank)
        for (std::size_t node : nodes)
            for (long m : o.m) requests.push_back({node, m});

    const PerturbationAnalysis an = analyze_perturbation(
        gm, ps, requests, o.order, psi0 ? &*psi0 : nullptr);
    const RadiusEstimate re = convergence_radius(gm, ps, an.core, an.tree, an.branches);
    const BoundLedger bl = error_bounds(gm, ps, an.spectrum, an.walk_data, re);

    std::vector<double> grid = o.chi;
    if (grid.empty()) {
        grid = default_chi_grid(re.r0);
    } else {
        const double chi_max = 0.3 * re.r0;
        for (double chi : grid) {
            if (!std::isfinite(chi)) throw ParseError("chi values must be finite");
            if (std::isfinite(chi_max) && std::abs(chi) > chi_max)
                throw ChiDomainError("chi = " + std::to_string(chi) +
                                     " outside certified region |chi| <= " +
                                     std::to_string(chi_max));
        }
    }

    Artifact art;
    Section run = run_section("perturb", o.common, gm.size());
    run.add("perturbation", cell_str(o.perturbation));
    run.add("order", cell_size(o.order));
    run.add("variant", cell_str("coherent"));
    run.add("walk_dim", cell_size(gm.size() * gm.size()));
    run.add("phases_resolved", cell_bool(an.phases_resolved));
    art.sections.push_back(std::move(run));
    art.sections.push_back(radius_section(re));
    art.sections.push_back(ledger_section(bl));

    Table roots;
    roots.name = "root_radii";
    roots.columns = {"cluster", "origin", "multiplicity", "radius"};
    for (std::size_t h = 0; h < re.root_radii.size(); ++h)
        roots.add_row({cell_size(h), cell_num(an.core.clusters[h].value),
                       cell_int(an.core.clusters[h].multiplicity),
                       cell_num(re.root_radii[h])});
    art.tables.push_back(std::move(roots));

    Table tser;
    tser.name = "t_series";
    tser.columns = {"i", "j", "n", "value"};
    for (std::size_t i = 0; i < gm.size(); ++i)
        for (std::size_t j = 0; j < gm.size(); ++j)
            for (std::size_t n = 0; n <= o.order; ++n)
                tser.add_row({cell_size(i + 1), cell_size(j + 1), cell_size(n),
                              cell_num(an.tser.c[n](i, j))});
    art.tables.push_back(std::move(tser));

    Table branches;
    branches.name = "branches";
    branches.columns = {"branch", "origin", "multiplicity", "depth"};
    for (std::size_t b = 0; b < an.branches.size(); ++b)
        branches.add_row({cell_size(b), cell_num(an.branches[b].origin),
                          cell_int(an.branches[b].multiplicity),
                          cell_int(an.branches[b].depth)});
    art.tables.push_back(std::move(branches));

    Table lser;
    lser.name = "lambda_series";
    lser.columns = {"branch", "n", "value"};
    for (std::size_t b = 0; b < an.branches.size(); ++b)
        for (std::size_t n = 0; n <= o.order; ++n)
            lser.add_row({cell_size(b), cell_size(n),
                          cell_num(an.branches[b].series.at(n))});
    art.tables.push_back(std::move(lser));

    if (!requests.empty()) {
        Table iq;
        iq.name = "iq_series";
        iq.columns = {"node", "m", "n", "value"};
        for (std::size_t r = 0; r < requests.size(); ++r)
            for (std::size_t n = 0; n <= o.order; ++n)
                iq.add_row({cell_size(requests[r].node + 1), cell_int(requests[r].m),
                            cell_size(n), cell_num(an.ranks[r].at(n))});
        art.tables.push_back(std::move(iq));

        Table trunc;
        trunc.name = "truncation";
        trunc.columns = {"chi", "quantity", "oracle", "truncated",
                         "abs_error", "tail_bound", "within_bound"};
        for (std::size_t r = 0; r < requests.size(); ++r) {
            const std::string qty = "iq(node=" + ssize(requests[r].node + 1) +
                                    ",m=" + std::to_string(requests[r].m) + ")";
            const auto rows = oracle::compare_truncation(
                gm, ps, an.ranks[r], requests[r].node, requests[r].m, variant, grid,
                psi0 ? &*psi0 : nullptr);
            for (const auto& row : rows) {
                const double tail = bl.rank_tail_bound(requests[r].m, o.order, row.chi);
                trunc.add_row({cell_num(row.chi), cell_str(qty), cell_num(row.exact),
                               cell_num(row.truncated), cell_num(row.error),
                               cell_num(tail), cell_bool(row.error <= tail)});
            }
        }
        art.tables.push_back(std::move(trunc));
    }

    report::emit(art.render(fmt), o.common.out);
}

// ---- validate --------------------------------------------------------------

struct ValidateOpts {
    std::string fixtures = QPR_FIXTURE_DIR;
    unsigned seed = 20240817;
};

int run_validate(const ValidateOpts& o) {
    const std::size_t failures = run_acceptance(std::cout, o.fixtures, o.seed);
    return failures == 0 ? 0 : 1;
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"classical and quantum PageRank with certified perturbation analysis"};
    app.require_subcommand(1);

    ClassicalOpts copts;
    CLI::App* rc = app.add_subcommand("rank-classical", "stationary PageRank scores");
    add_common(rc, copts.common);
    rc->add_option("--tol", copts.tol, "l1 convergence tolerance");
    rc->add_option("--max-iter", copts.max_iter, "power-iteration cap");

    QuantumOpts qopts;
    CLI::App* rq = app.add_subcommand("rank-quantum", "quantum walk rank report");
    add_common(rq, qopts.common);
    rq->add_option("--variant", qopts.variant, "rank variant: coherent or summed");
    rq->add_option("--m", qopts.m, "double-step counts")->expected(-1);
    rq->add_option("--t", qopts.t, "Cesaro average windows")->expected(-1);
    rq->add_option("--node", qopts.nodes, "1-based node filter")->expected(-1);
    rq->add_option("--psi0", qopts.psi0_path, "start-state file (re im per line)");
    rq->add_option("--cap", qopts.cap, "node-count cap");

    PerturbOpts popts;
    CLI::App* pb = app.add_subcommand("perturb", "series, radii, bounds, oracle check");
    add_common(pb, popts.common);
    pb->add_option("--perturbation", popts.perturbation, "perturbation JSON file")->required();
    pb->add_option("--order", popts.order, "truncation order K in 1..8");
    pb->add_option("--m", popts.m, "double-step counts")->expected(-1);
    pb->add_option("--node", popts.nodes, "1-based node filter")->expected(-1);
    pb->add_option("--chi", popts.chi, "comparison grid (default: dyadic in 0.3*r0)")
        ->expected(-1);
    pb->add_option("--psi0", popts.psi0_path, "start-state file (re im per line)");
    pb->add_option("--cap", popts.cap, "node-count cap");
    pb->add_flag("--no-rank", popts.no_rank, "skip rank series and oracle comparison");

    ValidateOpts vopts;
    CLI::App* va = app.add_subcommand("validate", "run the acceptance suite");
    va->add_option("--fixtures", vopts.fixtures, "fixture directory");
    va->add_option("--seed", vopts.seed, "seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? EXIT_OK : EXIT_PARSE;
    }

    try {
        if (*va) return run_validate(vopts);
        if (*rc) {
            run_rank_classical(copts, report::parse_format(copts.common.format));
        } else if (*rq) {
            run_rank_quantum(qopts, report::parse_format(qopts.common.format));
        } else if (*pb) {
            run_perturb(popts, report::parse_format(popts.common.format));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return EXIT_OK;
}

} // namespace qpr

#include "qpr/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qpr/errors.hpp"

namespace qpr {

namespace {

std::vector<double> entry_deltas(const PerturbationSeries& ps, std::size_t i, std::size_t j) {
    std::vector<double> d(ps.terms.size());
    for (std::size_t l = 0; l < ps.terms.size(); ++l) d[l] = ps.terms[l](i, j);
    return d;
}

template <class T>
std::vector<Matrix<T>> materialize(const Series<Matrix<T>>& s, std::size_t order) {
    std::vector<Matrix<T>> fam;
    fam.reserve(order + 1);
    for (std::size_t r = 0; r <= order; ++r) fam.push_back(s.at(r));
    return fam;
}

} // namespace

// ---------------------------------------------------------------------------
// Symmetrized-core side
// ---------------------------------------------------------------------------

SeriesMat core_series(const Mat& g, const PerturbationSeries& ps, std::size_t order) {
    const std::size_t n = g.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!(g(i, j) > 0.0))
                throw AdmissibilityError(
                    "core series requires a strictly positive transition matrix");

    SeriesMat out;
    out.c.assign(order + 1, Mat(n, n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const SeriesScalar sij = sqrt_series(g(i, j), entry_deltas(ps, i, j), order);
            const SeriesScalar sji = sqrt_series(g(j, i), entry_deltas(ps, j, i), order);
            const SeriesScalar prod = series_mul(sij, sji, order);
            for (std::size_t r = 0; r <= order; ++r) {
                out.c[r](i, j) = prod.c[r];
                out.c[r](j, i) = prod.c[r];
            }
        }
    }
    return out;
}

Mat core_first_order(const Mat& g, const Mat& g1) {
    const std::size_t n = g.rows();
    Mat t1(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double t = std::sqrt(g(i, j) * g(j, i));
            t1(i, j) = (g1(i, j) * g(j, i) + g(i, j) * g1(j, i)) / (2.0 * t);
        }
    return t1;
}

SeriesMat core_projection_series(const SpectralData& sd, std::size_t h,
                                 const SeriesMat& tser, std::size_t order) {
    const auto& cl = sd.clusters.at(h);
    const auto fam = materialize(tser, order);
    const auto node = make_node_resolvent(cl.projection, cl.reduced_resolvent, order + 1);
    SeriesMat out;
    out.c.reserve(order + 1);
    out.c.push_back(cl.projection);
    for (std::size_t l = 1; l <= order; ++l)
        out.c.push_back(projection_coeff(fam, node, l));
    return out;
}

SeriesScalar core_eigenvalue_series(const SpectralData& sd, std::size_t h,
                                    const SeriesMat& tser, std::size_t order) {
    const auto& cl = sd.clusters.at(h);
    if (cl.multiplicity != 1)
        throw NumericalError(
            "core_eigenvalue_series handles simple eigenvalues only; use "
            "reduce_eigenvalues for degenerate clusters");
    const auto fam = materialize(tser, order);
    const auto node = make_node_resolvent(cl.projection, cl.reduced_resolvent, order + 1);
    SeriesScalar out;
    out.c.reserve(order + 1);
    out.c.push_back(cl.value);
    for (std::size_t n = 1; n <= order; ++n)
        out.c.push_back(eigenvalue_coeff(fam, node, n));
    return out;
}

// ---------------------------------------------------------------------------
// Recursive reduction of degenerate eigenvalues
// ---------------------------------------------------------------------------

namespace {

struct ClusterRange {
    std::size_t begin = 0, end = 0; // index range into a descending value list
    double mean = 0.0;
};

std::vector<ClusterRange> cluster_descending(const std::vector<double>& vals, double tol) {
    std::vector<ClusterRange> out;
    std::size_t begin = 0;
    for (std::size_t k = 1; k <= vals.size(); ++k) {
        if (k == vals.size() || std::abs(vals[k] - vals[k - 1]) > tol) {
            ClusterRange r{begin, k, 0.0};
            for (std::size_t i = begin; i < k; ++i) r.mean += vals[i];
            r.mean /= static_cast<double>(k - begin);
            out.push_back(r);
            begin = k;
        }
    }
    return out;
}

// Expands `node`, an eigenvalue of fam[0] with big-space eigenbasis `basis`,
// projection `proj` and node resolvent `res`.  fam has >= 1 coefficients.
void expand_node(EigenNode& node, const std::vector<Mat>& fam, const Mat& basis,
                 const Mat& proj, const NodeResolvent<double>& res,
                 double cluster_tol, double zero_tol, ReductionTree& tree) {
    const std::size_t len = fam.size();
    const std::size_t dim = fam[0].rows();

    if (node.multiplicity == 1) {
        node.leaf = true;
        node.tail.c.assign(1, node.value);
        for (std::size_t n = 1; n < len; ++n)
            node.tail.c.push_back(eigenvalue_coeff(fam, res, n));
        return;
    }
    if (len < 2) {
        // degenerate but out of expansion order: branches agree to this order
        node.leaf = true;
        node.tail.c.assign(1, node.value);
        return;
    }

    // child family: level-operator coefficients shifted down by one power
    std::vector<Mat> child_fam;
    child_fam.reserve(len - 1);
    for (std::size_t j = 1; j < len; ++j)
        child_fam.push_back(level_coeff(fam, res, j));

    const std::size_t m = static_cast<std::size_t>(node.multiplicity);
    auto restrict_to_basis = [&](const Mat& big) {
        Mat small(m, m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                double acc = 0.0;
                for (std::size_t i = 0; i < dim; ++i)
                    for (std::size_t j = 0; j < dim; ++j)
                        acc += basis(i, a) * big(i, j) * basis(j, b);
                small(a, b) = acc;
            }
        return small;
    };

    // when every restricted coefficient is a multiple of the identity the
    // branch is exact with no further reduction (and never splits)
    {
        bool scalar = true;
        std::vector<double> diag;
        for (const auto& cf : child_fam) {
            const Mat w = restrict_to_basis(cf);
            const double mean = trace(w) / static_cast<double>(m);
            double dev = 0.0;
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < m; ++b)
                    dev = std::max(dev, std::abs(w(a, b) - (a == b ? mean : 0.0)));
            if (dev > zero_tol) { scalar = false; break; }
            diag.push_back(mean);
        }
        if (scalar) {
            node.leaf = true;
            node.tail.c.assign(1, node.value);
            for (double d : diag) node.tail.c.push_back(d);
            return;
        }
    }

    Mat w = restrict_to_basis(child_fam[0]);

    SymEig weig = eig_sym(w);

    // re-center when a child sits on the artificial zero of the level operator
    double shift = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
    double max_abs_eta = 0.0;
    for (double e : weig.values) {
        min_abs = std::min(min_abs, std::abs(e));
        max_abs_eta = std::max(max_abs_eta, std::abs(e));
    }
    if (min_abs < zero_tol) {
        shift = 1.0 + max_abs_eta;
        for (std::size_t j = 0; j < child_fam.size(); ++j) {
            const Mat pj = (j == 0) ? proj : projection_coeff(fam, res, j);
            child_fam[j] += shift * pj;
        }
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "level %d eigenvalue %.6g: child spectrum touches zero, "
                      "re-centered by %.6g", node.level, node.value, shift);
        tree.notes.emplace_back(buf);
    }
    node.shift = shift;

    // descending child eigenvalues with their basis columns
    std::vector<double> eta(m);
    Mat evec(m, m);
    for (std::size_t k = 0; k < m; ++k) {
        eta[k] = weig.values[m - 1 - k] + shift;
        for (std::size_t r = 0; r < m; ++r) evec(r, k) = weig.vectors(r, m - 1 - k);
    }

    const auto ranges = cluster_descending(eta, cluster_tol);

    // sibling projections in the big space
    std::vector<Mat> child_proj(ranges.size());
    std::vector<Mat> child_basis(ranges.size());
    for (std::size_t c = 0; c < ranges.size(); ++c) {
        const auto& r = ranges[c];
        child_basis[c] = Mat(dim, r.end - r.begin);
        for (std::size_t k = r.begin; k < r.end; ++k)
            for (std::size_t i = 0; i < dim; ++i) {
                double acc = 0.0;
                for (std::size_t a = 0; a < m; ++a) acc += basis(i, a) * evec(a, k);
                child_basis[c](i, k - r.begin) = acc;
            }
        child_proj[c] = Mat(dim, dim);
        for (std::size_t k = 0; k < r.end - r.begin; ++k) {
            Vec col(dim);
            for (std::size_t i = 0; i < dim; ++i) col[i] = child_basis[c](i, k);
            add_outer(child_proj[c], col, col);
        }
    }

    for (std::size_t c = 0; c < ranges.size(); ++c) {
        EigenNode child;
        child.level = node.level + 1;
        child.shifted_value = ranges[c].mean;
        child.value = ranges[c].mean - shift;
        child.multiplicity = static_cast<int>(ranges[c].end - ranges[c].begin);

        double gap = std::abs(ranges[c].mean); // artificial zero eigenvalue
        Mat resolvent(dim, dim);
        for (std::size_t o = 0; o < ranges.size(); ++o) {
            if (o == c) continue;
            const double diff = ranges[o].mean - ranges[c].mean;
            gap = std::min(gap, std::abs(diff));
            resolvent += (1.0 / diff) * child_proj[o];
        }
        if (gap <= 0.0)
            throw NumericalError("reduce_eigenvalues: zero spectral gap at level " +
                                 std::to_string(child.level));
        const Mat complement = Mat::identity(dim) - proj;
        resolvent += (-1.0 / ranges[c].mean) * complement;
        child.resolvent_gap = gap;
        child.resolvent_norm = op_norm(resolvent);

        const auto child_res = make_node_resolvent(child_proj[c], resolvent, child_fam.size());
        expand_node(child, child_fam, child_basis[c], child_proj[c], child_res,
                    cluster_tol, zero_tol, tree);
        node.children.push_back(std::move(child));
    }
}

} // namespace

ReductionTree reduce_eigenvalues(const SpectralData& sd, const SeriesMat& tser,
                                 double cluster_tol, double zero_tol) {
    ReductionTree tree;
    tree.order = tser.order();
    const auto fam = materialize(tser, tser.order());
    for (std::size_t h = 0; h < sd.clusters.size(); ++h) {
        const auto& cl = sd.clusters[h];
        EigenNode root;
        root.level = 0;
        root.value = cl.value;
        root.shifted_value = cl.value;
        root.multiplicity = cl.multiplicity;
        root.resolvent_gap = cl.isolation;
        root.resolvent_norm = op_norm(cl.reduced_resolvent);
        const auto res = make_node_resolvent(cl.projection, cl.reduced_resolvent, fam.size());
        expand_node(root, fam, cl.basis, cl.projection, res, cluster_tol, zero_tol, tree);
        tree.roots.push_back(std::move(root));
    }
    return tree;
}

namespace {

void collect_from(const EigenNode& node, double origin, std::vector<double>& prefix,
                  std::size_t order, std::vector<EigenBranch>& out) {
    if (node.leaf) {
        EigenBranch b;
        b.origin = origin;
        b.multiplicity = node.multiplicity;
        b.depth = node.level;
        b.series.c = prefix;
        for (double v : node.tail.c) b.series.c.push_back(v);
        b.series.c.resize(order + 1, 0.0);
        out.push_back(std::move(b));
        return;
    }
    prefix.push_back(node.value);
    for (const auto& child : node.children) collect_from(child, origin, prefix, order, out);
    prefix.pop_back();
}

} // namespace

std::vector<EigenBranch> collect_branches(const ReductionTree& tree) {
    std::vector<EigenBranch> out;
    for (const auto& root : tree.roots) {
        std::vector<double> prefix;
        collect_from(root, root.value, prefix, tree.order, out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Walk-operator side
// ---------------------------------------------------------------------------

WalkSeries walk_series(const WalkOperators& wo, const Mat& g,
                       const PerturbationSeries& ps, std::size_t order) {
    const std::size_t n = wo.n;
    const std::size_t n2 = n * n;
    WalkSeries out;
    out.psi.assign(n, SeriesVec{});
    for (std::size_t j = 0; j < n; ++j) out.psi[j].c.assign(order + 1, Vec(n2, 0.0));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const SeriesScalar s = sqrt_series(g(j, k), entry_deltas(ps, j, k), order);
            for (std::size_t r = 0; r <= order; ++r) out.psi[j].c[r][j * n + k] = s.c[r];
        }

    out.u.c.assign(order + 1, Mat(n2, n2));
    out.u.c[0] = wo.u;
    for (std::size_t r = 1; r <= order; ++r) {
        Mat b(n2, n2);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t a = 0; a <= r; ++a)
                add_outer(b, out.psi[j].c[a], out.psi[j].c[r - a]);
        // left-multiplying by the swap permutation reorders rows
        Mat& ur = out.u.c[r];
        for (std::size_t jj = 0; jj < n; ++jj)
            for (std::size_t kk = 0; kk < n; ++kk) {
                const std::size_t dst = jj * n + kk;
                const std::size_t src = kk * n + jj;
                for (std::size_t col = 0; col < n2; ++col)
                    ur(dst, col) = 2.0 * b(src, col);
            }
    }
    return out;
}

SeriesCMat walk_projection_series(const WalkSpectralData& wsd, std::size_t h,
                                  const SeriesCMat& user, std::size_t order) {
    const auto& cl = wsd.clusters.at(h);
    const auto fam = materialize(user, order);
    const auto node = make_node_resolvent(cl.projection, wsd.reduced_resolvent(h), order + 1);
    SeriesCMat out;
    out.c.reserve(order + 1);
    out.c.push_back(cl.projection);
    for (std::size_t l = 1; l <= order; ++l)
        out.c.push_back(projection_coeff(fam, node, l));
    return out;
}

SeriesCMat transformation_generator(const std::vector<SeriesCMat>& projections,
                                    std::size_t order) {
    if (projections.empty())
        throw std::invalid_argument("transformation_generator: no projections");
    const std::size_t dim = projections.front().c.front().rows();
    SeriesCMat out;
    out.c.assign(order + 1, CMat(dim, dim));
    for (std::size_t n = 0; n <= order; ++n) {
        CMat q(dim, dim);
        for (const auto& ph : projections)
            for (std::size_t a = 0; a <= n; ++a) {
                const std::size_t b = n - a;
                CMat term = matmul(ph.at(a), ph.at(b + 1));
                term *= cxd(static_cast<double>(b + 1), 0.0);
                q += term;
            }
        q *= cxd(-1.0, 0.0);
        out.c[n] = std::move(q);
    }
    return out;
}

SeriesCMat transformation_series(const SeriesCMat& q, std::size_t order) {
    const std::size_t dim = q.c.front().rows();
    SeriesCMat v;
    v.c.reserve(order + 1);
    v.c.push_back(CMat::identity(dim));
    for (std::size_t n = 1; n <= order; ++n) {
        CMat acc(dim, dim);
        for (std::size_t j = 0; j < n; ++j) acc += matmul(q.at(j), v.c[n - 1 - j]);
        acc *= cxd(1.0 / static_cast<double>(n), 0.0);
        v.c.push_back(std::move(acc));
    }
    return v;
}

SeriesComplex eigenphase_series(const SeriesScalar& lambda_series, int branch,
                                std::size_t order) {
    if (branch != 1 && branch != -1)
        throw std::invalid_argument("eigenphase_series: branch must be +-1");
    const double lam0 = lambda_series.c.front();
    if (std::abs(lam0) >= 1.0 - 1e-12)
        throw NumericalError(
            "eigenphase_series: unit-modulus origin has no analytic eigenphase "
            "expansion (branch point)");
    SeriesScalar y = series_mul(lambda_series, lambda_series, order);
    for (auto& c : y.c) c = -c;
    y.c[0] += 1.0;
    std::vector<double> deltas(y.c.begin() + 1, y.c.end());
    const SeriesScalar s = sqrt_series(y.c[0], deltas, order);
    SeriesComplex mu;
    mu.c.reserve(order + 1);
    for (std::size_t r = 0; r <= order; ++r)
        mu.c.push_back(cxd(lambda_series.at(r), branch * s.at(r)));
    return mu;
}

SeriesComplex amplitude_series(const WalkSpectrum& ws,
                               const std::vector<PairExpansion>& expansions,
                               const CVec& psi0, std::size_t node, long m,
                               std::size_t order) {
    const std::size_t n = ws.n;
    if (node >= n) throw std::invalid_argument("amplitude_series: node out of range");
    if (m < 0) throw std::invalid_argument("amplitude_series: negative step count");

    SeriesComplex total;
    total.c.assign(order + 1, cxd{});

    std::vector<bool> covered(ws.pairs.size(), false);
    for (const auto& e : expansions) {
        covered.at(static_cast<std::size_t>(e.pair_index)) = true;

        const SeriesComplex a1 =
            series_pow(e.mu, static_cast<unsigned long>(2 * m), order, cxd(1.0, 0.0));
        SeriesComplex wser, sser;
        wser.c.reserve(order + 1);
        sser.c.reserve(order + 1);
        for (std::size_t r = 0; r <= order; ++r) {
            const CVec& vr = e.vec.c.at(r);
            wser.c.push_back(dot_conj(vr, psi0));
            cxd s{};
            for (std::size_t j = 0; j < n; ++j) s += vr[j * n + node];
            sser.c.push_back(s);
        }
        const SeriesComplex contrib = series_mul(series_mul(a1, wser, order), sser, order);
        total = series_add(total, contrib);
    }

    // unexpanded pairs contribute their unperturbed amplitude only
    for (std::size_t p = 0; p < ws.pairs.size(); ++p) {
        if (covered[p]) continue;
        const auto& pr = ws.pairs[p];
        const cxd mu2m = std::pow(pr.mu, 2 * m);
        cxd s{};
        for (std::size_t j = 0; j < n; ++j) s += pr.vec[j * n + node];
        total.c[0] += mu2m * s * dot_conj(pr.vec, psi0);
    }
    return total;
}

SeriesScalar rank_series(const SeriesComplex& amplitude, std::size_t order) {
    SeriesScalar out;
    out.c.reserve(order + 1);
    for (std::size_t r = 0; r <= order; ++r) {
        cxd acc{};
        for (std::size_t a = 0; a <= r; ++a)
            acc += amplitude.at(a) * std::conj(amplitude.at(r - a));
        if (std::abs(acc.imag()) > 1e-9 * std::max(1.0, std::abs(acc.real())))
            throw NumericalError("rank_series: coefficient has a non-real part "
                                 "beyond roundoff");
        out.c.push_back(acc.real());
    }
    return out;
}

// ---------------------------------------------------------------------------
// End-to-end driver
// ---------------------------------------------------------------------------

namespace {

SeriesCMat complexify(const SeriesMat& s) {
    SeriesCMat out;
    out.c.reserve(s.c.size());
    for (const auto& m : s.c) out.c.push_back(to_complex(m));
    return out;
}

bool same_series(const SeriesScalar& a, const SeriesScalar& b) {
    const std::size_t n = std::max(a.c.size(), b.c.size());
    for (std::size_t r = 0; r < n; ++r) {
        const double x = a.at(r), y = b.at(r);
        if (std::abs(x - y) > 1e-9 * std::max(1.0, std::max(std::abs(x), std::abs(y))))
            return false;
    }
    return true;
}

} // namespace

PerturbationAnalysis analyze_perturbation(const GoogleMatrix& gm,
                                          const PerturbationSeries& ps,
                                          const std::vector<RankSeriesRequest>& requests,
                                          std::size_t order,
                                          const CVec* psi0,
                                          double cluster_tol) {
    PerturbationAnalysis an;
    an.order = order;
    an.requests = requests;

    an.core = decompose_symmetric(build_symmetric_core(gm.g), cluster_tol);
    an.tser = core_series(gm.g, ps, order);
    an.tree = reduce_eigenvalues(an.core, an.tser, cluster_tol);
    an.branches = collect_branches(an.tree);

    an.walk = build_walk(gm.g);
    an.spectrum = walk_eigenpairs(an.walk, an.core);
    an.walk_data = walk_spectral_data(an.walk, an.spectrum, cluster_tol);
    an.psi0 = psi0 ? *psi0 : uniform_start_state(an.walk);
    if (an.psi0.size() != an.walk.n * an.walk.n)
        throw ParseError("start state has wrong dimension");

    // per-cluster eigenvalue series of the core, shared across a cluster;
    // split clusters cannot be paired with eigenvector series at this order
    std::vector<SeriesScalar> lambda_series(an.core.clusters.size());
    for (std::size_t h = 0; h < an.core.clusters.size(); ++h) {
        std::vector<const EigenBranch*> same;
        for (const auto& b : an.branches)
            if (std::abs(b.origin - an.core.clusters[h].value) <= cluster_tol) same.push_back(&b);
        if (same.empty())
            throw NumericalError("analyze_perturbation: missing eigenvalue branch");
        for (std::size_t k = 1; k < same.size(); ++k)
            if (!same_series(same[0]->series, same[k]->series)) an.phases_resolved = false;
        lambda_series[h] = same[0]->series;
    }
    if (!an.phases_resolved && !requests.empty())
        throw NumericalError(
            "analyze_perturbation: degenerate core eigenvalue splits under "
            "this perturbation; eigenvector series are unresolved (choose a "
            "symmetry-preserving perturbation or analyze the eigenvalue tree "
            "only)");

    const std::size_t deep = order + 1; // projections need one extra order
    an.wser = walk_series(an.walk, gm.g, ps, deep);
    const SeriesCMat user = complexify(an.wser.u);
    an.projections.reserve(an.walk_data.clusters.size());
    for (std::size_t h = 0; h < an.walk_data.clusters.size(); ++h)
        an.projections.push_back(walk_projection_series(an.walk_data, h, user, deep));
    an.qser = transformation_generator(an.projections, order);
    an.vser = transformation_series(an.qser, order);

    if (an.phases_resolved) {
        an.expansions.reserve(an.spectrum.pairs.size());
        for (std::size_t p = 0; p < an.spectrum.pairs.size(); ++p) {
            const auto& pair = an.spectrum.pairs[p];
            PairExpansion e;
            e.pair_index = static_cast<int>(p);
            if (pair.branch == 0) {
                // mu on the unit circle stays put only when lambda does; a
                // moving |lambda| = 1 eigenvalue is a square-root branch
                // point with no analytic eigenphase expansion
                const SeriesScalar& ls =
                    lambda_series[static_cast<std::size_t>(pair.t_cluster)];
                bool moves = false;
                for (std::size_t r = 1; r < ls.c.size(); ++r)
                    if (std::abs(ls.c[r]) > 1e-10) moves = true;
                if (moves) {
                    if (!requests.empty())
                        throw NumericalError(
                            "analyze_perturbation: a unit-modulus core "
                            "eigenvalue moves under this perturbation; the "
                            "eigenphase has no power series (analyze the "
                            "eigenvalue tree only)");
                    continue;
                }
                e.mu.c.assign(1, pair.mu);
            } else {
                e.mu = eigenphase_series(lambda_series[static_cast<std::size_t>(pair.t_cluster)],
                                         pair.branch, order);
            }
            e.vec.c.reserve(order + 1);
            for (std::size_t r = 0; r <= order; ++r)
                e.vec.c.push_back(matvec(an.vser.at(r), pair.vec));
            an.expansions.push_back(std::move(e));
        }
    }

    an.amplitudes.reserve(requests.size());
    an.ranks.reserve(requests.size());
    for (const auto& rq : requests) {
        SeriesComplex nq = amplitude_series(an.spectrum, an.expansions, an.psi0,
                                            rq.node, rq.m, order);
        an.ranks.push_back(rank_series(nq, order));
        an.amplitudes.push_back(std::move(nq));
    }
    return an;
}

} // namespace qpr

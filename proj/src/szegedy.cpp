#include "qpr/szegedy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qpr/errors.hpp"

namespace qpr {

WalkOperators build_walk(const Mat& g, std::size_t cap) {
    const std::size_t n = g.rows();
    if (g.cols() != n) throw std::invalid_argument("build_walk: square matrix required");
    if (n > cap) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "build_walk: %zu nodes exceed the dense-walk cap of %zu", n, cap);
        throw ScaleError(buf);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double row = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (g(j, k) < 0.0)
                throw std::invalid_argument("build_walk: negative transition weight");
            row += g(j, k);
        }
        if (std::abs(row - 1.0) > 1e-10)
            throw std::invalid_argument("build_walk: rows must sum to 1");
    }

    WalkOperators wo;
    wo.n = n;
    const std::size_t n2 = n * n;
    wo.a = Mat(n2, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            wo.a(j * n + k, j) = std::sqrt(g(j, k));
    wo.b = matmul(wo.a, transpose(wo.a));
    wo.swap_op = Mat(n2, n2);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            wo.swap_op(j * n + k, k * n + j) = 1.0;
    Mat refl = 2.0 * wo.b;
    for (std::size_t i = 0; i < n2; ++i) refl(i, i) -= 1.0;
    wo.u = matmul(wo.swap_op, refl);
    return wo;
}

CVec uniform_start_state(const WalkOperators& wo) {
    const std::size_t n = wo.n;
    CVec psi(n * n);
    const double w = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            psi[j * n + k] = cxd(w * wo.a(j * n + k, j), 0.0);
    return psi;
}

WalkSpectrum walk_eigenpairs(const WalkOperators& wo, const SpectralData& sd) {
    const std::size_t n = wo.n;
    const std::size_t n2 = n * n;
    WalkSpectrum ws;
    ws.n = n;

    for (std::size_t h = 0; h < sd.clusters.size(); ++h) {
        const auto& cl = sd.clusters[h];
        const double lam = cl.value;
        for (int c = 0; c < cl.multiplicity; ++c) {
            Vec phi(n);
            for (std::size_t r = 0; r < n; ++r) phi[r] = cl.basis(r, static_cast<std::size_t>(c));
            Vec aphi = matvec(wo.a, phi);
            if (std::abs(lam) >= 1.0 - 1e-10) {
                // S A phi = lam A phi holds exactly on unit-modulus eigenvalues
                WalkEigenpair p;
                p.mu = cxd(lam > 0.0 ? 1.0 : -1.0, 0.0);
                p.vec = to_complex(aphi);
                p.origin = lam;
                p.branch = 0;
                p.t_cluster = static_cast<int>(h);
                ws.pairs.push_back(std::move(p));
                continue;
            }
            const double s = std::sqrt(1.0 - lam * lam);
            Vec saphi = matvec(wo.swap_op, aphi);
            const double scale = 1.0 / std::sqrt(2.0 * (1.0 - lam * lam));
            for (int sign : {+1, -1}) {
                const cxd mu(lam, sign * s);
                WalkEigenpair p;
                p.mu = mu;
                p.vec = CVec(n2);
                for (std::size_t i = 0; i < n2; ++i)
                    p.vec[i] = scale * (cxd(aphi[i], 0.0) - mu * cxd(saphi[i], 0.0));
                p.origin = lam;
                p.branch = sign;
                p.t_cluster = static_cast<int>(h);
                ws.pairs.push_back(std::move(p));
            }
        }
    }
    return ws;
}

double walk_subspace_residual(const WalkSpectrum& ws, const CVec& psi0) {
    CVec r = psi0;
    for (const auto& p : ws.pairs) {
        const cxd w = dot_conj(p.vec, psi0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= w * p.vec[i];
    }
    return norm2(r);
}

CMat WalkSpectralData::reduced_resolvent(std::size_t h) const {
    const std::size_t d = clusters[h].projection.rows();
    CMat s(d, d);
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        if (k == h) continue;
        const cxd w = 1.0 / (clusters[k].mu - clusters[h].mu);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                s(i, j) += w * clusters[k].projection(i, j);
    }
    return s;
}

double WalkSpectralData::min_isolation() const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& cl : clusters) d = std::min(d, cl.isolation);
    return d;
}

WalkSpectralData walk_spectral_data(const WalkOperators& wo, const WalkSpectrum& ws,
                                    double cluster_tol) {
    const std::size_t n2 = wo.n * wo.n;
    WalkSpectralData wsd;
    wsd.n = wo.n;

    // walk-subspace clusters, one per (origin cluster, branch)
    for (std::size_t p = 0; p < ws.pairs.size(); ++p) {
        const auto& pair = ws.pairs[p];
        int found = -1;
        for (std::size_t c = 0; c < wsd.clusters.size(); ++c) {
            if (wsd.clusters[c].complement) continue;
            const auto& first = ws.pairs[wsd.clusters[c].pair_indices.front()];
            if (first.t_cluster == pair.t_cluster && first.branch == pair.branch) {
                found = static_cast<int>(c);
                break;
            }
        }
        if (found < 0) {
            WalkCluster cl;
            cl.mu = pair.mu;
            cl.projection = CMat(n2, n2);
            wsd.clusters.push_back(std::move(cl));
            found = static_cast<int>(wsd.clusters.size()) - 1;
        }
        auto& cl = wsd.clusters[static_cast<std::size_t>(found)];
        cl.pair_indices.push_back(static_cast<int>(p));
        cl.multiplicity += 1;
        for (std::size_t i = 0; i < n2; ++i)
            for (std::size_t j = 0; j < n2; ++j)
                cl.projection(i, j) += pair.vec[i] * std::conj(pair.vec[j]);
    }

    // orthogonal complement of the walk subspace: U acts there as -S
    CMat pi_c = CMat::identity(n2);
    for (const auto& cl : wsd.clusters)
        for (std::size_t i = 0; i < n2; ++i)
            for (std::size_t j = 0; j < n2; ++j)
                pi_c(i, j) -= cl.projection(i, j);
    for (int sign : {+1, -1}) {
        // mu = sign on vectors with S v = -sign v
        CMat proj(n2, n2);
        for (std::size_t i = 0; i < n2; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                cxd half = (i == j ? cxd(0.5, 0.0) : cxd(0.0, 0.0));
                half -= 0.5 * sign * wo.swap_op(i, j);
                proj(i, j) = half;
            }
        CMat p = matmul(pi_c, proj);
        double tr = 0.0;
        for (std::size_t i = 0; i < n2; ++i) tr += p(i, i).real();
        const int mult = static_cast<int>(std::lround(tr));
        if (mult <= 0) continue;
        WalkCluster cl;
        cl.mu = cxd(sign, 0.0);
        cl.multiplicity = mult;
        cl.projection = std::move(p);
        cl.complement = true;
        wsd.clusters.push_back(std::move(cl));
    }

    // merge clusters with coinciding eigenvalues (only +-1 overlaps are valid)
    for (std::size_t a = 0; a < wsd.clusters.size(); ++a) {
        for (std::size_t b = a + 1; b < wsd.clusters.size();) {
            if (std::abs(wsd.clusters[a].mu - wsd.clusters[b].mu) <= cluster_tol) {
                if (!wsd.clusters[a].complement && !wsd.clusters[b].complement)
                    throw NumericalError(
                        "walk_spectral_data: eigenphase collision between distinct "
                        "walk-subspace clusters; refine the core clustering tolerance");
                auto& keep = wsd.clusters[a];
                auto& drop = wsd.clusters[b];
                if (keep.complement && !drop.complement) keep.mu = drop.mu;
                keep.multiplicity += drop.multiplicity;
                keep.projection += drop.projection;
                keep.complement = true;
                for (int idx : drop.pair_indices) keep.pair_indices.push_back(idx);
                wsd.clusters.erase(wsd.clusters.begin() + static_cast<long>(b));
            } else {
                ++b;
            }
        }
    }

    for (std::size_t a = 0; a < wsd.clusters.size(); ++a) {
        double iso = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < wsd.clusters.size(); ++b) {
            if (a == b) continue;
            iso = std::min(iso, std::abs(wsd.clusters[a].mu - wsd.clusters[b].mu));
        }
        wsd.clusters[a].isolation = iso;
    }
    return wsd;
}

RankVariant parse_variant(const std::string& s) {
    if (s == "coherent") return RankVariant::coherent;
    if (s == "summed") return RankVariant::summed;
    throw ParseError("unknown rank variant '" + s + "' (expected coherent or summed)");
}

namespace {

struct PairTables {
    std::vector<cxd> w;              // <mu_p | psi0>
    std::vector<double> theta;       // arg mu_p
    std::vector<std::vector<cxd>> e; // e[p][j] = vec_p[j*n + node]
    std::vector<cxd> s;              // sum_j e[p][j]
};

PairTables make_tables(const WalkSpectrum& ws, const CVec& psi0, std::size_t node) {
    const std::size_t n = ws.n;
    if (node >= n) throw std::invalid_argument("quantum_rank: node index out of range");
    PairTables t;
    t.w.reserve(ws.pairs.size());
    for (const auto& p : ws.pairs) {
        t.w.push_back(dot_conj(p.vec, psi0));
        t.theta.push_back(std::arg(p.mu));
        std::vector<cxd> row(n);
        cxd sum(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = p.vec[j * n + node];
            sum += row[j];
        }
        t.e.push_back(std::move(row));
        t.s.push_back(sum);
    }
    return t;
}

double rank_from_tables(const WalkSpectrum& ws, const PairTables& t, long m,
                        RankVariant variant) {
    const std::size_t n = ws.n;
    const double twom = 2.0 * static_cast<double>(m);
    if (variant == RankVariant::coherent) {
        cxd acc(0.0, 0.0);
        for (std::size_t p = 0; p < ws.pairs.size(); ++p)
            acc += std::polar(1.0, twom * t.theta[p]) * t.s[p] * t.w[p];
        return std::norm(acc);
    }
    double total = 0.0;
    std::vector<cxd> per_j(n, cxd(0.0, 0.0));
    for (std::size_t p = 0; p < ws.pairs.size(); ++p) {
        const cxd f = std::polar(1.0, twom * t.theta[p]) * t.w[p];
        for (std::size_t j = 0; j < n; ++j) per_j[j] += f * t.e[p][j];
    }
    for (std::size_t j = 0; j < n; ++j) total += std::norm(per_j[j]);
    return total;
}

} // namespace

double quantum_rank(const WalkSpectrum& ws, const CVec& psi0, std::size_t node,
                    long m, RankVariant variant) {
    if (m < 0) throw std::invalid_argument("quantum_rank: negative step count");
    const PairTables t = make_tables(ws, psi0, node);
    return rank_from_tables(ws, t, m, variant);
}

double average_quantum_rank(const WalkSpectrum& ws, const CVec& psi0, std::size_t node,
                            long t, RankVariant variant) {
    if (t <= 0) throw std::invalid_argument("average_quantum_rank: t must be positive");
    const PairTables tab = make_tables(ws, psi0, node);
    double acc = 0.0;
    for (long m = 0; m < t; ++m) acc += rank_from_tables(ws, tab, m, variant);
    return acc / static_cast<double>(t);
}

double limit_quantum_rank(const WalkSpectrum& ws, const CVec& psi0, std::size_t node,
                          double cluster_tol) {
    const std::size_t n = ws.n;
    const PairTables tab = make_tables(ws, psi0, node);
    double total = 0.0;
    // a cross term survives the average iff (mu_p conj(mu_q))^2 = 1, i.e.
    // mu_q = +-mu_p; grouping by mu alone would drop antipodal pairs
    for (std::size_t p = 0; p < ws.pairs.size(); ++p)
        for (std::size_t q = 0; q < ws.pairs.size(); ++q) {
            const cxd mp = ws.pairs[p].mu, mq = ws.pairs[q].mu;
            if (std::abs(mp * mp - mq * mq) > cluster_tol) continue;
            cxd acc(0.0, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                acc += tab.e[p][j] * std::conj(tab.e[q][j]);
            const cxd term = tab.w[p] * std::conj(tab.w[q]) * acc;
            total += term.real();
        }
    return total;
}

double mixing_bound(const WalkSpectrum& ws, const CVec& psi0, long t,
                    double cluster_tol) {
    if (t <= 0) throw std::invalid_argument("mixing_bound: t must be positive");
    std::vector<cxd> w;
    w.reserve(ws.pairs.size());
    for (const auto& p : ws.pairs) w.push_back(dot_conj(p.vec, psi0));
    double acc = 0.0;
    // |(1/t) sum_m z^{2m}| <= 2 / (t |1 - z^2|) with z = mu_p conj(mu_q), and
    // |1 - z^2| = |mu_p^2 - mu_q^2| on the unit circle
    for (std::size_t p = 0; p < ws.pairs.size(); ++p)
        for (std::size_t q = 0; q < ws.pairs.size(); ++q) {
            if (p == q) continue;
            const cxd mp = ws.pairs[p].mu, mq = ws.pairs[q].mu;
            const double gap = std::abs(mp * mp - mq * mq);
            if (gap <= cluster_tol) continue;
            acc += 2.0 * std::norm(w[p]) / (static_cast<double>(t) * gap);
        }
    return acc;
}

} // namespace qpr

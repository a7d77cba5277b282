#include "qpr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "qpr/errors.hpp"
#include "qpr/spectral.hpp"

namespace qpr {
namespace oracle {

namespace {

CVec default_start(const WalkOperators& wo, const CVec* psi0) {
    if (!psi0) return uniform_start_state(wo);
    if (psi0->size() != wo.n * wo.n)
        throw ParseError("start state has wrong dimension");
    return *psi0;
}

// Orthonormal basis of the column span of `m`, modified Gram-Schmidt with
// column pivoting; columns with residual below tol are dropped.
std::vector<Vec> column_span(const Mat& m, double tol) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<Vec> pool(cols, Vec(rows, 0.0));
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) pool[c][r] = m(r, c);

    std::vector<Vec> basis;
    for (;;) {
        double best = 0.0;
        std::size_t pick = pool.size();
        for (std::size_t c = 0; c < pool.size(); ++c) {
            const double nn = norm2(pool[c]);
            if (nn > best) {
                best = nn;
                pick = c;
            }
        }
        if (pick == pool.size() || best < tol) break;
        Vec q = pool[pick];
        for (double& x : q) x /= best;
        basis.push_back(q);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        for (auto& v : pool) {
            double proj = 0.0;
            for (std::size_t r = 0; r < rows; ++r) proj += q[r] * v[r];
            for (std::size_t r = 0; r < rows; ++r) v[r] -= proj * q[r];
        }
    }
    return basis;
}

} // namespace

WalkOperators walk_at(const GoogleMatrix& gm, const PerturbationSeries& ps, double chi) {
    return build_walk(eval_perturbed(gm, ps, chi));
}

double rank_at(const GoogleMatrix& gm, const PerturbationSeries& ps, double chi,
               std::size_t node, long m, RankVariant variant, const CVec* psi0) {
    if (m < 0) throw ParseError("rank_at: negative step count");
    const WalkOperators wo = walk_at(gm, ps, chi);
    const std::size_t n = wo.n;
    if (node >= n) throw ParseError("rank_at: node out of range");
    // the start state is held fixed while the walk moves with chi, so the
    // default comes from the unperturbed operators
    const CVec start = psi0 ? default_start(wo, psi0)
                            : uniform_start_state(build_walk(gm.g));

    // duplicated subspace: columns of A and of S A
    const std::size_t n2 = n * n;
    Mat cols(n2, 2 * n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n2; ++r) {
            cols(r, c) = wo.a(r, c);
            const std::size_t swapped = (r % n) * n + r / n;
            cols(r, n + c) = wo.a(swapped, c);
        }
    const auto basis = column_span(cols, 1e-10);

    CVec x(n2, cxd{});
    for (const auto& q : basis) {
        cxd proj{};
        for (std::size_t r = 0; r < n2; ++r) proj += q[r] * start[r];
        for (std::size_t r = 0; r < n2; ++r) x[r] += proj * q[r];
    }

    const CMat u = to_complex(wo.u);
    for (long step = 0; step < 2 * m; ++step) x = matvec(u, x);

    if (variant == RankVariant::coherent) {
        cxd acc{};
        for (std::size_t j = 0; j < n; ++j) acc += x[j * n + node];
        return std::norm(acc);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += std::norm(x[j * n + node]);
    return acc;
}

cxd amplitude_at(const GoogleMatrix& gm, const PerturbationSeries& ps, cxd chi,
                 std::size_t node, long m, const CVec* psi0) {
    if (m < 0) throw ParseError("amplitude_at: negative step count");
    const WalkOperators wo = build_walk(gm.g);
    const std::size_t n = wo.n;
    if (node >= n) throw ParseError("amplitude_at: node out of range");
    const CVec start = default_start(wo, psi0);

    const SpectralData sd = decompose_symmetric(build_symmetric_core(gm.g));
    const WalkSpectrum ws = walk_eigenpairs(wo, sd);
    for (const auto& p : ws.pairs)
        if (p.branch == 0)
            throw NumericalError(
                "amplitude_at: a unit-modulus eigenphase pins the spectrum to a "
                "branch point; the analytic amplitude is only defined when every "
                "|lambda| < 1");
    const WalkSpectralData wsd = walk_spectral_data(wo, ws);

    // The walk at complex chi keeps the span of {A e_j, S A e_j} invariant:
    // with sq = entrywise principal root of g(chi) and D_jl = sq_jl * sq_lj,
    // U A = S A and U S A = 2 (S A) D - A, so in that basis U acts by the
    // 2n x 2n block matrix [[0, -I], [I, 2D]]. The pair eigenvalues all live
    // here, and working in the small basis keeps the eigenproblem clear of
    // the exactly degenerate +-1 complement, whose eigenvector basis is
    // numerically unreliable for a near-real matrix.
    const CMat g = eval_perturbed_complex(gm, ps, chi);
    CMat sq(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) sq(j, k) = std::sqrt(g(j, k));
    CMat d(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) d(j, l) = sq(j, l) * sq(l, j);

    const std::size_t dim = 2 * n;
    CMat kmat(dim, dim);
    for (std::size_t j = 0; j < n; ++j) {
        kmat(n + j, j) = 1.0;
        kmat(j, n + j) = -1.0;
        for (std::size_t i = 0; i < n; ++i) kmat(n + i, n + j) = 2.0 * d(i, j);
    }
    const ComplexEig eig = eig_complex(kmat);

    // coordinates of the start state in the invariant span: the row-stochastic
    // rows make A^T A = I and A^T S A = D (transpose products, no conjugation),
    // so the complement drops out of the Gram system below
    CVec rhs(dim);
    for (std::size_t j = 0; j < n; ++j) {
        cxd p{}, q{};
        for (std::size_t k = 0; k < n; ++k) {
            p += sq(j, k) * start[j * n + k];
            q += sq(j, k) * start[k * n + j];
        }
        rhs[j] = p;
        rhs[n + j] = q;
    }
    CMat gram(dim, dim);
    for (std::size_t j = 0; j < n; ++j) {
        gram(j, j) = 1.0;
        gram(n + j, n + j) = 1.0;
        for (std::size_t l = 0; l < n; ++l) {
            gram(j, n + l) = d(j, l);
            gram(n + j, l) = d(j, l);
        }
    }
    const CVec coeff = matvec(eig.right_inv, solve(gram, rhs));

    // the node functional sums position amplitudes over the coin index:
    // against A e_j it reads sq(j, node), against S A e_j only j = node
    // contributes, with weight sum_k sq(node, k)
    CVec row(dim, cxd{});
    cxd node_row{};
    for (std::size_t k = 0; k < n; ++k) node_row += sq(node, k);
    for (std::size_t j = 0; j < n; ++j) row[j] = sq(j, node);
    row[n + node] = node_row;

    cxd total{};
    std::vector<bool> taken(dim, false);
    for (const auto& cl : wsd.clusters) {
        if (cl.complement) continue;
        const std::size_t cap = static_cast<std::size_t>(cl.multiplicity);

        std::vector<std::size_t> idx(dim);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(eig.values[a] - cl.mu) < std::abs(eig.values[b] - cl.mu);
        });
        const double inner = std::abs(eig.values[idx[cap - 1]] - cl.mu);
        const double outer = std::abs(eig.values[idx[cap]] - cl.mu);
        if (outer < 1.1 * inner || inner > 0.45 * cl.isolation)
            throw NumericalError(
                "amplitude_at: eigenvalue-to-cluster matching is ambiguous at "
                "this chi (perturbed spectrum drifted too far)");

        for (std::size_t k = 0; k < cap; ++k) {
            const std::size_t e = idx[k];
            if (taken[e])
                throw NumericalError(
                    "amplitude_at: one eigenvalue matched two clusters");
            taken[e] = true;
            cxd colsum{};
            for (std::size_t i = 0; i < dim; ++i) colsum += row[i] * eig.right(i, e);
            total += std::pow(eig.values[e], 2 * m) * coeff[e] * colsum;
        }
    }
    return total;
}

cxd rank_continuation_at(const GoogleMatrix& gm, const PerturbationSeries& ps,
                         cxd chi, std::size_t node, long m, const CVec* psi0) {
    const cxd a = amplitude_at(gm, ps, chi, node, m, psi0);
    const cxd b = amplitude_at(gm, ps, std::conj(chi), node, m, psi0);
    return a * std::conj(b);
}

cxd circle_coefficient(const GoogleMatrix& gm, const PerturbationSeries& ps,
                       std::size_t node, long m, std::size_t n, double rho,
                       std::size_t samples, const CVec* psi0) {
    if (samples == 0) throw ParseError("circle_coefficient: no samples");
    const double pi = std::acos(-1.0);
    cxd acc{};
    for (std::size_t k = 0; k < samples; ++k) {
        const double theta = 2.0 * pi * static_cast<double>(k) / static_cast<double>(samples);
        const cxd chi = std::polar(rho, theta);
        const cxd f = rank_continuation_at(gm, ps, chi, node, m, psi0);
        acc += f * std::polar(1.0, -theta * static_cast<double>(n));
    }
    acc /= static_cast<double>(samples) * std::pow(rho, static_cast<double>(n));
    return acc;
}

std::vector<TruncationRow> compare_truncation(const GoogleMatrix& gm,
                                              const PerturbationSeries& ps,
                                              const SeriesScalar& series,
                                              std::size_t node, long m,
                                              RankVariant variant,
                                              const std::vector<double>& grid,
                                              const CVec* psi0) {
    std::vector<TruncationRow> rows;
    rows.reserve(grid.size());
    for (double chi : grid) {
        TruncationRow row;
        row.chi = chi;
        row.exact = rank_at(gm, ps, chi, node, m, variant, psi0);
        row.truncated = series_eval(series, chi);
        row.error = std::abs(row.exact - row.truncated);
        rows.push_back(row);
    }
    return rows;
}

double loglog_slope(const std::vector<TruncationRow>& rows, double floor) {
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
        if (r.error <= floor || r.chi <= 0.0) continue;
        lx.push_back(std::log(r.chi));
        ly.push_back(std::log(r.error));
    }
    if (lx.size() < 2)
        throw NumericalError("loglog_slope: fewer than two points above the "
                             "roundoff floor");
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

std::vector<double> dyadic_grid(double start, std::size_t count) {
    std::vector<double> g;
    g.reserve(count);
    double x = start;
    for (std::size_t i = 0; i < count; ++i) {
        g.push_back(x);
        x *= 0.5;
    }
    return g;
}

} // namespace oracle
} // namespace qpr

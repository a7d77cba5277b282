#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qpr/google.hpp"
#include "qpr/linalg.hpp"
#include "qpr/series.hpp"
#include "qpr/spectral.hpp"
#include "qpr/szegedy.hpp"

namespace qpr {

// ---------------------------------------------------------------------------
// Resolvent-composition machinery shared by the real (symmetrized core) and
// complex (walk operator) sides.  A "family" is the coefficient list of an
// operator-valued power series, entry 0 being the unperturbed operator.  A
// node fixes one eigenvalue of the family base through its projection P and
// reduced resolvent R; the composition formulas use S(0) = -P, S(k) = R^k.
// ---------------------------------------------------------------------------

template <class T>
struct NodeResolvent {
    Matrix<T> minus_p;
    std::vector<Matrix<T>> powers; // powers[k-1] = R^k

    const Matrix<T>& s(std::size_t k) const {
        return k == 0 ? minus_p : powers[k - 1];
    }
};

template <class T>
NodeResolvent<T> make_node_resolvent(const Matrix<T>& p, const Matrix<T>& r,
                                     std::size_t kmax) {
    NodeResolvent<T> node;
    node.minus_p = -1.0 * p;
    if (kmax == 0) return node;
    node.powers.reserve(kmax);
    node.powers.push_back(r);
    for (std::size_t k = 1; k < kmax; ++k)
        node.powers.push_back(matmul(node.powers.back(), r));
    return node;
}

/** Coefficient l >= 1 of the eigenprojection series of `fam` at `node`.
 *  Coefficient 0 is the unperturbed projection itself. */
template <class T>
Matrix<T> projection_coeff(const std::vector<Matrix<T>>& fam,
                           const NodeResolvent<T>& node, std::size_t l) {
    const std::size_t dim = fam[0].rows();
    const int li = static_cast<int>(l);
    Matrix<T> acc(dim, dim);
    for (int p = 1; p <= li; ++p) {
        const double sign = (p % 2 == 1) ? 1.0 : -1.0;
        for (const auto& nu : compositions_positive(li, p)) {
            for (const auto& kk : compositions_nonneg(p, p + 1)) {
                Matrix<T> m = node.s(static_cast<std::size_t>(kk[0]));
                for (int i = 0; i < p; ++i) {
                    m = matmul(m, fam[static_cast<std::size_t>(nu[i])]);
                    m = matmul(m, node.s(static_cast<std::size_t>(kk[i + 1])));
                }
                acc += sign * m;
            }
        }
    }
    return acc;
}

/** Coefficient n >= 1 of the reduced (level) operator series of `fam` at
 *  `node`; the result acts inside the range of the node projection. */
template <class T>
Matrix<T> level_coeff(const std::vector<Matrix<T>>& fam,
                      const NodeResolvent<T>& node, std::size_t n) {
    const std::size_t dim = fam[0].rows();
    const int ni = static_cast<int>(n);
    Matrix<T> acc(dim, dim);
    for (int p = 1; p <= ni; ++p) {
        const double sign = (p % 2 == 1) ? 1.0 : -1.0;
        for (const auto& nu : compositions_positive(ni, p)) {
            for (const auto& kk : compositions_nonneg(p - 1, p + 1)) {
                Matrix<T> m = node.s(static_cast<std::size_t>(kk[0]));
                for (int i = 0; i < p; ++i) {
                    m = matmul(m, fam[static_cast<std::size_t>(nu[i])]);
                    m = matmul(m, node.s(static_cast<std::size_t>(kk[i + 1])));
                }
                acc += sign * m;
            }
        }
    }
    return acc;
}

/** Coefficient n >= 1 of the eigenvalue series of a simple eigenvalue. */
template <class T>
T eigenvalue_coeff(const std::vector<Matrix<T>>& fam,
                   const NodeResolvent<T>& node, std::size_t n) {
    const int ni = static_cast<int>(n);
    T acc{};
    for (int p = 1; p <= ni; ++p) {
        const double sign = (p % 2 == 1) ? -1.0 : 1.0; // (-1)^p
        for (const auto& nu : compositions_positive(ni, p)) {
            for (const auto& kk : compositions_nonneg(p - 1, p)) {
                Matrix<T> m = fam[static_cast<std::size_t>(nu[0])];
                m = matmul(m, node.s(static_cast<std::size_t>(kk[0])));
                for (int i = 1; i < p; ++i) {
                    m = matmul(m, fam[static_cast<std::size_t>(nu[i])]);
                    m = matmul(m, node.s(static_cast<std::size_t>(kk[i])));
                }
                acc += (sign / static_cast<double>(p)) * trace(m);
            }
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Symmetrized-core side
// ---------------------------------------------------------------------------

/** Coefficients 0..K of the entrywise symmetrization of the perturbed matrix;
 *  requires a strictly positive unperturbed matrix. */
SeriesMat core_series(const Mat& g, const PerturbationSeries& ps, std::size_t order);

/** Closed-form first-order coefficient, used as an independent cross-check. */
Mat core_first_order(const Mat& g, const Mat& g1);

/** Eigenprojection series (coefficients 0..order) of cluster h. */
SeriesMat core_projection_series(const SpectralData& sd, std::size_t h,
                                 const SeriesMat& tser, std::size_t order);

/** Eigenvalue series of a simple (multiplicity 1) cluster. */
SeriesScalar core_eigenvalue_series(const SpectralData& sd, std::size_t h,
                                    const SeriesMat& tser, std::size_t order);

// ---------------------------------------------------------------------------
// Degenerate eigenvalues: recursive reduction
// ---------------------------------------------------------------------------

/** One eigenvalue at one level of the reduction.  `value` is the true series
 *  coefficient contributed at chi^level; re-centering shifts are already
 *  removed from it. */
struct EigenNode {
    int level = 0;
    double value = 0.0;
    double shifted_value = 0.0;  // value inside the (possibly shifted) family
    int multiplicity = 1;
    double resolvent_gap = 0.0;  // distance to the rest of the base spectrum
    double resolvent_norm = 0.0; // operator norm of the reduced resolvent
    double shift = 0.0;          // re-centering shift applied to the child family
    bool leaf = false;
    SeriesScalar tail;           // leaves: remaining series, constant term = value
    std::vector<EigenNode> children;
};

struct ReductionTree {
    std::size_t order = 0;
    std::vector<EigenNode> roots;       // one per cluster of the core
    std::vector<std::string> notes;     // re-centering events
};

ReductionTree reduce_eigenvalues(const SpectralData& sd, const SeriesMat& tser,
                                 double cluster_tol = 1e-8, double zero_tol = 1e-9);

/** One analytic eigenvalue branch assembled from the tree. */
struct EigenBranch {
    double origin = 0.0;
    int multiplicity = 1;
    int depth = 0;               // level of the resolving leaf
    SeriesScalar series;         // coefficients 0..order of lambda(chi)
};

std::vector<EigenBranch> collect_branches(const ReductionTree& tree);

// ---------------------------------------------------------------------------
// Walk-operator side
// ---------------------------------------------------------------------------

/** Coefficient series of the perturbed walk ingredients. */
struct WalkSeries {
    SeriesMat u;                   // U(chi), real coefficients
    std::vector<SeriesVec> psi;    // psi_j(chi), j = 0..n-1
};

WalkSeries walk_series(const WalkOperators& wo, const Mat& g,
                       const PerturbationSeries& ps, std::size_t order);

/** Eigenprojection series of walk cluster h (coefficients 0..order). */
SeriesCMat walk_projection_series(const WalkSpectralData& wsd, std::size_t h,
                                  const SeriesCMat& user, std::size_t order);

/** Generator Q(chi) = -sum_h Phat_h(chi) * d/dchi Phat_h(chi); input series
 *  must carry one order beyond the requested output. */
SeriesCMat transformation_generator(const std::vector<SeriesCMat>& projections,
                                    std::size_t order);

/** Transformation function V(chi) with V' = Q V, V(0) = I. */
SeriesCMat transformation_series(const SeriesCMat& q, std::size_t order);

/** Eigenphase series mu(chi) = lambda(chi) + branch * i * sqrt(1 - lambda^2);
 *  requires |lambda(0)| < 1. */
SeriesComplex eigenphase_series(const SeriesScalar& lambda_series, int branch,
                                std::size_t order);

/** Expansion data for one walk eigenpair whose origin satisfies |lambda| < 1. */
struct PairExpansion {
    int pair_index = -1;
    SeriesComplex mu;
    SeriesCVec vec;
};

/** Amplitude series N(chi) for node `node` after m double steps: constant
 *  contributions from unit-modulus pairs plus expanded contributions. */
SeriesComplex amplitude_series(const WalkSpectrum& ws,
                               const std::vector<PairExpansion>& expansions,
                               const CVec& psi0, std::size_t node, long m,
                               std::size_t order);

/** Rank series I(chi) = N(chi) * conj(N(chi)) for real chi; coefficients are
 *  real up to roundoff, which is checked. */
SeriesScalar rank_series(const SeriesComplex& amplitude, std::size_t order);

// ---------------------------------------------------------------------------
// End-to-end driver
// ---------------------------------------------------------------------------

struct RankSeriesRequest {
    std::size_t node = 0;
    long m = 1;
};

/** Everything the sensitivity analysis produces for one graph+perturbation. */
struct PerturbationAnalysis {
    SpectralData core;
    SeriesMat tser;
    ReductionTree tree;
    std::vector<EigenBranch> branches;
    WalkOperators walk;
    WalkSpectrum spectrum;
    WalkSpectralData walk_data;
    WalkSeries wser;
    std::vector<SeriesCMat> projections;  // aligned with walk_data.clusters
    SeriesCMat qser;
    SeriesCMat vser;
    std::vector<PairExpansion> expansions;
    std::vector<SeriesScalar> ranks;      // aligned with `requests`
    std::vector<SeriesComplex> amplitudes;
    std::vector<RankSeriesRequest> requests;
    CVec psi0;
    std::size_t order = 0;
    // false when a degenerate core eigenvalue splits under the perturbation,
    // leaving per-pair eigenphase series undefined; projection, generator and
    // transformation series are still valid
    bool phases_resolved = true;
};

PerturbationAnalysis analyze_perturbation(const GoogleMatrix& gm,
                                          const PerturbationSeries& ps,
                                          const std::vector<RankSeriesRequest>& requests,
                                          std::size_t order,
                                          const CVec* psi0 = nullptr,
                                          double cluster_tol = 1e-8);

} // namespace qpr

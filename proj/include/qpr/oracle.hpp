#pragma once

#include <cstddef>
#include <vector>

#include "qpr/google.hpp"
#include "qpr/series.hpp"
#include "qpr/szegedy.hpp"

namespace qpr {
namespace oracle {

// Reference implementations that share no code path with the series
// machinery: everything here works pointwise at a fixed chi, by direct
// construction and dense linear algebra, so it can arbitrate disagreements.

/** Walk operator of the perturbed matrix at real chi. */
WalkOperators walk_at(const GoogleMatrix& gm, const PerturbationSeries& ps, double chi);

/** Quantum rank at real chi by direct propagation: project the start state
 *  onto the duplicated subspace span{A e_k, S A e_k} (dense Gram-Schmidt),
 *  apply U(chi) 2m times, read the amplitudes off node `node`.  No
 *  eigendecomposition is involved. */
double rank_at(const GoogleMatrix& gm, const PerturbationSeries& ps, double chi,
               std::size_t node, long m, RankVariant variant,
               const CVec* psi0 = nullptr);

/** Analytic amplitude N(chi) at complex chi: eigendecompose U(chi) dense,
 *  match eigenvalues to the unperturbed eigenphase clusters by proximity
 *  (capacity per cluster, 10% separation margin), and sum the matched
 *  spectral contributions.  Requires every eigenphase pair to have
 *  |lambda| < 1; throws NumericalError when matching is ambiguous. */
cxd amplitude_at(const GoogleMatrix& gm, const PerturbationSeries& ps, cxd chi,
                 std::size_t node, long m, const CVec* psi0 = nullptr);

/** Analytic continuation of the rank: N(chi) * conj(N(conj(chi))); equals the
 *  quantum rank for real chi. */
cxd rank_continuation_at(const GoogleMatrix& gm, const PerturbationSeries& ps,
                         cxd chi, std::size_t node, long m,
                         const CVec* psi0 = nullptr);

/** Taylor coefficient n of the rank continuation by the trapezoid rule on the
 *  circle |chi| = rho. */
cxd circle_coefficient(const GoogleMatrix& gm, const PerturbationSeries& ps,
                       std::size_t node, long m, std::size_t n, double rho,
                       std::size_t samples, const CVec* psi0 = nullptr);

struct TruncationRow {
    double chi = 0.0;
    double exact = 0.0;     // direct-propagation rank at chi
    double truncated = 0.0; // series truncation evaluated at chi
    double error = 0.0;
};

/** Exact-vs-truncated comparison over a chi grid. */
std::vector<TruncationRow> compare_truncation(const GoogleMatrix& gm,
                                              const PerturbationSeries& ps,
                                              const SeriesScalar& series,
                                              std::size_t node, long m,
                                              RankVariant variant,
                                              const std::vector<double>& grid,
                                              const CVec* psi0 = nullptr);

/** Least-squares slope of log(error) against log(chi), ignoring points whose
 *  error sits below `floor` (roundoff).  Needs at least two usable points. */
double loglog_slope(const std::vector<TruncationRow>& rows, double floor = 1e-13);

/** start, start/2, start/4, ... (`count` values). */
std::vector<double> dyadic_grid(double start, std::size_t count);

} // namespace oracle
} // namespace qpr

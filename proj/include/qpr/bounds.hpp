#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qpr/google.hpp"
#include "qpr/perturb.hpp"
#include "qpr/spectral.hpp"
#include "qpr/szegedy.hpp"

namespace qpr {

// ---------------------------------------------------------------------------
// Certified coefficient envelopes.  Every quantity produced by the sensitivity
// analysis gets an explicit bound of the form a * b^(n-1) on the norm of its
// n-th series coefficient, derived from nothing but the perturbation envelope
// (a0, b0), the unperturbed matrix, and computed spectral gaps.  The constants
// are conservative by design; their job is to be provably valid, and the test
// suite checks every computed coefficient against them.
// ---------------------------------------------------------------------------

struct EnvelopePrefix {
    double a0 = 0.0, b0 = 1.0; // ||G^(l)|| <= a0 * b0^(l-1)
    double g_min = 0.0;        // smallest entry of the unperturbed matrix
    double t_max = 0.0;        // largest entry of the symmetrized core
    double delta = 0.5;        // entry budget burned by the square-root series
    double eps0 = 0.0;         // relative entry envelope a0 / (delta*b0*g_min)
    double a1 = 0.0, b1 = 1.0; // duplication-state rows  ||psi_j^(n)||
    double a2 = 0.0, b2 = 1.0; // walk operator           ||U^(n)||
    double a3 = 0.0, b3 = 1.0; // symmetrized core        ||T^(n)||
};

/** Envelope constants on the input side.  Uses the bounds stored in `ps` when
 *  supplied (after validating them) and otherwise fits the loosest valid pair
 *  with b0 = 1. */
EnvelopePrefix envelope_prefix(const GoogleMatrix& gm, const PerturbationSeries& ps);

struct RadiusEstimate {
    double r_entry = 0.0; // entrywise positivity of the perturbed matrix
    double r_tree = 0.0;  // every reduction step keeps its contour isolated
    double r1 = 0.0;      // min of the two above: eigenvalue series converge
    double varrho = 0.0;  // max over clusters of half the isolation
    double r2 = 0.0;      // eigenvalues certified inside the unit disc
    double r0 = 0.0;      // min(r1, r2): the walk-side series converge
    bool resolved = true; // false when a cluster is still degenerate at the
                          // expansion order; tail bounds are then unavailable
    std::vector<double> root_radii; // per core cluster, aligned with sd.clusters
};

/** Lower bounds on the convergence radii of the eigenvalue branches and the
 *  derived walk-side series.  Zero perturbation gives infinite radii. */
RadiusEstimate convergence_radius(const GoogleMatrix& gm, const PerturbationSeries& ps,
                                  const SpectralData& sd, const ReductionTree& tree,
                                  const std::vector<EigenBranch>& branches);

/** Remainder bound for any eigenvalue branch truncated after chi^order. */
double eigenvalue_tail_bound(const RadiusEstimate& re, std::size_t order, double chi);

struct BoundLedger {
    EnvelopePrefix prefix;
    RadiusEstimate radius;

    std::size_t n = 0;        // graph size
    std::size_t walk_dim = 0; // n^2
    std::size_t pair_count = 0;
    std::size_t cluster_count = 0; // walk clusters, complement included

    double d_hat_min = 0.0; // smallest walk-cluster isolation
    double a6 = 0.0, b6 = 1.0; // walk eigenprojections ||Phat_h^(n)||
    double q0 = 0.0;           // ||Q^(0)||
    double a7 = 0.0, b7 = 1.0; // generator ||Q^(n)||, n >= 1
    double b9 = 1.0;           // transformation ||V^(n)|| <= b9^n
    double eps1 = 1.0;         // min of 1 - lambda^2 over expanded pairs
    double a12 = 0.0, b12 = 1.0; // eigenphase square root part
    double a13 = 0.0, b13 = 1.0; // eigenphase |mu^(n)|
    double b14 = 1.0;            // base for powers of mu
    double bstar = 1.0;          // common geometric base of the amplitude chain

    double psi_bound(std::size_t l) const;    // ||psi_j^(l)||, l >= 1
    double u_bound(std::size_t nn) const;     // ||U^(n)||, n >= 1
    double t_bound(std::size_t nn) const;     // ||T^(n)||, n >= 1
    double lambda_bound(std::size_t nn) const; // |lambda^(n)|, n >= 1, any branch
    double proj_bound(std::size_t nn) const;  // ||Phat_h^(n)||, n >= 1
    double q_bound(std::size_t nn) const;     // ||Q^(n)||, n >= 0
    double v_bound(std::size_t nn) const;     // ||V^(n)|| and eigenvector series
    double mu_bound(std::size_t nn) const;    // |mu^(n)|, n >= 1
    double mu_power_base(long m) const;       // Abar(m) for |(mu^2m)^(n)|
    double amplitude_bound(long m, std::size_t nn) const; // |N^(n)|
    double rank_bound(long m, std::size_t nn) const;      // |I^(n)|
    double rank_tail_bound(long m, std::size_t order, double chi) const;
};

/** Assembles the full certified ledger for one graph + perturbation. */
BoundLedger error_bounds(const GoogleMatrix& gm, const PerturbationSeries& ps,
                         const WalkSpectrum& spectrum, const WalkSpectralData& wsd,
                         const RadiusEstimate& re);

std::string ledger_to_json(const BoundLedger& bl);

} // namespace qpr

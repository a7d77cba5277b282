#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qpr/linalg.hpp"
#include "qpr/spectral.hpp"

namespace qpr {

/** Bipartite-walk operators over the doubled space C^{n^2}; pair basis index
 *  (j,k) -> j*n + k with 0-based j,k. */
struct WalkOperators {
    std::size_t n = 0;  // number of nodes
    Mat a;       // n^2 x n isometry, column j = psi_j
    Mat b;       // A A^T, projection onto span{psi_j}
    Mat swap_op; // |j,k> -> |k,j>
    Mat u;       // walk operator S (2B - I), real orthogonal
};

/** Builds the walk operators for a row-stochastic g with positive entries.
 *  Throws ScaleError when n exceeds `cap` (dense n^2 x n^2 matrices). */
WalkOperators build_walk(const Mat& g, std::size_t cap = 64);

/** (1/sqrt(n)) sum_j psi_j, the standard start state inside the walk space. */
CVec uniform_start_state(const WalkOperators& wo);

/** One eigenpair of U on the invariant subspace spanned by {psi_j, S psi_j}. */
struct WalkEigenpair {
    cxd mu;                 // e^{+-i arccos(lambda)}
    CVec vec;               // unit eigenvector in C^{n^2}
    double origin = 0.0;    // eigenvalue lambda of the symmetrized core
    int branch = 0;         // +1 / -1 half-plane, 0 when |lambda| = 1
    int t_cluster = -1;     // index of the origin cluster
};

/** Eigenpairs of U spanning the walk subspace, constructed analytically from
 *  the spectrum of the symmetrized core. */
struct WalkSpectrum {
    std::size_t n = 0;
    std::vector<WalkEigenpair> pairs;
};

WalkSpectrum walk_eigenpairs(const WalkOperators& wo, const SpectralData& sd);

/** l2 distance between psi0 and its projection onto the walk subspace. */
double walk_subspace_residual(const WalkSpectrum& ws, const CVec& psi0);

/** One clustered eigenvalue of U over the full doubled space. */
struct WalkCluster {
    cxd mu;
    int multiplicity = 0;
    CMat projection;            // spectral projection
    double isolation = 0.0;     // distance to the nearest other cluster of U
    std::vector<int> pair_indices; // members from WalkSpectrum (may be empty)
    bool complement = false;    // includes directions outside the walk subspace
};

/** Full clustered spectrum of U: walk-subspace eigenpairs plus the +-1
 *  eigenspaces of -S on the orthogonal complement. */
struct WalkSpectralData {
    std::size_t n = 0;
    std::vector<WalkCluster> clusters;

    /** Reduced resolvent sum_{k != h} P_k / (mu_k - mu_h). */
    CMat reduced_resolvent(std::size_t h) const;
    double min_isolation() const;
};

WalkSpectralData walk_spectral_data(const WalkOperators& wo, const WalkSpectrum& ws,
                                    double cluster_tol = 1e-8);

enum class RankVariant { coherent, summed };

RankVariant parse_variant(const std::string& s);

/** Instantaneous quantum rank of node i (0-based) after m double steps. */
double quantum_rank(const WalkSpectrum& ws, const CVec& psi0, std::size_t node,
                    long m, RankVariant variant);

/** Cesaro average of quantum_rank over m = 0 .. t-1. */
double average_quantum_rank(const WalkSpectrum& ws, const CVec& psi0, std::size_t node,
                            long t, RankVariant variant);

/** Limit of the Cesaro average of the summed variant: cross terms with
 *  mu_q = +-mu_p, the ones whose phases do not average out. */
double limit_quantum_rank(const WalkSpectrum& ws, const CVec& psi0, std::size_t node,
                          double cluster_tol = 1e-10);

/** Upper bound on |average(t) - limit| for the summed variant, summed over all
 *  nodes: sum over eigenpair pairs of 2|<mu_p|psi0>|^2 / (t |mu_p^2 - mu_q^2|). */
double mixing_bound(const WalkSpectrum& ws, const CVec& psi0, long t,
                    double cluster_tol = 1e-10);

} // namespace qpr

#pragma once

#include <string>
#include <vector>

#include "qpr/linalg.hpp"

namespace qpr {

/** Entrywise symmetrization t_ij = sqrt(g_ij * g_ji) of a row-stochastic
 *  matrix; symmetric, with operator norm at most 1. */
Mat build_symmetric_core(const Mat& g);

/** One clustered eigenvalue of a real symmetric matrix. */
struct SpectralCluster {
    double value = 0.0;      // cluster mean
    int multiplicity = 0;
    Mat projection;          // orthogonal projection P_h
    Mat reduced_resolvent;   // S_h = sum_{k != h} P_k / (lambda_k - lambda_h)
    Mat basis;               // n x multiplicity, orthonormal eigenvectors
    double isolation = 0.0;  // distance to the nearest other cluster
};

/** Clustered eigendecomposition of a real symmetric matrix; clusters sorted by
 *  descending eigenvalue. */
struct SpectralData {
    Vec eigenvalues;                      // all n, descending
    Mat eigenvectors;                     // columns matching eigenvalues
    std::vector<SpectralCluster> clusters;
    double cluster_tol = 0.0;
    bool merge_warning = false;           // distinct clusters closer than 2*tol

    int find_cluster(double value, double tol) const;
};

SpectralData decompose_symmetric(const Mat& t, double cluster_tol = 1e-8);

/** JSON dump of the spectrum (diagnostics). */
std::string spectrum_to_json(const SpectralData& sd);

} // namespace qpr

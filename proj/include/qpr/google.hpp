#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpr/graph.hpp"
#include "qpr/linalg.hpp"

namespace qpr {

/** Row-stochastic Google matrix G = alpha*W + (1-alpha) e v^T, where W is the
 *  out-degree-normalized adjacency with dangling rows replaced by the uniform
 *  distribution. Strictly positive whenever v is strictly positive. */
struct GoogleMatrix {
    Mat g;
    double alpha = 0.85;
    Vec v;
    std::vector<bool> dangling;

    std::size_t size() const { return g.rows(); }
};

/** Build the Google matrix; v defaults to uniform. alpha must lie in (0,1),
 *  v must be a probability vector of matching length. */
GoogleMatrix build_google(const DirectedGraph& graph, double alpha = 0.85,
                          const std::optional<Vec>& v = std::nullopt);

struct PageRankResult {
    Vec scores;   // stationary distribution, l1-normalized
    int iterations = 0;
    double residual = 0.0;
};

/** Power iteration for the stationary distribution of G (left eigenvector for
 *  eigenvalue 1), started from uniform. Throws ConvergenceError if the l1
 *  difference of iterates stays above tol for max_iter steps. */
PageRankResult classical_pagerank(const GoogleMatrix& gm, double tol = 1e-12, int max_iter = 100000);

/** Polynomial perturbation of the Google matrix:
 *  G(chi) = G + sum_{l>=1} chi^l terms[l-1].
 *  Every term has zero row sums so G(chi) stays row-stochastic; the envelope
 *  constants satisfy ||terms[l-1]|| <= a0 * b0^(l-1) (fitted when not given). */
struct PerturbationSeries {
    std::vector<Mat> terms;
    double a0 = 0.0;
    double b0 = 1.0;
    bool bounds_supplied = false;
};

/** Load a perturbation from JSON:
 *  {"order_terms":[{"order":l,"entries":[{"i":..,"j":..,"value":..}]}],
 *   "A0": optional, "B0": optional}
 *  with 1-based indices. Rejects terms whose rows do not sum to zero within
 *  1e-12 and supplied envelopes that fail to dominate the stored terms. */
PerturbationSeries load_perturbation(const std::string& path, std::size_t n);
PerturbationSeries parse_perturbation(const std::string& text, std::size_t n,
                                      const std::string& origin = "<memory>");

/** Evaluate G(chi); checks it stays entrywise positive and row-stochastic. */
Mat eval_perturbed(const GoogleMatrix& gm, const PerturbationSeries& ps, double chi);

/** Analytic continuation used by the coefficient oracle (no positivity check;
 *  requires the relative perturbation of every entry to stay below 1). */
CMat eval_perturbed_complex(const GoogleMatrix& gm, const PerturbationSeries& ps, cxd chi);

} // namespace qpr

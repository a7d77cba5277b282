#include "qpr/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qpr/errors.hpp"

namespace qpr {

Mat build_symmetric_core(const Mat& g) {
    const std::size_t n = g.rows();
    if (g.cols() != n) throw std::invalid_argument("build_symmetric_core: square matrix required");
    Mat t(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double p = g(i, j) * g(j, i);
            if (p < 0.0)
                throw std::invalid_argument("build_symmetric_core: negative product g_ij*g_ji");
            t(i, j) = std::sqrt(p);
        }
    return t;
}

namespace {

// Deterministic sign: make the largest-magnitude entry of each column positive.
void fix_column_signs(Mat& v) {
    for (std::size_t c = 0; c < v.cols(); ++c) {
        std::size_t best = 0;
        double best_abs = 0.0;
        for (std::size_t r = 0; r < v.rows(); ++r) {
            const double a = std::abs(v(r, c));
            if (a > best_abs + 1e-15) { best_abs = a; best = r; }
        }
        if (v(best, c) < 0.0)
            for (std::size_t r = 0; r < v.rows(); ++r) v(r, c) = -v(r, c);
    }
}

} // namespace

int SpectralData::find_cluster(double value, double tol) const {
    for (std::size_t h = 0; h < clusters.size(); ++h)
        if (std::abs(clusters[h].value - value) <= tol) return static_cast<int>(h);
    return -1;
}

SpectralData decompose_symmetric(const Mat& t, double cluster_tol) {
    const std::size_t n = t.rows();
    if (t.cols() != n) throw std::invalid_argument("decompose_symmetric: square matrix required");
    const double asym = max_abs(t - transpose(t));
    if (asym > 1e-12)
        throw std::invalid_argument("decompose_symmetric: matrix is not symmetric");

    SymEig eig = eig_sym(t);

    SpectralData sd;
    sd.cluster_tol = cluster_tol;
    sd.eigenvalues = Vec(n);
    sd.eigenvectors = Mat(n, n);
    // eig_sym returns ascending order; store descending
    for (std::size_t k = 0; k < n; ++k) {
        sd.eigenvalues[k] = eig.values[n - 1 - k];
        for (std::size_t r = 0; r < n; ++r)
            sd.eigenvectors(r, k) = eig.vectors(r, n - 1 - k);
    }
    fix_column_signs(sd.eigenvectors);

    // greedy contiguous clustering of the sorted eigenvalues
    std::vector<std::pair<std::size_t, std::size_t>> ranges; // [begin, end)
    std::size_t begin = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (k == n || std::abs(sd.eigenvalues[k] - sd.eigenvalues[k - 1]) > cluster_tol) {
            ranges.emplace_back(begin, k);
            begin = k;
        }
    }

    for (const auto& [b, e] : ranges) {
        SpectralCluster cl;
        cl.multiplicity = static_cast<int>(e - b);
        double mean = 0.0;
        for (std::size_t k = b; k < e; ++k) mean += sd.eigenvalues[k];
        cl.value = mean / static_cast<double>(cl.multiplicity);
        cl.basis = Mat(n, e - b);
        for (std::size_t k = b; k < e; ++k)
            for (std::size_t r = 0; r < n; ++r)
                cl.basis(r, k - b) = sd.eigenvectors(r, k);
        cl.projection = Mat(n, n);
        for (std::size_t k = 0; k < e - b; ++k) {
            Vec col(n);
            for (std::size_t r = 0; r < n; ++r) col[r] = cl.basis(r, k);
            add_outer(cl.projection, col, col);
        }
        sd.clusters.push_back(std::move(cl));
    }

    // isolation distances, merge warning, reduced resolvents
    for (std::size_t h = 0; h < sd.clusters.size(); ++h) {
        double iso = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < sd.clusters.size(); ++k) {
            if (k == h) continue;
            iso = std::min(iso, std::abs(sd.clusters[k].value - sd.clusters[h].value));
        }
        sd.clusters[h].isolation = iso;
        if (iso < 2.0 * cluster_tol) sd.merge_warning = true;

        Mat s(n, n);
        for (std::size_t k = 0; k < sd.clusters.size(); ++k) {
            if (k == h) continue;
            const double gap = sd.clusters[k].value - sd.clusters[h].value;
            s += (1.0 / gap) * sd.clusters[k].projection;
        }
        sd.clusters[h].reduced_resolvent = std::move(s);
    }

    return sd;
}

std::string spectrum_to_json(const SpectralData& sd) {
    std::string out = "{\"eigenvalues\":[";
    char buf[64];
    for (std::size_t k = 0; k < sd.eigenvalues.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.16e", sd.eigenvalues[k]);
        if (k) out += ',';
        out += buf;
    }
    out += "],\"clusters\":[";
    for (std::size_t h = 0; h < sd.clusters.size(); ++h) {
        const auto& cl = sd.clusters[h];
        if (h) out += ',';
        std::snprintf(buf, sizeof buf, "{\"value\":%.16e,\"multiplicity\":%d,\"isolation\":%.16e}",
                      cl.value, cl.multiplicity, cl.isolation);
        out += buf;
    }
    out += "]}";
    return out;
}

} // namespace qpr

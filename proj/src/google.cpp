#include "qpr/google.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qpr/errors.hpp"

namespace qpr {

using nlohmann::json;

GoogleMatrix build_google(const DirectedGraph& graph, double alpha, const std::optional<Vec>& v_opt) {
    const std::size_t n = graph.n;
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ParseError("alpha must lie strictly between 0 and 1");
    Vec v;
    if (v_opt) {
        v = *v_opt;
        if (v.size() != n) throw ParseError("teleportation vector length does not match node count");
        double sum = 0.0;
        for (double x : v) {
            if (x < 0.0) throw ParseError("teleportation vector must be nonnegative");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ParseError("teleportation vector must sum to 1");
    } else {
        v.assign(n, 1.0 / static_cast<double>(n));
    }

    GoogleMatrix gm;
    gm.alpha = alpha;
    gm.v = v;
    gm.dangling.assign(n, false);
    gm.g = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto nbrs = graph.out_neighbors(static_cast<int>(i) + 1);
        if (nbrs.empty()) {
            gm.dangling[i] = true;
            for (std::size_t j = 0; j < n; ++j)
                gm.g(i, j) = alpha / static_cast<double>(n) + (1.0 - alpha) * v[j];
        } else {
            const double w = alpha / static_cast<double>(nbrs.size());
            for (std::size_t j = 0; j < n; ++j) gm.g(i, j) = (1.0 - alpha) * v[j];
            for (int dst : nbrs) gm.g(i, dst - 1) += w;
        }
    }
    return gm;
}

PageRankResult classical_pagerank(const GoogleMatrix& gm, double tol, int max_iter) {
    const std::size_t n = gm.size();
    Mat gt = transpose(gm.g);
    Vec x(n, 1.0 / static_cast<double>(n));
    double diff = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Vec y = matvec(gt, x);
        double sum = 0.0;
        for (double val : y) sum += val;
        for (double& val : y) val /= sum;
        diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff += std::abs(y[i] - x[i]);
        x = std::move(y);
        if (diff <= tol) {
            PageRankResult res;
            res.scores = std::move(x);
            res.iterations = it;
            // report the fixed-point residual ||x^T G - x^T||_1
            Vec gx = matvec(gt, res.scores);
            res.residual = 0.0;
            for (std::size_t i = 0; i < n; ++i) res.residual += std::abs(gx[i] - res.scores[i]);
            return res;
        }
    }
    std::ostringstream msg;
    msg << "power iteration did not converge in " << max_iter
        << " iterations (last l1 step " << diff << ", tol " << tol << ")";
    throw ConvergenceError(msg.str());
}

namespace {

PerturbationSeries finish_perturbation(PerturbationSeries ps, const std::string& origin) {
    for (std::size_t l = 0; l < ps.terms.size(); ++l) {
        const Mat& m = ps.terms[l];
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j);
            if (std::abs(row) > 1e-12)
                throw AdmissibilityError(origin + ": order " + std::to_string(l + 1) + " row " +
                                         std::to_string(i + 1) + " sums to " + std::to_string(row) +
                                         ", expected 0");
        }
    }
    double fit_a0 = 0.0;
    for (std::size_t l = 0; l < ps.terms.size(); ++l)
        fit_a0 = std::max(fit_a0, op_norm(ps.terms[l]));
    if (ps.bounds_supplied) {
        if (!(ps.a0 > 0.0) || !(ps.b0 >= 1.0))
            throw AdmissibilityError(origin + ": envelope constants need A0 > 0 and B0 >= 1");
        for (std::size_t l = 0; l < ps.terms.size(); ++l) {
            double bound = ps.a0 * std::pow(ps.b0, static_cast<double>(l));
            if (op_norm(ps.terms[l]) > bound * (1.0 + 1e-12))
                throw AdmissibilityError(origin + ": order " + std::to_string(l + 1) +
                                         " exceeds the supplied envelope");
        }
    } else {
        ps.a0 = fit_a0;
        ps.b0 = 1.0;
    }
    return ps;
}

} // namespace

PerturbationSeries parse_perturbation(const std::string& text, std::size_t n, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(origin + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("order_terms") || !doc["order_terms"].is_array())
        throw ParseError(origin + ": expected an object with an 'order_terms' array");

    PerturbationSeries ps;
    for (const auto& block : doc["order_terms"]) {
        if (!block.is_object() || !block.contains("order") || !block.contains("entries"))
            throw ParseError(origin + ": each order term needs 'order' and 'entries'");
        long order = 0;
        try {
            order = block["order"].get<long>();
        } catch (...) {
            throw ParseError(origin + ": 'order' must be an integer");
        }
        if (order < 1) throw ParseError(origin + ": orders are 1-based");
        if (static_cast<std::size_t>(order) > ps.terms.size())
            ps.terms.resize(static_cast<std::size_t>(order), Mat(n, n));
        Mat& m = ps.terms[static_cast<std::size_t>(order) - 1];
        if (!block["entries"].is_array())
            throw ParseError(origin + ": 'entries' must be an array");
        for (const auto& e : block["entries"]) {
            if (!e.is_object() || !e.contains("i") || !e.contains("j") || !e.contains("value"))
                throw ParseError(origin + ": each entry needs 'i', 'j', 'value'");
            long i = 0, j = 0;
            double val = 0.0;
            try {
                i = e["i"].get<long>();
                j = e["j"].get<long>();
                val = e["value"].get<double>();
            } catch (...) {
                throw ParseError(origin + ": malformed entry");
            }
            if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
                throw ParseError(origin + ": entry index out of range for a " + std::to_string(n) +
                                 "-node graph");
            m(static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1) += val;
        }
    }
    if (ps.terms.empty()) throw ParseError(origin + ": no perturbation terms given");
    if (doc.contains("A0") || doc.contains("B0")) {
        if (!doc.contains("A0") || !doc.contains("B0"))
            throw ParseError(origin + ": A0 and B0 must be supplied together");
        ps.a0 = doc["A0"].get<double>();
        ps.b0 = doc["B0"].get<double>();
        ps.bounds_supplied = true;
    }
    return finish_perturbation(std::move(ps), origin);
}

PerturbationSeries load_perturbation(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open perturbation file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_perturbation(buf.str(), n, path);
}

Mat eval_perturbed(const GoogleMatrix& gm, const PerturbationSeries& ps, double chi) {
    const std::size_t n = gm.size();
    Mat g = gm.g;
    double p = 1.0;
    for (const Mat& term : ps.terms) {
        p *= chi;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) g(i, j) += p * term(i, j);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(g(i, j) > 0.0))
                throw ChiDomainError("perturbed matrix loses positivity at chi = " + std::to_string(chi));
            row += g(i, j);
        }
        if (std::abs(row - 1.0) > 1e-10)
            throw ChiDomainError("perturbed matrix row " + std::to_string(i + 1) +
                                 " is not stochastic at chi = " + std::to_string(chi));
    }
    return g;
}

CMat eval_perturbed_complex(const GoogleMatrix& gm, const PerturbationSeries& ps, cxd chi) {
    const std::size_t n = gm.size();
    CMat g = to_complex(gm.g);
    cxd p = 1.0;
    for (const Mat& term : ps.terms) {
        p *= chi;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) g(i, j) += p * term(i, j);
    }
    // the square-root branches downstream need every entry to stay within the
    // disc of relative radius 1 around its unperturbed value
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double rel = std::abs(g(i, j) - gm.g(i, j)) / gm.g(i, j);
            if (rel >= 1.0)
                throw ChiDomainError("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                     ") leaves the admissible disc at |chi| = " +
                                     std::to_string(std::abs(chi)));
        }
    return g;
}

} // namespace qpr

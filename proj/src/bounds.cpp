#include "qpr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qpr/errors.hpp"

namespace qpr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kE = std::exp(1.0);

double pow_env(double a, double b, std::size_t n) {
    // a * b^(n-1) for n >= 1
    return a * std::pow(b, static_cast<double>(n) - 1.0);
}

} // namespace

EnvelopePrefix envelope_prefix(const GoogleMatrix& gm, const PerturbationSeries& ps) {
    EnvelopePrefix e;
    const std::size_t n = gm.size();

    if (ps.bounds_supplied) {
        e.a0 = ps.a0;
        e.b0 = ps.b0;
        for (std::size_t l = 0; l < ps.terms.size(); ++l) {
            const double nrm = op_norm(ps.terms[l]);
            const double cap = e.a0 * std::pow(e.b0, static_cast<double>(l));
            if (nrm > cap * (1.0 + 1e-12) + 1e-300)
                throw AdmissibilityError(
                    "perturbation term " + std::to_string(l + 1) +
                    " violates the supplied envelope a0*b0^(l-1)");
        }
    } else {
        e.b0 = 1.0;
        e.a0 = 0.0;
        for (const auto& term : ps.terms) e.a0 = std::max(e.a0, op_norm(term));
    }

    e.g_min = kInf;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) e.g_min = std::min(e.g_min, gm.g(i, j));
    if (!(e.g_min > 0.0))
        throw AdmissibilityError("envelope_prefix: matrix has a non-positive entry");

    const Mat t = build_symmetric_core(gm.g);
    e.t_max = max_abs(t);

    e.delta = 0.5;
    if (e.a0 == 0.0) return e; // no perturbation: every envelope is zero

    e.eps0 = e.a0 / (e.delta * e.b0 * e.g_min);
    e.a1 = (1.0 - 1.0 / std::sqrt(2.0)) * e.eps0 * e.b0;
    e.b1 = e.b0 * (1.0 + e.eps0);

    const double row_factor = e.a1 * (2.0 + e.a1 / e.b1);
    e.a2 = 2.0 * static_cast<double>(n) * row_factor;
    e.b2 = kE * e.b1;
    e.a3 = static_cast<double>(n) * row_factor;
    e.b3 = kE * e.b1;
    return e;
}

namespace {

// Largest x with sum_l |d_l| x^l <= target, by bisection; the left side is
// increasing, so the certificate survives rounding slack.
double budget_radius(const std::vector<double>& d, double target, double cap) {
    auto spend = [&](double x) {
        double acc = 0.0, xp = x;
        for (double dl : d) {
            acc += std::abs(dl) * xp;
            xp *= x;
        }
        return acc;
    };
    if (spend(cap) <= target) return kInf;
    double lo = 0.0, hi = cap;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (spend(mid) <= target ? lo : hi) = mid;
    }
    return lo;
}

// Measured prefix of the core series: 2-norms of the computed coefficients.
std::vector<double> core_norm_prefix(const GoogleMatrix& gm, const PerturbationSeries& ps,
                                     std::size_t count) {
    const SeriesMat ts = core_series(gm.g, ps, count);
    std::vector<double> norms(count);
    for (std::size_t n = 1; n <= count; ++n) norms[n - 1] = op_norm(ts.c[n]);
    return norms;
}

// Largest x with sum_{n<=K} norms[n-1] x^n + envA envB^K x^{K+1} / (1 - envB x)
// <= target: the measured coefficients spend the budget at low orders and the
// certified envelope pays for the unseen tail.  The left side is increasing,
// so bisection converges from below and the certificate survives rounding.
double mixed_radius(const std::vector<double>& norms, double envA, double envB,
                    double target) {
    const double cap = (1.0 - 1e-9) / envB;
    const double goal = target * (1.0 - 1e-9);
    auto spend = [&](double x) {
        double acc = 0.0, xp = x;
        for (double nn : norms) {
            acc += nn * xp;
            xp *= x;
        }
        return acc + envA * std::pow(envB, static_cast<double>(norms.size())) * xp /
                         (1.0 - envB * x);
    };
    if (spend(cap) <= goal) return cap;
    double lo = 0.0, hi = cap;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (spend(mid) <= goal ? lo : hi) = mid;
    }
    return lo;
}

struct TreeWalkResult {
    double r_min = kInf;
    bool resolved = true;
};

// Radii along one reduction path.  The root contour keeps the whole cluster
// within half its isolation, and for a normal family the root condition can
// be checked against the measured coefficient norms directly; reduced child
// families are never materialized beyond the expansion order, so deeper
// levels fall back to the propagated envelope closed forms.
void walk_radii(const EigenNode& node, double famA, double famB, std::size_t order,
                const std::vector<double>* root_norms, TreeWalkResult& out) {
    const double m = std::max(1.0, node.resolvent_norm);
    if (root_norms) {
        out.r_min = std::min(out.r_min, mixed_radius(*root_norms, famA, famB,
                                                     node.resolvent_gap / 2.0));
        if (node.leaf) {
            if (node.multiplicity > 1 && node.tail.c.size() <= 1 &&
                static_cast<std::size_t>(node.level) < order)
                out.resolved = false; // still degenerate when the order ran out
            return;
        }
        const double childB = famB + 4.0 * famA * m;
        const double childA = 2.0 * famA * (childB + 2.0 * node.shift * m);
        for (const auto& child : node.children)
            walk_radii(child, childA, childB, order, nullptr, out);
        return;
    }
    if (node.leaf) {
        if (node.multiplicity == 1) {
            out.r_min = std::min(out.r_min, 1.0 / (famB + 4.0 * famA * m));
        } else if (node.tail.c.size() > 1) {
            // scalar branch: constrained by its own restricted family
            out.r_min = std::min(out.r_min, 1.0 / (famB + 4.0 * famA * m));
        } else if (static_cast<std::size_t>(node.level) < order) {
            out.resolved = false; // still degenerate when the order ran out
        }
        return;
    }
    out.r_min = std::min(out.r_min, 1.0 / (2.0 * famA / node.resolvent_gap + famB));
    const double childB = famB + 4.0 * famA * m;
    const double childA = 2.0 * famA * (childB + 2.0 * node.shift * m);
    for (const auto& child : node.children)
        walk_radii(child, childA, childB, order, nullptr, out);
}

} // namespace

RadiusEstimate convergence_radius(const GoogleMatrix& gm, const PerturbationSeries& ps,
                                  const SpectralData& sd, const ReductionTree& tree,
                                  const std::vector<EigenBranch>&) {
    RadiusEstimate re;
    const EnvelopePrefix pre = envelope_prefix(gm, ps);
    const std::size_t n = gm.size();

    for (const auto& cl : sd.clusters) re.varrho = std::max(re.varrho, cl.isolation / 2.0);

    if (pre.a0 == 0.0) {
        re.r_entry = re.r_tree = re.r1 = re.r2 = re.r0 = kInf;
        re.root_radii.assign(sd.clusters.size(), kInf);
        return re;
    }

    // entrywise: the perturbed entry must stay away from zero
    re.r_entry = kInf;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> d;
            d.reserve(ps.terms.size());
            bool any = false;
            for (const auto& term : ps.terms) {
                d.push_back(term(i, j));
                any = any || term(i, j) != 0.0;
            }
            if (!any) continue;
            re.r_entry = std::min(re.r_entry, budget_radius(d, gm.g(i, j), 1e12));
        }

    // reduction tree: every contour and every family series must converge;
    // the measured prefix runs well past the expansion order because the
    // closed-form envelope alone would waste most of the contour budget
    const std::vector<double> norms = core_norm_prefix(gm, ps, 12);
    re.r_tree = kInf;
    for (const auto& root : tree.roots) {
        TreeWalkResult tw;
        walk_radii(root, pre.a3, pre.b3, tree.order, &norms, tw);
        re.root_radii.push_back(tw.r_min);
        re.r_tree = std::min(re.r_tree, tw.r_min);
        re.resolved = re.resolved && tw.resolved;
    }
    re.r1 = std::min(re.r_entry, re.r_tree);

    // unit-disc side: below the root radius every perturbed eigenvalue stays
    // within the contour spend of its origin, so it is certified inside the
    // unit circle while the spend is under the origin's headroom.  Origins on
    // the circle are branch points handled separately.
    double headroom = kInf;
    for (const auto& cl : sd.clusters)
        if (std::abs(cl.value) < 1.0 - 1e-10)
            headroom = std::min(headroom, 1.0 - std::abs(cl.value));
    re.r2 = std::isinf(headroom)
                ? re.r1
                : std::min(re.r1, mixed_radius(norms, pre.a3, pre.b3, headroom));
    re.r0 = std::min(re.r1, re.r2);
    return re;
}

double eigenvalue_tail_bound(const RadiusEstimate& re, std::size_t order, double chi) {
    if (std::isinf(re.r1)) return 0.0; // zero perturbation
    if (!re.resolved) return kInf;
    const double ratio = std::abs(chi) / re.r1;
    if (ratio >= 1.0) return kInf;
    const double a_l = re.varrho / re.r1;
    return a_l * std::abs(chi) * std::pow(ratio, static_cast<double>(order)) / (1.0 - ratio);
}

BoundLedger error_bounds(const GoogleMatrix& gm, const PerturbationSeries& ps,
                         const WalkSpectrum& spectrum, const WalkSpectralData& wsd,
                         const RadiusEstimate& re) {
    BoundLedger bl;
    bl.prefix = envelope_prefix(gm, ps);
    bl.radius = re;
    bl.n = gm.size();
    bl.walk_dim = bl.n * bl.n;
    bl.pair_count = spectrum.pairs.size();
    bl.cluster_count = wsd.clusters.size();
    bl.d_hat_min = wsd.min_isolation();

    bl.eps1 = 1.0;
    bool any_expanded = false;
    for (const auto& p : spectrum.pairs) {
        if (p.branch == 0) continue;
        bl.eps1 = any_expanded ? std::min(bl.eps1, 1.0 - p.origin * p.origin)
                               : 1.0 - p.origin * p.origin;
        any_expanded = true;
    }

    if (bl.prefix.a0 == 0.0) return bl; // all envelopes stay zero

    const double shat = static_cast<double>(bl.cluster_count);
    bl.a6 = 2.0 * bl.prefix.a2 / bl.d_hat_min;
    bl.b6 = bl.prefix.b2 + 2.0 * bl.prefix.a2 / bl.d_hat_min;
    bl.q0 = shat * bl.a6;
    bl.a7 = 2.0 * shat * bl.a6 * (bl.b6 + bl.a6);
    bl.b7 = 2.0 * bl.b6;
    bl.b9 = std::max({1.0, 2.0 * bl.b7, bl.q0 + 2.0 * bl.a7});

    if (std::isfinite(re.r1) && re.r1 > 0.0) {
        const double a_l = re.varrho / re.r1;
        const double b_l = 1.0 / re.r1;
        const double ay = a_l * (2.0 + a_l / b_l);
        const double by = kE * b_l;
        const double delta1 = 0.5;
        const double eps_tilde = ay / (delta1 * bl.eps1 * by);
        bl.a12 = (1.0 - 1.0 / std::sqrt(2.0)) * eps_tilde * by;
        bl.b12 = by * (1.0 + eps_tilde);
        bl.a13 = a_l + bl.a12;
        bl.b13 = std::max(b_l, bl.b12);
        bl.b14 = bl.a13 + bl.b13;
    }
    bl.bstar = std::max({bl.b14, bl.b9, 1.0});
    return bl;
}

double BoundLedger::psi_bound(std::size_t l) const {
    return l == 0 ? 1.0 : pow_env(prefix.a1, prefix.b1, l);
}
double BoundLedger::u_bound(std::size_t nn) const {
    return nn == 0 ? 1.0 : pow_env(prefix.a2, prefix.b2, nn);
}
double BoundLedger::t_bound(std::size_t nn) const {
    return nn == 0 ? 1.0 : pow_env(prefix.a3, prefix.b3, nn);
}
double BoundLedger::lambda_bound(std::size_t nn) const {
    if (nn == 0) return 1.0;
    if (prefix.a0 == 0.0) return 0.0;
    if (!radius.resolved || !std::isfinite(radius.r1)) return kInf;
    return pow_env(radius.varrho / radius.r1, 1.0 / radius.r1, nn);
}
double BoundLedger::proj_bound(std::size_t nn) const {
    return nn == 0 ? 1.0 : pow_env(a6, b6, nn);
}
double BoundLedger::q_bound(std::size_t nn) const {
    return nn == 0 ? q0 : pow_env(a7, b7, nn);
}
double BoundLedger::v_bound(std::size_t nn) const {
    return std::pow(b9, static_cast<double>(nn));
}
double BoundLedger::mu_bound(std::size_t nn) const {
    if (nn == 0) return 1.0;
    if (prefix.a0 == 0.0) return 0.0;
    if (!radius.resolved) return kInf;
    return pow_env(a13, b13, nn);
}
double BoundLedger::mu_power_base(long m) const {
    return std::max(std::pow(4.0, static_cast<double>(m)) * a13, 1.0);
}
double BoundLedger::amplitude_bound(long m, std::size_t nn) const {
    if (prefix.a0 == 0.0 && nn > 0) return 0.0;
    if (!radius.resolved) return kInf;
    const double ebar = std::max(b9, 1.0);
    const double c = 3.0 * static_cast<double>(pair_count) *
                     std::sqrt(static_cast<double>(n)) * mu_power_base(m) * ebar * ebar;
    return c * std::pow(3.0 * bstar, static_cast<double>(nn));
}
double BoundLedger::rank_bound(long m, std::size_t nn) const {
    if (prefix.a0 == 0.0 && nn > 0) return 0.0;
    if (!radius.resolved) return kInf;
    const double ebar = std::max(b9, 1.0);
    const double c = 3.0 * static_cast<double>(pair_count) *
                     std::sqrt(static_cast<double>(n)) * mu_power_base(m) * ebar * ebar;
    return 2.0 * c * c * std::pow(6.0 * bstar, static_cast<double>(nn));
}
double BoundLedger::rank_tail_bound(long m, std::size_t order, double chi) const {
    if (prefix.a0 == 0.0) return 0.0;
    if (!radius.resolved) return kInf;
    const double x = 6.0 * bstar * std::abs(chi);
    if (x >= 1.0) return kInf;
    const double ebar = std::max(b9, 1.0);
    const double c = 3.0 * static_cast<double>(pair_count) *
                     std::sqrt(static_cast<double>(n)) * mu_power_base(m) * ebar * ebar;
    return 2.0 * c * c * std::pow(x, static_cast<double>(order) + 1.0) / (1.0 - x);
}

namespace {

void json_num(std::ostringstream& os, const char* key, double v, bool comma = true) {
    char buf[64];
    if (std::isfinite(v))
        std::snprintf(buf, sizeof buf, "%.17g", v);
    else
        std::snprintf(buf, sizeof buf, "\"%s\"", v > 0 ? "inf" : "-inf");
    os << "\"" << key << "\":" << buf;
    if (comma) os << ",";
}

} // namespace

std::string ledger_to_json(const BoundLedger& bl) {
    std::ostringstream os;
    os << "{";
    json_num(os, "a0", bl.prefix.a0);
    json_num(os, "b0", bl.prefix.b0);
    json_num(os, "g_min", bl.prefix.g_min);
    json_num(os, "eps0", bl.prefix.eps0);
    json_num(os, "a1", bl.prefix.a1);
    json_num(os, "b1", bl.prefix.b1);
    json_num(os, "a2", bl.prefix.a2);
    json_num(os, "b2", bl.prefix.b2);
    json_num(os, "a3", bl.prefix.a3);
    json_num(os, "b3", bl.prefix.b3);
    json_num(os, "r_entry", bl.radius.r_entry);
    json_num(os, "r_tree", bl.radius.r_tree);
    json_num(os, "r1", bl.radius.r1);
    json_num(os, "r2", bl.radius.r2);
    json_num(os, "r0", bl.radius.r0);
    json_num(os, "varrho", bl.radius.varrho);
    os << "\"resolved\":" << (bl.radius.resolved ? "true" : "false") << ",";
    os << "\"n\":" << bl.n << ",";
    os << "\"walk_dim\":" << bl.walk_dim << ",";
    os << "\"pair_count\":" << bl.pair_count << ",";
    os << "\"cluster_count\":" << bl.cluster_count << ",";
    json_num(os, "d_hat_min", bl.d_hat_min);
    json_num(os, "a6", bl.a6);
    json_num(os, "b6", bl.b6);
    json_num(os, "q0", bl.q0);
    json_num(os, "a7", bl.a7);
    json_num(os, "b7", bl.b7);
    json_num(os, "b9", bl.b9);
    json_num(os, "eps1", bl.eps1);
    json_num(os, "a13", bl.a13);
    json_num(os, "b13", bl.b13);
    json_num(os, "b14", bl.b14);
    json_num(os, "bstar", bl.bstar, false);
    os << "}";
    return os.str();
}

} // namespace qpr

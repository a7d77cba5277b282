#include "qpr/series.hpp"

#include <stdexcept>

namespace qpr {

namespace {

void comps_rec(int n, int r, int min_part, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
    if (r == 1) {
        if (n >= min_part) {
            cur.push_back(n);
            out.push_back(cur);
            cur.pop_back();
        }
        return;
    }
    for (int first = min_part; first <= n - min_part * (r - 1); ++first) {
        cur.push_back(first);
        comps_rec(n - first, r - 1, min_part, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<std::vector<int>> compositions_positive(int n, int r) {
    std::vector<std::vector<int>> out;
    if (n < r || r < 1) return out;
    std::vector<int> cur;
    comps_rec(n, r, 1, cur, out);
    return out;
}

std::vector<std::vector<int>> compositions_nonneg(int s, int q) {
    std::vector<std::vector<int>> out;
    if (s < 0 || q < 1) return out;
    std::vector<int> cur;
    comps_rec(s, q, 0, cur, out);
    return out;
}

double binom_half(int r) {
    double v = 1.0;
    for (int i = 0; i < r; ++i) v *= (0.5 - i) / (i + 1);
    return v;
}

SeriesScalar sqrt_series(double base, const std::vector<double>& deltas, std::size_t K) {
    if (!(base > 0.0)) throw std::invalid_argument("sqrt_series: base must be positive");
    const double root = std::sqrt(base);
    SeriesScalar out;
    out.c.assign(K + 1, 0.0);
    out.c[0] = root;
    for (std::size_t n = 1; n <= K; ++n) {
        double sum = 0.0;
        for (int r = 1; r <= static_cast<int>(n); ++r) {
            double inner = 0.0;
            for (const auto& comp : compositions_positive(static_cast<int>(n), r)) {
                double prod = 1.0;
                for (int p : comp) {
                    double d = (p - 1 < static_cast<int>(deltas.size())) ? deltas[p - 1] : 0.0;
                    prod *= d / base;
                }
                inner += prod;
            }
            sum += binom_half(r) * inner;
        }
        out.c[n] = root * sum;
    }
    return out;
}

} // namespace qpr

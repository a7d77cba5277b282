#pragma once

#include <cstddef>
#include <vector>

#include "qpr/linalg.hpp"

namespace qpr {

// ---- coefficient-type helpers ----------------------------------------------

inline double zero_like(double) { return 0.0; }
inline cxd zero_like(const cxd&) { return cxd{}; }
template <class T>
Matrix<T> zero_like(const Matrix<T>& m) {
    return Matrix<T>(m.rows(), m.cols());
}
template <class T>
std::vector<T> zero_like(const std::vector<T>& v) {
    return std::vector<T>(v.size());
}

inline double coeff_prod(double a, double b) { return a * b; }
inline cxd coeff_prod(const cxd& a, const cxd& b) { return a * b; }
template <class T>
Matrix<T> coeff_prod(const Matrix<T>& a, const Matrix<T>& b) {
    return matmul(a, b);
}

inline void coeff_add(double& a, const double& b) { a += b; }
inline void coeff_add(cxd& a, const cxd& b) { a += b; }
template <class T>
void coeff_add(Matrix<T>& a, const Matrix<T>& b) {
    a += b;
}
template <class T>
void coeff_add(std::vector<T>& a, const std::vector<T>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

/** Truncated power series; c[n] is the coefficient of chi^n. */
template <class T>
struct Series {
    std::vector<T> c;

    Series() = default;
    explicit Series(std::vector<T> coeffs) : c(std::move(coeffs)) {}

    std::size_t order() const { return c.empty() ? 0 : c.size() - 1; }

    /** Coefficient n, or a zero of matching shape past the stored order. */
    T at(std::size_t n) const {
        if (n < c.size()) return c[n];
        return zero_like(c.front());
    }
};

using SeriesScalar = Series<double>;
using SeriesComplex = Series<cxd>;
using SeriesMat = Series<Mat>;
using SeriesCMat = Series<CMat>;
using SeriesVec = Series<Vec>;
using SeriesCVec = Series<CVec>;

template <class T>
Series<T> series_add(const Series<T>& a, const Series<T>& b) {
    Series<T> r;
    std::size_t n = std::max(a.c.size(), b.c.size());
    r.c.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        T v = k < a.c.size() ? a.c[k] : zero_like(b.c.front());
        if (k < b.c.size()) coeff_add(v, b.c[k]);
        r.c.push_back(std::move(v));
    }
    return r;
}

template <class T, class S>
Series<T> series_scale(Series<T> a, S s) {
    for (auto& v : a.c) v *= s;
    return a;
}

/** Cauchy product truncated at order K. */
template <class T>
Series<T> series_mul(const Series<T>& a, const Series<T>& b, std::size_t K) {
    Series<T> r;
    r.c.reserve(K + 1);
    for (std::size_t n = 0; n <= K; ++n) {
        T acc = zero_like(coeff_prod(a.c.front(), b.c.front()));
        for (std::size_t k = 0; k <= n; ++k) {
            if (k >= a.c.size() || n - k >= b.c.size()) continue;
            coeff_add(acc, coeff_prod(a.c[k], b.c[n - k]));
        }
        r.c.push_back(std::move(acc));
    }
    return r;
}

/** Integer power by binary exponentiation, truncated at order K. */
template <class T>
Series<T> series_pow(const Series<T>& a, unsigned long p, std::size_t K, const T& one) {
    Series<T> r;
    r.c.assign(1, one);
    Series<T> base = a;
    while (p > 0) {
        if (p & 1UL) r = series_mul(r, base, K);
        base = series_mul(base, base, K);
        p >>= 1UL;
    }
    return r;
}

template <class T>
Series<T> series_truncate(Series<T> a, std::size_t K) {
    if (a.c.size() > K + 1) a.c.resize(K + 1);
    return a;
}

/** Horner evaluation at a point. */
template <class T, class X>
auto series_eval(const Series<T>& a, X chi) {
    using R = decltype(a.c.front() * chi);
    R acc = R(a.c.back());
    for (std::size_t k = a.c.size() - 1; k-- > 0;) acc = acc * chi + R(a.c[k]);
    return acc;
}

inline SeriesComplex series_conj(const SeriesComplex& a) {
    SeriesComplex r;
    r.c.reserve(a.c.size());
    for (const auto& v : a.c) r.c.push_back(std::conj(v));
    return r;
}

// ---- composition enumeration ----------------------------------------------

/** All ordered compositions of n into exactly r positive parts. */
std::vector<std::vector<int>> compositions_positive(int n, int r);

/** All ordered compositions of s into exactly q parts >= 0. */
std::vector<std::vector<int>> compositions_nonneg(int s, int q);

/** Generalized binomial coefficient C(1/2, r). */
double binom_half(int r);

/** Coefficients 0..K of sqrt(g(chi)) where g(chi) = base + sum_n deltas[n-1] chi^n,
 *  base > 0. Coefficient n is built from the explicit composition sum
 *  sqrt(base) * sum_r C(1/2,r) sum_{p_1+..+p_r=n} prod_i deltas[p_i]/base. */
SeriesScalar sqrt_series(double base, const std::vector<double>& deltas, std::size_t K);

} // namespace qpr

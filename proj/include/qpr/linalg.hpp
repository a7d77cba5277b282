#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace qpr {

using cxd = std::complex<double>;
using Vec = std::vector<double>;
using CVec = std::vector<cxd>;

/** Dense row-major matrix over double or complex<double>. */
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    Matrix& operator+=(const Matrix& o) {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(T s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(T s, Matrix a) { return a *= s; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using Mat = Matrix<double>;
using CMat = Matrix<cxd>;

/** Kernel backend selection; parallel uses OpenMP when compiled in. */
enum class Backend { serial, parallel };
Backend kernel_backend();
void set_kernel_backend(Backend b);

// ---- core kernels ---------------------------------------------------------
// The parallel variants split work over output rows; each output element is
// accumulated in a fixed serial order, so results are identical to the serial
// reference for any thread count.

template <class T>
Matrix<T> matmul_serial(const Matrix<T>& a, const Matrix<T>& b) {
    assert(a.cols() == b.rows());
    Matrix<T> c(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const T ail = a(i, l);
            if (ail == T{}) continue;
            for (std::size_t j = 0; j < m; ++j) c(i, j) += ail * b(l, j);
        }
    }
    return c;
}

template <class T>
Matrix<T> matmul_parallel(const Matrix<T>& a, const Matrix<T>& b) {
    assert(a.cols() == b.rows());
    Matrix<T> c(a.rows(), b.cols());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.rows());
    const std::size_t k = a.cols(), m = b.cols();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const T ail = a(i, l);
            if (ail == T{}) continue;
            for (std::size_t j = 0; j < m; ++j) c(i, j) += ail * b(l, j);
        }
    }
    return c;
}

template <class T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
    return kernel_backend() == Backend::parallel ? matmul_parallel(a, b) : matmul_serial(a, b);
}

template <class T>
std::vector<T> matvec_serial(const Matrix<T>& a, const std::vector<T>& x) {
    assert(a.cols() == x.size());
    std::vector<T> y(a.rows(), T{});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

template <class T>
std::vector<T> matvec_parallel(const Matrix<T>& a, const std::vector<T>& x) {
    assert(a.cols() == x.size());
    std::vector<T> y(a.rows(), T{});
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        T s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

template <class T>
std::vector<T> matvec(const Matrix<T>& a, const std::vector<T>& x) {
    return kernel_backend() == Backend::parallel ? matvec_parallel(a, x) : matvec_serial(a, x);
}

// ---- small helpers (serial on purpose: deterministic scalar reductions) ----

template <class T>
Matrix<T> transpose(const Matrix<T>& a) {
    Matrix<T> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline CMat adjoint(const CMat& a) {
    CMat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
    return t;
}

template <class T>
T trace(const Matrix<T>& a) {
    T s{};
    for (std::size_t i = 0; i < a.rows() && i < a.cols(); ++i) s += a(i, i);
    return s;
}

template <class T>
double fro_norm(const Matrix<T>& a) {
    double s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(cxd(a(i, j)));
    return std::sqrt(s);
}

template <class T>
double max_abs(const Matrix<T>& a) {
    double s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s = std::max(s, std::abs(a(i, j)));
    return s;
}

inline double norm2(const Vec& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}
inline double norm2(const CVec& v) {
    double s = 0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

inline cxd dot_conj(const CVec& a, const CVec& b) { // <a|b>, conjugate-linear in a
    assert(a.size() == b.size());
    cxd s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline CMat to_complex(const Mat& a) {
    CMat c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
    return c;
}

inline CVec to_complex(const Vec& v) {
    CVec c(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i];
    return c;
}

/** Outer product accumulate: m += x * y^T (no conjugation; callers conjugate). */
template <class T>
void add_outer(Matrix<T>& m, const std::vector<T>& x, const std::vector<T>& y) {
    assert(m.rows() == x.size() && m.cols() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == T{}) continue;
        for (std::size_t j = 0; j < y.size(); ++j) m(i, j) += x[i] * y[j];
    }
}

// ---- dense eigendecompositions (Eigen-backed, see linalg.cpp) --------------

/** Eigendecomposition of a real symmetric matrix: values ascending, columns of
 *  `vectors` are the matching orthonormal eigenvectors. */
struct SymEig {
    Vec values;
    Mat vectors;
};
SymEig eig_sym(const Mat& a);

/** Eigendecomposition of a general complex matrix: a = V diag(values) V^{-1}. */
struct ComplexEig {
    CVec values;
    CMat right;     // V, columns are right eigenvectors
    CMat right_inv; // V^{-1}
};
ComplexEig eig_complex(const CMat& a);

/** Solve a x = b for complex dense a. */
CVec solve(const CMat& a, const CVec& b);

/** Operator 2-norm (largest singular value). */
double op_norm(const Mat& a);
double op_norm(const CMat& a);

} // namespace qpr

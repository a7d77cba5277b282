#include <cmath>
#include <random>

#include "doctest.h"
#include "qpr/linalg.hpp"

using namespace qpr;

namespace {
Mat random_mat(std::size_t r, std::size_t c, std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Mat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}
} // namespace

TEST_CASE("parallel kernels reproduce the serial reference exactly") {
    std::mt19937 rng(11);
    const Mat a = random_mat(37, 23, rng);
    const Mat b = random_mat(23, 31, rng);
    const Mat cs = matmul_serial(a, b);
    const Mat cp = matmul_parallel(a, b);
    for (std::size_t i = 0; i < cs.rows(); ++i)
        for (std::size_t j = 0; j < cs.cols(); ++j) CHECK(cs(i, j) == cp(i, j));

    Vec x(23);
    for (auto& v : x) v = 0.37;
    const Vec ys = matvec_serial(a, x);
    const Vec yp = matvec_parallel(a, x);
    for (std::size_t i = 0; i < ys.size(); ++i) CHECK(ys[i] == yp[i]);
}

TEST_CASE("backend switch routes through the same results") {
    std::mt19937 rng(5);
    const Mat a = random_mat(16, 16, rng);
    const Mat b = random_mat(16, 16, rng);
    set_kernel_backend(Backend::serial);
    const Mat r1 = matmul(a, b);
    set_kernel_backend(Backend::parallel);
    const Mat r2 = matmul(a, b);
    set_kernel_backend(Backend::serial);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) CHECK(r1(i, j) == r2(i, j));
}

TEST_CASE("eig_sym recovers a planted symmetric spectrum") {
    // diag(3, 1, -2) conjugated by a rotation
    Mat q(3, 3);
    const double c = std::cos(0.3), s = std::sin(0.3);
    q(0, 0) = c;  q(0, 1) = -s; q(0, 2) = 0;
    q(1, 0) = s;  q(1, 1) = c;  q(1, 2) = 0;
    q(2, 0) = 0;  q(2, 1) = 0;  q(2, 2) = 1;
    Mat d(3, 3);
    d(0, 0) = 3; d(1, 1) = 1; d(2, 2) = -2;
    const Mat a = matmul(matmul(q, d), transpose(q));
    const SymEig e = eig_sym(a);
    CHECK(e.values[0] == doctest::Approx(-2).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(1).epsilon(1e-12));
    CHECK(e.values[2] == doctest::Approx(3).epsilon(1e-12));
    // residual a v = lambda v
    for (int k = 0; k < 3; ++k) {
        Vec v(3);
        for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(i)] = e.vectors(i, k);
        const Vec av = matvec(a, v);
        for (int i = 0; i < 3; ++i)
            CHECK(av[static_cast<std::size_t>(i)] ==
                  doctest::Approx(e.values[static_cast<std::size_t>(k)] *
                                  v[static_cast<std::size_t>(i)])
                      .epsilon(1e-10));
    }
}

TEST_CASE("eig_complex inverts its own factorization") {
    std::mt19937 rng(7);
    const Mat re = random_mat(6, 6, rng);
    const Mat im = random_mat(6, 6, rng);
    CMat a(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) a(i, j) = cxd(re(i, j), 0.3 * im(i, j));
    const ComplexEig e = eig_complex(a);
    // V diag(values) V^{-1} == a
    CMat vd(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) vd(i, j) = e.right(i, j) * e.values[j];
    const CMat back = matmul(vd, e.right_inv);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            CHECK(std::abs(back(i, j) - a(i, j)) < 1e-10);
}

TEST_CASE("solve returns the exact preimage") {
    CMat a(2, 2);
    a(0, 0) = cxd(2, 1); a(0, 1) = cxd(0, -1);
    a(1, 0) = cxd(1, 0); a(1, 1) = cxd(3, 2);
    CVec x{cxd(1, -2), cxd(0.5, 0.25)};
    CVec b(2);
    b[0] = a(0, 0) * x[0] + a(0, 1) * x[1];
    b[1] = a(1, 0) * x[0] + a(1, 1) * x[1];
    const CVec got = solve(a, b);
    CHECK(std::abs(got[0] - x[0]) < 1e-13);
    CHECK(std::abs(got[1] - x[1]) < 1e-13);
}

TEST_CASE("op_norm matches a hand value") {
    Mat a(2, 2);
    a(0, 0) = 3; a(0, 1) = 0;
    a(1, 0) = 0; a(1, 1) = -4;
    CHECK(op_norm(a) == doctest::Approx(4).epsilon(1e-12));
}

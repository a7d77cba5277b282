// Timing comparison of the serial reference kernels against the OpenMP
// parallel ones, on sizes matching the dense walk matrices (n^2 x n^2).

#include <chrono>
#include <cstdio>
#include <random>

#include "qpr/linalg.hpp"

namespace {

using qpr::Mat;
using qpr::Vec;

Mat random_matrix(std::size_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = dist(rng);
    return m;
}

template <class F>
double time_ms(F&& f, int reps) {
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() /
           static_cast<double>(reps);
}

} // namespace

int main() {
    std::mt19937 rng(7);
    double sink = 0.0;
    std::printf("%8s %6s %14s %14s %8s\n", "kernel", "dim", "serial(ms)", "parallel(ms)",
                "speedup");
    for (std::size_t dim : {64u, 144u, 256u, 400u}) {
        const Mat a = random_matrix(dim, rng);
        const Mat b = random_matrix(dim, rng);
        const Vec x(dim, 0.5);
        const int reps = dim <= 144 ? 20 : 5;

        const double mm_s = time_ms([&] { sink += qpr::matmul_serial(a, b)(0, 0); }, reps);
        const double mm_p = time_ms([&] { sink += qpr::matmul_parallel(a, b)(0, 0); }, reps);
        std::printf("%8s %6zu %14.3f %14.3f %8.2f\n", "matmul", dim, mm_s, mm_p, mm_s / mm_p);

        const double mv_s =
            time_ms([&] { sink += qpr::matvec_serial(a, x)[0]; }, reps * 20);
        const double mv_p =
            time_ms([&] { sink += qpr::matvec_parallel(a, x)[0]; }, reps * 20);
        std::printf("%8s %6zu %14.3f %14.3f %8.2f\n", "matvec", dim, mv_s, mv_p, mv_s / mv_p);
    }
    std::printf("# checksum %.3f\n", sink);
    return 0;
}

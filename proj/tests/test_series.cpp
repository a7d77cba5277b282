#include <cmath>

#include "doctest.h"
#include "qpr/series.hpp"

using namespace qpr;

TEST_CASE("series_mul is the Cauchy product") {
    // (1 + 2x + 3x^2)(4 + 5x) = 4 + 13x + 22x^2 + 15x^3
    SeriesScalar a(std::vector<double>{1, 2, 3});
    SeriesScalar b(std::vector<double>{4, 5});
    const SeriesScalar c = series_mul(a, b, 3);
    CHECK(c.c[0] == doctest::Approx(4));
    CHECK(c.c[1] == doctest::Approx(13));
    CHECK(c.c[2] == doctest::Approx(22));
    CHECK(c.c[3] == doctest::Approx(15));
}

TEST_CASE("series_pow against binomial coefficients") {
    SeriesScalar a(std::vector<double>{1, 1});
    const SeriesScalar p = series_pow(a, 5, 5, 1.0);
    const double want[] = {1, 5, 10, 10, 5, 1};
    for (std::size_t k = 0; k <= 5; ++k) CHECK(p.c[k] == doctest::Approx(want[k]));
}

TEST_CASE("series_eval sums a geometric tail") {
    SeriesScalar g(std::vector<double>{1, 0.5, 0.25, 0.125, 0.0625});
    const double at = series_eval(g, 0.5);
    // sum_{k<5} (0.5*0.5)^k ... actually coefficients 2^-k at chi=1/2
    double want = 0.0;
    for (int k = 0; k < 5; ++k) want += std::pow(0.5, k) * std::pow(0.5, k);
    CHECK(at == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("at() yields zeros past the stored order") {
    SeriesScalar s(std::vector<double>{2.0});
    CHECK(s.at(0) == 2.0);
    CHECK(s.at(7) == 0.0);
}

TEST_CASE("compositions enumerate the expected counts") {
    // positive compositions of 4 into 2 parts: (1,3) (2,2) (3,1)
    CHECK(compositions_positive(4, 2).size() == 3);
    // nonnegative compositions of 2 into 3 slots: C(4,2) = 6
    CHECK(compositions_nonneg(2, 3).size() == 6);
    for (const auto& c : compositions_positive(4, 2)) {
        int sum = 0;
        for (int v : c) {
            CHECK(v >= 1);
            sum += v;
        }
        CHECK(sum == 4);
    }
}

TEST_CASE("matrix series multiply respects non-commutativity") {
    Mat a0(2, 2), a1(2, 2), b0(2, 2), b1(2, 2);
    a0(0, 1) = 1;              // nilpotent upper
    a1(1, 0) = 1;              // lower
    b0(0, 0) = 1; b0(1, 1) = 1;
    b1(1, 0) = 2;
    SeriesMat a(std::vector<Mat>{a0, a1});
    SeriesMat b(std::vector<Mat>{b0, b1});
    const SeriesMat ab = series_mul(a, b, 1);
    const SeriesMat ba = series_mul(b, a, 1);
    // order-1 coefficient: a0 b1 + a1 b0 vs b0 a1 + b1 a0
    CHECK(ab.c[1](0, 0) == doctest::Approx(2));
    CHECK(ba.c[1](0, 0) == doctest::Approx(0));
}

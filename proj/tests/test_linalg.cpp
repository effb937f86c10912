#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "sdde/errors.hpp"
#include "sdde/linalg.hpp"

using sdde::lu_solve;
using sdde::Matrix;

TEST_CASE("expm of the zero matrix is the identity") {
    const Matrix z(3, 3);
    CHECK(sdde::expm(z).max_abs_diff(Matrix::identity(3)) < 1e-15);
}

TEST_CASE("expm matches the scalar exponential on diagonal matrices") {
    Matrix d(2, 2);
    d(0, 0) = -1.25;
    d(1, 1) = 0.5;
    const Matrix e = sdde::expm(d);
    CHECK(e(0, 0) == doctest::Approx(std::exp(-1.25)).epsilon(1e-14));
    CHECK(e(1, 1) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
    CHECK(std::fabs(e(0, 1)) < 1e-16);
    CHECK(std::fabs(e(1, 0)) < 1e-16);
}

TEST_CASE("expm semigroup on random matrices with large norms") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix a(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) a(i, j) = dist(rng);
        const Matrix whole = sdde::expm(a);
        const Matrix half = sdde::expm(a.scaled(0.5));
        CHECK((half * half).max_abs_diff(whole) < 1e-10 * std::max(1.0, whole.norm_inf()));
    }
}

TEST_CASE("lu_solve recovers a known solution and flags singular systems") {
    Matrix a(3, 3);
    const double vals[9] = {2, 1, -1, -3, -1, 2, -2, 1, 2};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) a(i, j) = vals[3 * i + j];
    // x = (2, 3, -1): b = A x
    std::vector<double> b = {8, -11, -3}, x;
    REQUIRE(lu_solve(a, b, x));
    CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(x[2] == doctest::Approx(-1.0).epsilon(1e-12));

    Matrix s(2, 2);
    s(0, 0) = 1.0;
    s(0, 1) = 2.0;
    s(1, 0) = 2.0;
    s(1, 1) = 4.0;
    std::vector<double> b2 = {1.0, 2.0};
    CHECK_FALSE(lu_solve(s, b2, x));
}

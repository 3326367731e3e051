#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "urnnet/linalg.hpp"
#include "urnnet/rng.hpp"

using namespace urnnet;

TEST_CASE("lu determinant matches cofactor expansion on random matrices") {
    Xoshiro256pp rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 1 + rng.next() % 6;
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m(i, j) = 2.0 * rng.uniform01() - 1.0;
        const double reference = oracle::det_cofactor(m);
        const LuFactor f = lu_factor(m);
        double det = 1.0;
        for (std::size_t i = 0; i < n; ++i) det *= f.lu(i, i);
        // Permutation parity: count transpositions by walking the cycles.
        {
            std::vector<bool> seen(n, false);
            int parity = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (seen[i]) continue;
                std::size_t len = 0, j = i;
                while (!seen[j]) {
                    seen[j] = true;
                    j = f.perm[j];
                    ++len;
                }
                parity += static_cast<int>(len) - 1;
            }
            if (parity % 2 == 1) det = -det;
        }
        CHECK(det == doctest::Approx(reference).epsilon(1e-8));
    }
}

TEST_CASE("solve_linear residual is tiny and singular systems are rejected") {
    Xoshiro256pp rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 1 + rng.next() % 6;
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform01() - 0.5;
            m(i, i) += 2.0;  // keep it comfortably nonsingular
        }
        Vec b(n);
        for (auto& v : b) v = rng.uniform01();
        Vec x;
        REQUIRE(solve_linear(m, b, x));
        const Vec back = mat_vec(m, x);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(back[i] - b[i]) < 1e-10);
    }

    Mat rank1(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) rank1(i, j) = (i + 1.0) * (j + 1.0);
    Vec x;
    CHECK_FALSE(solve_linear(rank1, Vec{1.0, 2.0, 3.0}, x));
    CHECK(lu_factor(rank1).singular());
}

TEST_CASE("matrix helpers") {
    Mat id = Mat::identity(3);
    CHECK(id(0, 0) == 1.0);
    CHECK(id(0, 1) == 0.0);

    Mat a(2, 3);
    a(0, 0) = 1.0;
    a(0, 2) = 2.0;
    a(1, 1) = -3.0;
    CHECK_FALSE(a.square());
    CHECK(max_abs(a) == 3.0);

    const Vec v{1.0, 2.0, 3.0};
    const Vec av = mat_vec(a, v);
    CHECK(av[0] == doctest::Approx(7.0));
    CHECK(av[1] == doctest::Approx(-6.0));
}

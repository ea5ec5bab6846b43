#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phbc/matnum.hpp"

using namespace phbc;

namespace {

Mat random_symmetric(Rng& rng, std::size_t n) {
    Mat S(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = rng.uniform(-2.0, 2.0);
            S(i, j) = v;
            S(j, i) = v;
        }
    return S;
}

}  // namespace

TEST_CASE("eigendecomposition of the 2x2 identity") {
    const EigResult e = sym_eig(Mat::identity(2));
    CHECK(e.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(e.eigenvectors(0, 0) == doctest::Approx(1.0));
    CHECK(e.eigenvectors(1, 1) == doctest::Approx(1.0));
    CHECK(e.eigenvectors(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("eigendecomposition of the exchange matrix") {
    const Mat S(2, 2, {0, 1, 1, 0});
    const EigResult e = sym_eig(S);
    CHECK(e.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-12));
    const double r = 1.0 / std::sqrt(2.0);
    // Eigenvectors are determined up to sign.
    CHECK(std::abs(e.eigenvectors(0, 0)) == doctest::Approx(r));
    CHECK(e.eigenvectors(0, 0) == doctest::Approx(e.eigenvectors(1, 0)));
    CHECK(e.eigenvectors(0, 1) == doctest::Approx(-e.eigenvectors(1, 1)));
}

TEST_CASE("eigendecomposition of diag(2,-3)") {
    const Mat S(2, 2, {2, 0, 0, -3});
    const EigResult e = sym_eig(S);
    CHECK(e.eigenvalues[0] == doctest::Approx(2.0));
    CHECK(e.eigenvalues[1] == doctest::Approx(-3.0));
    CHECK(std::abs(e.eigenvectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.eigenvectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig rejects asymmetric input") {
    const Mat S(2, 2, {0, 1, 0, 0});
    CHECK_THROWS_AS(sym_eig(S), NotSymmetric);
}

TEST_CASE("sym_eig reconstruction on random symmetric matrices") {
    Rng rng(1);
    for (std::size_t n : {2u, 5u, 12u, 24u}) {
        const Mat S = random_symmetric(rng, n);
        const EigResult e = sym_eig(S);
        Mat R(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    s += e.eigenvectors(i, k) * e.eigenvalues[k] * e.eigenvectors(j, k);
                R(i, j) = s;
            }
        CHECK((R - S).max_abs() <= 1e-9 * std::max(S.max_abs(), 1.0));
        const Mat VtV = e.eigenvectors.transpose() * e.eigenvectors;
        CHECK((VtV - Mat::identity(n)).max_abs() <= 1e-10);
        for (std::size_t k = 1; k < n; ++k)
            CHECK(e.eigenvalues[k - 1] >= e.eigenvalues[k]);
    }
}

TEST_CASE("spectral norm of simple matrices") {
    CHECK(spectral_norm(Mat(2, 2)) == doctest::Approx(0.0));
    CHECK(spectral_norm(Mat::identity(3)) == doctest::Approx(1.0));
    CHECK(spectral_norm(Mat(2, 2, {0, 2, 0, 0})) == doctest::Approx(2.0));
}

TEST_CASE("linear solve on fixed systems") {
    const std::vector<double> b{3.0, -1.0};
    CHECK(solve(Mat::identity(2), b) == b);

    const Mat D(2, 2, {2, 0, 0, 4});
    const auto x = solve(D, {2.0, 4.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));

    // Hilbert 3x3 with b = row sums has the all-ones solution.
    Mat H(3, 3);
    std::vector<double> rs(3, 0.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            H(i, j) = 1.0 / static_cast<double>(i + j + 1);
            rs[i] += H(i, j);
        }
    const auto ones = solve(H, rs);
    for (double v : ones) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solve flags singular systems") {
    const Mat S(2, 2, {1, 2, 2, 4});
    CHECK_THROWS_AS(solve(S, {1.0, 2.0}), Singular);
}

TEST_CASE("solve residual on random well-conditioned systems") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 6;
        Mat A(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
            A(i, i) += 4.0;  // diagonal dominance keeps the system well conditioned
        }
        const std::vector<double> b = rng.uniform_vec(n, -1.0, 1.0);
        const auto x = solve(A, b);
        std::vector<double> r = mat_vec(A, x);
        for (std::size_t i = 0; i < n; ++i) r[i] -= b[i];
        CHECK(norm2(r) <= 1e-9 * (A.max_abs() * norm2(x) + norm2(b)));
    }
}

TEST_CASE("quadrature on fixed integrands") {
    const QuadRule r1 = gauss_legendre(1, 0.0, 1.0);
    CHECK(quad_integrate([](double) { return 1.0; }, r1) == doctest::Approx(1.0));

    const QuadRule r2 = gauss_legendre(2, 0.0, 1.0);
    CHECK(quad_integrate([](double x) { return x * x; }, r2) == doctest::Approx(1.0 / 3.0));

    const QuadRule r5 = gauss_legendre(5, -1.0, 1.0);
    CHECK(quad_integrate([](double x) { return std::pow(x, 5); }, r5) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("quadrature exactness degree") {
    for (std::size_t m : {2u, 4u, 7u}) {
        const QuadRule r = gauss_legendre(m, -1.0, 2.0);
        for (std::size_t deg = 0; deg <= 2 * m - 1; ++deg) {
            std::vector<double> c(deg + 1, 0.0);
            c[deg] = 1.0;
            const Poly1 p(c);
            const double exact = integrate_poly(p, -1.0, 2.0);
            const double got = quad_integrate([&](double x) { return p.eval(x); }, r);
            CHECK(got == doctest::Approx(exact).epsilon(1e-12));
        }
    }
}

TEST_CASE("quadrature reproduces Legendre orthogonality") {
    // First five Legendre polynomials on [-1,1].
    const std::vector<Poly1> P = {
        Poly1({1}),
        Poly1({0, 1}),
        Poly1({-0.5, 0, 1.5}),
        Poly1({0, -1.5, 0, 2.5}),
        Poly1({3.0 / 8, 0, -30.0 / 8, 0, 35.0 / 8}),
    };
    const QuadRule r = gauss_legendre(6, -1.0, 1.0);
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = 0; j < P.size(); ++j) {
            const double v =
                quad_integrate([&](double x) { return P[i].eval(x) * P[j].eval(x); }, r);
            if (i != j) CHECK(std::abs(v) <= 1e-12);
            else CHECK(v == doctest::Approx(2.0 / (2.0 * i + 1.0)).epsilon(1e-12));
        }
}

TEST_CASE("polynomial arithmetic basics") {
    const Poly1 p({1, 0, -2});  // 1 - 2t^2
    CHECK(p.degree() == 2);
    CHECK(p.eval(2.0) == doctest::Approx(-7.0));
    CHECK(p.derivative().eval(3.0) == doctest::Approx(-12.0));
    CHECK(p.eval_deriv(1.0, 2) == doctest::Approx(-4.0));

    const Poly1 z({0.0, 0.0});
    CHECK(z.is_zero());
    CHECK(z.degree() == -1);

    const Poly1 q = Poly1({0, 1}) * Poly1({0, 1});  // t^2
    CHECK(q.degree() == 2);
    CHECK((p + 2.0 * q).degree() == 0);  // exact cancellation trims the quadratic term
    CHECK((p + 2.0 * q).eval(5.0) == doctest::Approx(1.0));
}

TEST_CASE("rank estimation") {
    CHECK(rank_estimate(Mat::identity(4)) == 4);
    CHECK(rank_estimate(Mat(3, 5)) == 0);
    const Mat R(2, 4, {1, 2, 3, 4, 2, 4, 6, 8});
    CHECK(rank_estimate(R) == 1);
}

TEST_CASE("seeded rng is reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform(-1.0, 3.0);
        CHECK(x == b.uniform(-1.0, 3.0));
        CHECK(x >= -1.0);
        CHECK(x < 3.0);
    }
    Rng c(43);
    CHECK(a.uniform(0.0, 1.0) != c.uniform(0.0, 1.0));
}

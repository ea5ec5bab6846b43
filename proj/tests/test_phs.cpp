#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phbc/phs.hpp"

using namespace phbc;

namespace {

PhsSystem transport(double alpha_unused = 0.0) {
    (void)alpha_unused;
    PhsSystem s;
    s.n = 1;
    s.d = 1;
    s.P = {Mat(1, 1, {0.0}), Mat(1, 1, {1.0})};
    s.a = 0.0;
    s.b = 1.0;
    s.ham = HamiltonianDensity::constant(Mat::identity(1), 1.0);
    return s;
}

PhsSystem beam() {
    PhsSystem s;
    s.n = 2;
    s.d = 2;
    s.P = {Mat(2, 2), Mat(2, 2), Mat(2, 2, {0, 1, -1, 0})};
    s.a = 0.0;
    s.b = 1.0;
    s.ham = HamiltonianDensity::constant(Mat::identity(2), 1.0);
    return s;
}

// Random valid system: P_k with the alternating symmetry pattern,
// regenerated until P_n is invertible.
PhsSystem random_system(Rng& rng, int n, int d) {
    PhsSystem s;
    s.n = n;
    s.d = d;
    s.a = 0.0;
    s.b = 1.0;
    s.ham = HamiltonianDensity::constant(Mat::identity(static_cast<std::size_t>(d)), 1.0);
    s.P.assign(static_cast<std::size_t>(n + 1), Mat(static_cast<std::size_t>(d),
                                                    static_cast<std::size_t>(d)));
    for (int k = 0; k <= n; ++k) {
        for (;;) {
            Mat R(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
            for (double& v : R.a) v = rng.uniform(-2.0, 2.0);
            // Symmetrize or skew-symmetrize to match P_k^T = (-1)^{k+1} P_k.
            Mat Pk = (k % 2 == 1) ? 0.5 * (R + R.transpose()) : 0.5 * (R - R.transpose());
            s.P[static_cast<std::size_t>(k)] = Pk;
            if (k < n) break;
            bool invertible = true;
            try {
                lu_factor(Pk);
            } catch (const Singular&) {
                invertible = false;
            }
            if (invertible) break;
        }
    }
    return s;
}

}  // namespace

TEST_CASE("transport boundary-form matrix is the scalar 1") {
    const Mat Q = build_q(transport());
    REQUIRE(Q.rows == 1);
    CHECK(Q(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("single-block boundary-form matrix equals P1") {
    PhsSystem s;
    s.n = 1;
    s.d = 2;
    s.P = {Mat(2, 2), Mat(2, 2, {0, 1, 1, 0})};
    s.a = 0.0;
    s.b = 1.0;
    s.ham = HamiltonianDensity::constant(Mat::identity(2), 1.0);
    const Mat Q = build_q(s);
    CHECK((Q - s.P[1]).max_abs() == doctest::Approx(0.0));
}

TEST_CASE("second-order boundary-form matrix from direct substitution") {
    const Mat Q = build_q(beam());
    // Blocks: (1,1)=P1=0, (1,2)=+P2, (2,1)=-P2, (2,2)=0.
    const Mat expect(4, 4,
                     {0, 0, 0, 1,
                      0, 0, -1, 0,
                      0, -1, 0, 0,
                      1, 0, 0, 0});
    CHECK((Q - expect).max_abs() == doctest::Approx(0.0));
    // Symmetry is part of the contract.
    CHECK((Q - Q.transpose()).max_abs() == doctest::Approx(0.0));
}

TEST_CASE("system validation rejects bad shapes") {
    PhsSystem s = transport();
    s.P[1] = Mat(1, 1, {0.0});  // singular leading coefficient
    CHECK_THROWS_AS(validate_system(s), InvalidSystem);

    PhsSystem t = beam();
    t.d = 1;  // n even with d odd has no invertible skew P_n
    t.P = {Mat(1, 1), Mat(1, 1), Mat(1, 1, {1.0})};
    t.ham = HamiltonianDensity::constant(Mat::identity(1), 1.0);
    CHECK_THROWS_AS(validate_system(t), InvalidSystem);

    PhsSystem u = transport();
    u.P[0] = Mat(1, 1, {0.5});  // P plain entries: P0 must be skew, scalar skew = 0
    CHECK_THROWS_AS(validate_system(u), InvalidSystem);
}

TEST_CASE("spectral split of the scalar 1") {
    const QSplit qs = split_q(Mat(1, 1, {1.0}));
    CHECK(qs.Qplus(0, 0) == doctest::Approx(1.0));
    CHECK(qs.Qminus(0, 0) == doctest::Approx(0.0));
    CHECK(qs.basis_plus.cols == 1);
    CHECK(qs.basis_minus.cols == 0);
}

TEST_CASE("spectral split of diag(2,-3)") {
    const QSplit qs = split_q(Mat(2, 2, {2, 0, 0, -3}));
    CHECK(qs.Qplus(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(qs.Qplus(1, 1) == doctest::Approx(0.0));
    CHECK(qs.Qminus(0, 0) == doctest::Approx(0.0));
    CHECK(qs.Qminus(1, 1) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("spectral split of the exchange matrix") {
    const QSplit qs = split_q(Mat(2, 2, {0, 1, 1, 0}));
    const Mat plus(2, 2, {0.5, 0.5, 0.5, 0.5});
    const Mat minus(2, 2, {0.5, -0.5, -0.5, 0.5});
    CHECK((qs.Qplus - plus).max_abs() <= 1e-12);
    CHECK((qs.Qminus - minus).max_abs() <= 1e-12);
    const Mat recon = qs.Qplus * qs.Qplus - qs.Qminus * qs.Qminus;
    CHECK((recon - qs.Q).max_abs() <= 1e-12);
}

TEST_CASE("split rejects singular input") {
    CHECK_THROWS_AS(split_q(Mat(2, 2, {1, 1, 1, 1})), SingularQ);
}

TEST_CASE("boundary block matrices for fixed cases") {
    const QSplit q1 = split_q(Mat(1, 1, {1.0}));
    const Mat B1 = boundary_block(q1);
    CHECK((B1 - Mat::identity(2)).max_abs() <= 1e-14);

    const QSplit q2 = split_q(Mat(2, 2, {2, 0, 0, -3}));
    const Mat B2 = boundary_block(q2);
    CHECK(B2(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(B2(1, 3) == doctest::Approx(std::sqrt(3.0)));
    CHECK(B2(3, 1) == doctest::Approx(std::sqrt(3.0)));
    CHECK(B2(2, 2) == doctest::Approx(std::sqrt(2.0)));

    const QSplit q3 = split_q(Mat(2, 2, {0, 1, 1, 0}));
    CHECK_NOTHROW(boundary_block(q3));
}

TEST_CASE("random valid systems satisfy the split invariants") {
    Rng rng(11);
    int built = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        int d = 1 + static_cast<int>(rng.next_u64() % 4);
        if (n % 2 == 0 && d % 2 == 1) d += 1;
        const PhsSystem s = random_system(rng, n, d);
        const Mat Q = build_q(s);
        CHECK((Q - Q.transpose()).max_abs() <= 1e-14);
        QSplit qs;
        try {
            qs = split_q(Q);
        } catch (const SingularQ&) {
            continue;  // random Q can be genuinely near-singular; skip
        }
        ++built;
        const double scale = std::max(Q.max_abs(), 1.0);
        CHECK((qs.Qplus * qs.Qplus - qs.Qminus * qs.Qminus - Q).max_abs() <=
              1e-10 * scale);
        CHECK((qs.Qplus * qs.Qminus).max_abs() <= 1e-10 * scale);
        CHECK((qs.Qplus - qs.Qplus.transpose()).max_abs() <= 1e-12 * scale);
        CHECK((qs.Qminus - qs.Qminus.transpose()).max_abs() <= 1e-12 * scale);
        const EigResult ep = sym_eig(qs.Qplus);
        CHECK(ep.eigenvalues.back() >= -1e-10 * scale);
        const EigResult em = sym_eig(qs.Qminus);
        CHECK(em.eigenvalues.back() >= -1e-10 * scale);
        CHECK(qs.basis_plus.cols + qs.basis_minus.cols == Q.rows);
        CHECK_NOTHROW(boundary_block(qs));
    }
    CHECK(built >= 40);  // the corpus must actually exercise the invariants
}

TEST_CASE("energy density evaluation and validation") {
    const HamiltonianDensity h = HamiltonianDensity::constant(Mat(2, 2, {1, 0, 0, 2}), 1.0);
    CHECK(h.is_constant());
    CHECK(h.eval(0.3, 0.0, 1.0)(1, 1) == doctest::Approx(2.0));

    // 1 + t^2 stays above c = 1 on [0,1].
    MatPoly mp(1, {Poly1({1.0, 0.0, 1.0})});
    const HamiltonianDensity hp = HamiltonianDensity::polynomial(mp, 1.0);
    CHECK(!hp.is_constant());
    CHECK(hp.eval(2.0, 0.0, 3.0)(0, 0) == doctest::Approx(5.0));

    PhsSystem s;
    s.n = 1;
    s.d = 1;
    s.P = {Mat(1, 1), Mat(1, 1, {1.0})};
    s.a = 0.0;
    s.b = 1.0;
    s.ham = HamiltonianDensity::constant(Mat(1, 1, {-1.0}), 1.0);
    CHECK_THROWS_AS(validate_system(s), InvalidSystem);
}

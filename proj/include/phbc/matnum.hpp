#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

// Dense real matrix kernel, monomial polynomial arithmetic, and
// Gauss-Legendre quadrature shared by every other module. All types are
// immutable values after construction and all operations are pure.

namespace phbc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotSymmetric : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct Singular : Error { using Error::Error; };
struct NotFinite : Error { using Error::Error; };

// Row-major dense matrix.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    Mat(std::size_t r, std::size_t c, std::vector<double> entries);

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Mat identity(std::size_t n);
    static Mat zeros(std::size_t r, std::size_t c) { return Mat(r, c); }

    Mat transpose() const;
    // Largest absolute entry; the scale used by relative tolerances.
    double max_abs() const;
    double frobenius() const;
    void check_finite() const;
};

Mat operator*(const Mat& A, const Mat& B);
Mat operator+(const Mat& A, const Mat& B);
Mat operator-(const Mat& A, const Mat& B);
Mat operator*(double s, const Mat& A);

std::vector<double> mat_vec(const Mat& A, const std::vector<double>& x);

// v^T w
double dot(const std::vector<double>& v, const std::vector<double>& w);
double norm2(const std::vector<double>& v);

// Polynomial in the monomial basis, lowest degree first. The zero
// polynomial is stored as an empty coefficient list; otherwise the leading
// coefficient is nonzero (exact zeros are trimmed).
struct Poly1 {
    std::vector<double> c;

    Poly1() = default;
    explicit Poly1(std::vector<double> coeffs);
    static Poly1 constant(double v) { return Poly1({v}); }

    bool is_zero() const { return c.empty(); }
    // Degree of the zero polynomial is -1 by convention.
    int degree() const { return static_cast<int>(c.size()) - 1; }
    double eval(double t) const;
    // k-th derivative evaluated at t.
    double eval_deriv(double t, int k) const;
    Poly1 derivative() const;
};

Poly1 operator+(const Poly1& p, const Poly1& q);
Poly1 operator-(const Poly1& p, const Poly1& q);
Poly1 operator*(const Poly1& p, const Poly1& q);
Poly1 operator*(double s, const Poly1& p);

// Gauss-Legendre rule on [a,b]; exact through degree 2*points-1.
struct QuadRule {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadRule gauss_legendre(std::size_t points, double a, double b);

double quad_integrate(const std::function<double(double)>& f, const QuadRule& rule);
double integrate_poly(const Poly1& p, double a, double b);

struct EigResult {
    std::vector<double> eigenvalues;  // descending
    Mat eigenvectors;                 // orthonormal columns, matching order
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
EigResult sym_eig(const Mat& S);

double spectral_norm(const Mat& A);

// LU factorization with partial pivoting.
struct LuFactor {
    Mat lu;
    std::vector<std::size_t> piv;
    std::vector<double> solve(const std::vector<double>& b) const;
};

LuFactor lu_factor(const Mat& A);
std::vector<double> solve(const Mat& A, const std::vector<double>& b);
Mat solve_mat(const Mat& A, const Mat& B);
Mat inverse(const Mat& A);

// Row rank by pivoted elimination with relative threshold.
std::size_t rank_estimate(const Mat& A, double rel_tol = 1e-10);

// Deterministic random numbers used by every sampling routine. Mapping from
// engine output to doubles is done by hand so results are identical across
// standard library implementations.
struct Rng {
    explicit Rng(std::uint64_t seed);
    double uniform(double lo, double hi);
    std::uint64_t next_u64();
    std::vector<double> uniform_vec(std::size_t n, double lo, double hi);

  private:
    std::mt19937_64 eng_;
};

}  // namespace phbc

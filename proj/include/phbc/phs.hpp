#pragma once

#include <vector>

#include "phbc/matnum.hpp"

// Port-Hamiltonian system definition on an interval and the boundary-form
// matrix derived from it: Au = sum_k P_k d^k(Hu) with P_k^T = (-1)^{k+1} P_k,
// P_n invertible, and H(x) symmetric with eigenvalues bounded below by c > 0.

namespace phbc {

struct InvalidSystem : Error { using Error::Error; };
struct SingularQ : Error { using Error::Error; };
struct Degenerate : Error { using Error::Error; };

// d x d matrix whose entries are polynomials in the spatial variable.
struct MatPoly {
    std::size_t dim = 0;
    std::vector<Poly1> entries;  // row-major, dim*dim

    MatPoly() = default;
    explicit MatPoly(const Mat& constant);
    MatPoly(std::size_t d, std::vector<Poly1> e);

    const Poly1& at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
    Mat eval(double t) const;
    int max_degree() const;
    bool is_constant() const;
};

// Energy density H. Pieces are polynomial on consecutive subintervals split
// at the interior breakpoints; the common case is a single constant piece.
struct HamiltonianDensity {
    std::vector<double> breakpoints;  // interior breakpoints, strictly increasing
    std::vector<MatPoly> pieces;      // breakpoints.size() + 1 entries
    double lower_bound = 0.0;         // certified c > 0

    static HamiltonianDensity constant(const Mat& H0, double c);
    static HamiltonianDensity polynomial(const MatPoly& H, double c);

    bool is_constant() const;
    bool has_interior_breakpoints() const { return !breakpoints.empty(); }
    std::size_t dim() const { return pieces.empty() ? 0 : pieces.front().dim; }
    const MatPoly& piece_at(double t, double a, double b) const;
    Mat eval(double t, double a, double b) const;
};

struct PhsSystem {
    int n = 1;            // derivative order >= 1
    int d = 1;            // state dimension >= 1
    std::vector<Mat> P;   // n+1 matrices, P[k] multiplies the k-th derivative
    double a = 0.0;
    double b = 1.0;
    HamiltonianDensity ham;

    int nd() const { return n * d; }
};

// Checks the alternating symmetry pattern of the P family, invertibility of
// P_n, the interval, and positivity of H at sampled points. Throws
// InvalidSystem with a targeted message on the first violation.
void validate_system(const PhsSystem& sys);

// Boundary-form matrix: block (i,j) = (-1)^{i+1} P_{i+j-1} for block indices
// 1..n when i+j-1 <= n, zero otherwise. Symmetric and invertible for valid
// systems.
Mat build_q(const PhsSystem& sys);

struct QSplit {
    Mat Q;
    Mat Qplus;        // square root of the positive spectral part
    Mat Qminus;       // square root of the negated negative spectral part
    Mat basis_plus;   // orthonormal columns spanning the positive eigenspace
    Mat basis_minus;  // orthonormal columns spanning the negative eigenspace

    std::size_t nd() const { return Q.rows; }
};

// Spectral split of Q. Throws SingularQ if any eigenvalue magnitude falls
// below 1e-12 * max|Q| (Q is provably invertible, so that signals a
// numerical failure upstream).
QSplit split_q(const Mat& Q);

// The 2nd x 2nd block matrix [[Q+, Q-], [Q-, Q+]]; certified invertible by a
// pivot check. Throws Degenerate if the check fails.
Mat boundary_block(const QSplit& qs);

}  // namespace phbc

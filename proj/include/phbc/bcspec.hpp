#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "phbc/funcspace.hpp"
#include "phbc/phs.hpp"

namespace phbc {

struct DimensionMismatch : Error {
    using Error::Error;
};
struct RankDeficient : Error {
    using Error::Error;
};
struct KSingular : Error {
    using Error::Error;
};

using VectorFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Boundary condition in one of three interchangeable forms: a nonlinear map
// g acting on the outgoing boundary variable, a linear matrix M with
// M*F1 = F2, or a kernel matrix W annihilating the stacked endpoint traces.
struct BoundaryCondition {
    enum class Kind { nonlinear_g, linear_m, kernel_w };
    Kind kind = Kind::linear_m;

    VectorFn g;               // nonlinear_g
    double claimed_lip = 1.0;  // nonlinear_g
    Mat M;                     // linear_m
    Mat W;                     // kernel_w

    static BoundaryCondition nonlinear(VectorFn fn, double claimed_lip);
    static BoundaryCondition linear(Mat m);
    static BoundaryCondition kernel(Mat w);
};

// Counterexample data attached to a failing check: one or more concrete
// input vectors under a short label.
struct Witness {
    std::string label;
    std::vector<std::vector<double>> inputs;
};

struct VerificationReport {
    bool pass = false;
    std::string criterion;
    std::vector<std::pair<std::string, double>> residuals;
    std::vector<Witness> witnesses;

    void add_residual(std::string name, double value);
    // Returns the named residual; throws Error when absent.
    double residual(const std::string& name) const;
    bool has_residual(const std::string& name) const;
};

struct MembershipResult {
    bool member = false;
    double residual = 0.0;
    double scale = 1.0;
};

// Symmetric test matrix whose positive semidefiniteness certifies that the
// kernel form W generates a contractive boundary condition.
Mat posdef_w_matrix(const QSplit& qs, const Mat& W);

// Decides whether the boundary condition generates an m-accretive operator:
// nonlinear form by seeded Lipschitz sampling (max ratio <= 1+1e-8 over
// `samples` pairs, half of them at small separations inside [-box, box]),
// linear form by spectral norm <= 1+1e-10, kernel form by full rank plus
// positive semidefiniteness of posdef_w_matrix.
VerificationReport classify(const QSplit& qs, const BoundaryCondition& bc, int samples,
                            unsigned long long seed, double box = 2.0);

// Recovers (M, K) from a full-rank kernel matrix W written as
// W = K*(Qminus - M*Qplus | Qplus - M*Qminus); K is the exact right block of
// W times the inverse endpoint-to-boundary block.
std::pair<Mat, Mat> w_to_m(const QSplit& qs, const Mat& W);

// Builds the kernel matrix of the linear condition M*F1 = F2, scaled by an
// optional invertible K (identity by default).
Mat m_to_w(const QSplit& qs, const Mat& M);
Mat m_to_w(const QSplit& qs, const Mat& M, const Mat& K);

// Reports whether g fixes the origin (required for the condition to extend
// the minimal operator) and whether sampled additivity/homogeneity residuals
// are consistent with a linear representation. The verdict reflects only the
// origin check; linearity results are informational.
VerificationReport structural_checks(const QSplit& qs, const BoundaryCondition& bc, int samples);

// Evaluates the boundary-condition residual of a concrete function u and
// compares it against 1e-9 times a magnitude scale.
MembershipResult domain_membership(const PhsSystem& sys, const QSplit& qs,
                                   const BoundaryCondition& bc, const PolyFunction& u);

}  // namespace phbc

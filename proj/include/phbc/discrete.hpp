#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "phbc/bcspec.hpp"
#include "phbc/funcspace.hpp"
#include "phbc/kirszbraun.hpp"
#include "phbc/matnum.hpp"
#include "phbc/phs.hpp"

namespace phbc {

struct GridTooCoarse : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct ConstructionFailed : Error {
    using Error::Error;
};

// Chebyshev-Gauss-Lobatto collocation grid on [a,b]: ascending nodes with
// exact endpoints, barycentric first-derivative matrix, and interpolatory
// quadrature weights (exact for polynomials of degree < N).
struct CollocationGrid {
    int N = 0;
    double a = 0.0, b = 1.0;
    std::vector<double> nodes;
    std::vector<double> bary;  // barycentric weights of the node set
    Mat D;                     // N x N first-derivative matrix
    std::vector<double> weights;
};

CollocationGrid make_grid(int N, double a, double b);

// Values of the N cardinal (Lagrange) basis polynomials at t.
std::vector<double> cardinal_values(const CollocationGrid& grid, double t);

// Nodal samples of u, node-major: entry j*d+i is component i at node j.
std::vector<double> sample_on_grid(const CollocationGrid& grid, const PolyFunction& u);

// Collocation realization of the operator with its boundary condition.
// Grid vectors are node-major. Tb/Ta map a grid vector to the stacked
// endpoint derivative traces of the energy-weighted state; F1m/F2m are the
// boundary maps built from them. G is the Gram matrix of the weighted inner
// product of cardinal interpolants (dense within node blocks, exact for the
// polynomial energy density).
struct DiscreteOperator {
    CollocationGrid grid;
    PhsSystem sys;
    QSplit qs;
    BoundaryCondition bc;
    Mat A_h;   // (N*d) x (N*d)
    Mat G;     // (N*d) x (N*d)
    Mat Tb, Ta;    // nd x (N*d)
    Mat F1m, F2m;  // nd x (N*d)
    Mat Cmat;      // nd x (N*d); linear constraint rows (empty for nonlinear bc)
    std::vector<std::size_t> replace_rows;  // collocation rows ceded to constraints

    std::size_t dim() const { return static_cast<std::size_t>(grid.N * sys.d); }
    std::size_t nd() const { return static_cast<std::size_t>(sys.n * sys.d); }
    bool linear_bc() const { return bc.kind != BoundaryCondition::Kind::nonlinear_g; }
    // Boundary-condition residual vector of a grid state.
    std::vector<double> constraint(const std::vector<double>& u) const;
};

DiscreteOperator discretize(const PhsSystem& sys, const QSplit& qs, const BoundaryCondition& bc,
                            int N);

double g_inner(const DiscreteOperator& op, const std::vector<double>& u,
               const std::vector<double>& v);
double g_norm(const DiscreteOperator& op, const std::vector<double>& u);

// Nodal samples of a random polynomial of the given degree per component;
// used to draw smooth test data.
std::vector<double> random_smooth(const CollocationGrid& grid, std::size_t d, Rng& rng,
                                  int degree = 8);

enum class CertifyMode { linear, nonlinear };

// Checks nonnegativity of the operator's quadratic form on the constraint
// set: linear mode restricts the symmetric part to the constraint null space
// and reports the smallest eigenvalue of the weighted pencil; nonlinear mode
// samples constraint-satisfying pairs through resolvent solves and reports
// the worst normalized increment pairing. Pass threshold is
// -10*N^{-2}*scale, absorbing discretization error.
VerificationReport certify_accretive(const DiscreteOperator& op, CertifyMode mode,
                                     int samples = 20, unsigned long long seed = 0);
VerificationReport certify_accretive(const DiscreteOperator& op);

// Solver for mu*u + B(u) = f at fixed mu with the factorization reused
// across right-hand sides. Nonlinear boundary data is updated through a
// damped fixed-point iteration (step tolerance 1e-10, cap 1e4).
class ResolventOperator {
  public:
    ResolventOperator(const DiscreteOperator& op, double mu);
    std::vector<double> apply(const std::vector<double>& f) const;
    double mu() const { return mu_; }

  private:
    double mu_ = 1.0;
    std::size_t dim_ = 0;
    BoundaryCondition::Kind kind_;
    VectorFn g_;
    Mat F1m_;
    std::vector<std::size_t> replace_rows_;
    LuFactor lu_;
};

std::vector<double> resolvent_solve(const DiscreteOperator& op, double mu,
                                    const std::vector<double>& f);

// Certifies solvability plus the 1/mu Lipschitz bound of the resolvent on
// random smooth pairs for every mu in the list.
VerificationReport certify_m_accretive(const DiscreteOperator& op,
                                       const std::vector<double>& mu_list, int pairs = 20,
                                       unsigned long long seed = 0);

// Closed-form boundary system for the scalar first-derivative operator:
// coefficients of u along e^{t} and e^{-t} in the graph inner product, and
// the endpoint values of the remainder (which vanish for any polynomial).
struct StdDecomposition {
    double pi1 = 0.0;
    double pim1 = 0.0;
    double residual_a = 0.0;
    double residual_b = 0.0;
};

// Taylor polynomial of e^{sign*t} about the interval midpoint, degree 30;
// truncation below 1e-12 for |b-a| <= 4 (longer intervals are rejected).
Poly1 exp_taylor(double sign, double a, double b);

// Graph inner product <u,v> + <u',v'> on [a,b], exact for polynomials.
double graph_inner_d1(const Poly1& u, const Poly1& v, double a, double b);

StdDecomposition std_system_oracle_d1(double a, double b, const PolyFunction& u);

using ScalarFn = std::function<double(double)>;

// Sampled boundary-transfer map induced by a scalar contraction g on the
// interval: for each probe coefficient c, functions satisfying the boundary
// condition with prescribed e^{t}-component c are constructed with varying
// interior shape; the e^{-t}-component they share is the value h(c).
struct DerivedH {
    std::vector<double> probes;
    std::vector<double> values;
    VerificationReport report;  // max_spread, max_contraction_ratio, verdict
};

DerivedH derive_h_from_g(double a, double b, const ScalarFn& g, const std::vector<double>& probes,
                         int constructions = 3);

}  // namespace phbc

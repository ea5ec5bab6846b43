#pragma once

#include <utility>
#include <vector>

#include "phbc/matnum.hpp"
#include "phbc/phs.hpp"

// Candidate domain elements represented as vector-valued polynomials:
// traces, Hermite interpolation, application of the differential operator,
// weighted inner products, and the boundary-map Green identity.

namespace phbc {

struct OutOfInterval : Error { using Error::Error; };
struct UnsupportedHamiltonian : Error { using Error::Error; };

struct PolyFunction {
    std::vector<Poly1> components;
    double a = 0.0;
    double b = 1.0;

    std::size_t dim() const { return components.size(); }
    static PolyFunction zero(std::size_t d, double a, double b);
    std::vector<double> eval(double t) const;
    int max_degree() const;
};

PolyFunction operator+(const PolyFunction& u, const PolyFunction& v);
PolyFunction operator-(const PolyFunction& u, const PolyFunction& v);
PolyFunction operator*(double s, const PolyFunction& u);

// Stacked endpoint data (u(t), u'(t), ..., u^{(n-1)}(t)): derivative-major,
// component-minor, length n*d.
struct TraceVector {
    std::vector<double> values;
};

// Exact polynomial trace at t in [a,b]. Throws OutOfInterval.
TraceVector trace(const PolyFunction& u, double t, int n);

// Unique componentwise polynomial of degree <= 2n-1 whose traces at b and a
// are tb and ta; solved per component through a confluent Vandermonde system
// in the midpoint-shifted scaled variable.
PolyFunction hermite_interpolate(const TraceVector& tb, const TraceVector& ta,
                                 int n, int d, double a, double b);

// H*u as a polynomial. Throws UnsupportedHamiltonian when H has interior
// breakpoints (the product would leave the polynomial class).
PolyFunction ham_times(const PhsSystem& sys, const PolyFunction& u);

// Au = sum_k P_k d^k(Hu), exact coefficient arithmetic.
PolyFunction apply_a(const PhsSystem& sys, const PolyFunction& u);

// Weighted inner product <u,v>_H = int <H(x)u(x), v(x)> dx by quadrature
// with two extra degrees of exactness.
double h_inner(const PhsSystem& sys, const PolyFunction& u, const PolyFunction& v);

// Unweighted L2 inner product of polynomial functions.
double l2_inner(const PolyFunction& u, const PolyFunction& v);

// Boundary maps of the function passed in, which by convention is Hu:
// F1 = Q+ tr_b + Q- tr_a, F2 = Q- tr_b + Q+ tr_a.
std::pair<std::vector<double>, std::vector<double>> boundary_map(const QSplit& qs,
                                                                 const PolyFunction& hu);

// |<Au,v>_H + <u,Av>_H - (<F1 Hu, F1 Hv> - <F2 Hu, F2 Hv>)|; rounding-level
// for valid systems.
double greens_residual(const PhsSystem& sys, const QSplit& qs, const PolyFunction& u,
                       const PolyFunction& v);

}  // namespace phbc

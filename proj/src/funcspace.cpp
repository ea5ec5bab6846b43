#include "phbc/funcspace.hpp"

#include <algorithm>
#include <cmath>

namespace phbc {

PolyFunction PolyFunction::zero(std::size_t d, double a, double b) {
    PolyFunction u;
    u.components.assign(d, Poly1());
    u.a = a;
    u.b = b;
    return u;
}

std::vector<double> PolyFunction::eval(double t) const {
    std::vector<double> v(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) v[i] = components[i].eval(t);
    return v;
}

int PolyFunction::max_degree() const {
    int deg = 0;
    for (const Poly1& p : components) deg = std::max(deg, p.degree());
    return deg;
}

PolyFunction operator+(const PolyFunction& u, const PolyFunction& v) {
    if (u.dim() != v.dim()) throw Error("PolyFunction add: dimension mismatch");
    PolyFunction w = u;
    for (std::size_t i = 0; i < w.dim(); ++i) w.components[i] = u.components[i] + v.components[i];
    return w;
}

PolyFunction operator-(const PolyFunction& u, const PolyFunction& v) {
    return u + (-1.0 * v);
}

PolyFunction operator*(double s, const PolyFunction& u) {
    PolyFunction w = u;
    for (Poly1& p : w.components) p = s * p;
    return w;
}

TraceVector trace(const PolyFunction& u, double t, int n) {
    if (t < u.a || t > u.b) throw OutOfInterval("trace: point outside the interval");
    const std::size_t d = u.dim();
    TraceVector tv;
    tv.values.resize(static_cast<std::size_t>(n) * d);
    for (int k = 0; k < n; ++k)
        for (std::size_t i = 0; i < d; ++i)
            tv.values[static_cast<std::size_t>(k) * d + i] = u.components[i].eval_deriv(t, k);
    return tv;
}

PolyFunction hermite_interpolate(const TraceVector& tb, const TraceVector& ta,
                                 int n, int d, double a, double b) {
    const std::size_t nd = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
    if (tb.values.size() != nd || ta.values.size() != nd)
        throw Error("hermite_interpolate: trace length must be n*d");
    const std::size_t m = 2 * static_cast<std::size_t>(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);

    // Rows: derivative orders 0..n-1 at s=+1 (endpoint b), then at s=-1.
    // Columns: monomials s^j. d^k/dt^k = half^{-k} d^k/ds^k.
    Mat V(m, m);
    for (int k = 0; k < n; ++k) {
        const double fk = std::pow(half, -k);
        for (std::size_t j = 0; j < m; ++j) {
            double fall = 1.0;
            for (int q = 0; q < k; ++q) fall *= static_cast<double>(j) - q;
            const int e = static_cast<int>(j) - k;
            const double sb = (e < 0) ? 0.0 : fall;
            const double sa = (e < 0) ? 0.0 : fall * ((e % 2 == 0) ? 1.0 : -1.0);
            V(static_cast<std::size_t>(k), j) = fk * sb;
            V(static_cast<std::size_t>(n + k), j) = fk * sa;
        }
    }
    LuFactor lu;
    try {
        lu = lu_factor(V);
    } catch (const Singular&) {
        throw Singular("hermite_interpolate: interpolation system degenerated");
    }

    // s = (t - mid)/half as a polynomial in t.
    const Poly1 s_of_t({-mid / half, 1.0 / half});
    std::vector<Poly1> spow(m);
    spow[0] = Poly1::constant(1.0);
    for (std::size_t j = 1; j < m; ++j) spow[j] = spow[j - 1] * s_of_t;

    PolyFunction u = PolyFunction::zero(static_cast<std::size_t>(d), a, b);
    std::vector<double> rhs(m);
    for (int comp = 0; comp < d; ++comp) {
        for (int k = 0; k < n; ++k) {
            rhs[static_cast<std::size_t>(k)] =
                tb.values[static_cast<std::size_t>(k) * d + comp];
            rhs[static_cast<std::size_t>(n + k)] =
                ta.values[static_cast<std::size_t>(k) * d + comp];
        }
        const std::vector<double> c = lu.solve(rhs);
        Poly1 p;
        for (std::size_t j = 0; j < m; ++j) p = p + c[j] * spow[j];
        u.components[static_cast<std::size_t>(comp)] = p;
    }
    return u;
}

PolyFunction ham_times(const PhsSystem& sys, const PolyFunction& u) {
    if (sys.ham.has_interior_breakpoints())
        throw UnsupportedHamiltonian(
            "ham_times: piecewise energy density with interior breakpoints is not "
            "polynomial on the whole interval");
    const MatPoly& H = sys.ham.pieces.front();
    const std::size_t d = u.dim();
    if (H.dim != d) throw Error("ham_times: dimension mismatch");
    PolyFunction w = PolyFunction::zero(d, u.a, u.b);
    for (std::size_t i = 0; i < d; ++i) {
        Poly1 acc;
        for (std::size_t j = 0; j < d; ++j) acc = acc + H.at(i, j) * u.components[j];
        w.components[i] = acc;
    }
    return w;
}

PolyFunction apply_a(const PhsSystem& sys, const PolyFunction& u) {
    const PolyFunction w = ham_times(sys, u);
    const std::size_t d = u.dim();
    PolyFunction r = PolyFunction::zero(d, u.a, u.b);
    PolyFunction wk = w;  // k-th derivative of Hu
    for (int k = 0; k <= sys.n; ++k) {
        const Mat& Pk = sys.P[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < d; ++i) {
            Poly1 acc = r.components[i];
            for (std::size_t j = 0; j < d; ++j) {
                if (Pk(i, j) == 0.0) continue;
                acc = acc + Pk(i, j) * wk.components[j];
            }
            r.components[i] = acc;
        }
        if (k < sys.n)
            for (Poly1& p : wk.components) p = p.derivative();
    }
    return r;
}

double h_inner(const PhsSystem& sys, const PolyFunction& u, const PolyFunction& v) {
    if (u.dim() != v.dim()) throw Error("h_inner: dimension mismatch");
    const PolyFunction w = ham_times(sys, u);
    // Quadrature with two extra degrees of exactness beyond the integrand.
    const int deg = w.max_degree() + v.max_degree() + 2;
    const std::size_t pts = static_cast<std::size_t>(deg / 2 + 1);
    const QuadRule rule = gauss_legendre(pts, u.a, u.b);
    double s = 0.0;
    for (std::size_t i = 0; i < w.dim(); ++i) {
        const Poly1 prod = w.components[i] * v.components[i];
        s += quad_integrate([&](double t) { return prod.eval(t); }, rule);
    }
    return s;
}

double l2_inner(const PolyFunction& u, const PolyFunction& v) {
    if (u.dim() != v.dim()) throw Error("l2_inner: dimension mismatch");
    const int deg = u.max_degree() + v.max_degree() + 2;
    const QuadRule rule = gauss_legendre(static_cast<std::size_t>(deg / 2 + 1), u.a, u.b);
    double s = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) {
        const Poly1 prod = u.components[i] * v.components[i];
        s += quad_integrate([&](double t) { return prod.eval(t); }, rule);
    }
    return s;
}

std::pair<std::vector<double>, std::vector<double>> boundary_map(const QSplit& qs,
                                                                 const PolyFunction& hu) {
    const std::size_t nd = qs.nd();
    const std::size_t d = hu.dim();
    if (nd % d != 0) throw Error("boundary_map: dimension mismatch");
    const int n = static_cast<int>(nd / d);
    const TraceVector trb = trace(hu, hu.b, n);
    const TraceVector tra = trace(hu, hu.a, n);
    std::vector<double> f1 = mat_vec(qs.Qplus, trb.values);
    const std::vector<double> f1a = mat_vec(qs.Qminus, tra.values);
    std::vector<double> f2 = mat_vec(qs.Qminus, trb.values);
    const std::vector<double> f2a = mat_vec(qs.Qplus, tra.values);
    for (std::size_t i = 0; i < nd; ++i) {
        f1[i] += f1a[i];
        f2[i] += f2a[i];
    }
    return {f1, f2};
}

double greens_residual(const PhsSystem& sys, const QSplit& qs, const PolyFunction& u,
                       const PolyFunction& v) {
    const PolyFunction Au = apply_a(sys, u);
    const PolyFunction Av = apply_a(sys, v);
    const double lhs = h_inner(sys, Au, v) + h_inner(sys, u, Av);
    const auto [f1u, f2u] = boundary_map(qs, ham_times(sys, u));
    const auto [f1v, f2v] = boundary_map(qs, ham_times(sys, v));
    const double rhs = dot(f1u, f1v) - dot(f2u, f2v);
    return std::abs(lhs - rhs);
}

}  // namespace phbc

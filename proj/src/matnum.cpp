#include "phbc/matnum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phbc {

Mat::Mat(std::size_t r, std::size_t c, std::vector<double> entries)
    : rows(r), cols(c), a(std::move(entries)) {
    if (a.size() != r * c) throw Error("Mat: entry count does not match dimensions");
}

Mat Mat::identity(std::size_t n) {
    Mat I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Mat Mat::transpose() const {
    Mat T(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) T(j, i) = (*this)(i, j);
    return T;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double Mat::frobenius() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

void Mat::check_finite() const {
    for (double v : a)
        if (!std::isfinite(v)) throw NotFinite("Mat: non-finite entry");
}

Mat operator*(const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw Error("Mat multiply: inner dimensions differ");
    Mat C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t k = 0; k < A.cols; ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

Mat operator+(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw Error("Mat add: shape mismatch");
    Mat C = A;
    for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] += B.a[i];
    return C;
}

Mat operator-(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw Error("Mat subtract: shape mismatch");
    Mat C = A;
    for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] -= B.a[i];
    return C;
}

Mat operator*(double s, const Mat& A) {
    Mat C = A;
    for (double& v : C.a) v *= s;
    return C;
}

std::vector<double> mat_vec(const Mat& A, const std::vector<double>& x) {
    if (A.cols != x.size()) throw Error("mat_vec: dimension mismatch");
    std::vector<double> y(A.rows, 0.0);
    for (std::size_t i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double dot(const std::vector<double>& v, const std::vector<double>& w) {
    if (v.size() != w.size()) throw Error("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * w[i];
    return s;
}

double norm2(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

namespace {
void trim(std::vector<double>& c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
}
}  // namespace

Poly1::Poly1(std::vector<double> coeffs) : c(std::move(coeffs)) { trim(c); }

double Poly1::eval(double t) const {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * t + c[i];
    return v;
}

double Poly1::eval_deriv(double t, int k) const {
    if (k == 0) return eval(t);
    Poly1 p = *this;
    for (int i = 0; i < k && !p.is_zero(); ++i) p = p.derivative();
    return p.eval(t);
}

Poly1 Poly1::derivative() const {
    if (c.size() <= 1) return Poly1();
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
    return Poly1(std::move(d));
}

Poly1 operator+(const Poly1& p, const Poly1& q) {
    std::vector<double> c(std::max(p.c.size(), q.c.size()), 0.0);
    for (std::size_t i = 0; i < p.c.size(); ++i) c[i] += p.c[i];
    for (std::size_t i = 0; i < q.c.size(); ++i) c[i] += q.c[i];
    return Poly1(std::move(c));
}

Poly1 operator-(const Poly1& p, const Poly1& q) { return p + (-1.0 * q); }

Poly1 operator*(const Poly1& p, const Poly1& q) {
    if (p.is_zero() || q.is_zero()) return Poly1();
    std::vector<double> c(p.c.size() + q.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.c.size(); ++i)
        for (std::size_t j = 0; j < q.c.size(); ++j) c[i + j] += p.c[i] * q.c[j];
    return Poly1(std::move(c));
}

Poly1 operator*(double s, const Poly1& p) {
    std::vector<double> c = p.c;
    for (double& v : c) v *= s;
    return Poly1(std::move(c));
}

QuadRule gauss_legendre(std::size_t points, double a, double b) {
    if (points == 0) throw Error("gauss_legendre: need at least one node");
    QuadRule r;
    r.a = a;
    r.b = b;
    r.nodes.resize(points);
    r.weights.resize(points);
    const std::size_t n = points;
    // Nodes on [-1,1] by Newton iteration on P_n with the Chebyshev guess.
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            pp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // Map symmetric pair to [a,b].
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        r.nodes[i] = mid - half * x;
        r.nodes[n - 1 - i] = mid + half * x;
        r.weights[i] = half * w;
        r.weights[n - 1 - i] = half * w;
    }
    std::sort(r.nodes.begin(), r.nodes.end());
    return r;
}

double quad_integrate(const std::function<double(double)>& f, const QuadRule& rule) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

double integrate_poly(const Poly1& p, double a, double b) {
    // Antiderivative evaluated at the endpoints; exact up to rounding.
    double sb = 0.0, sa = 0.0;
    for (std::size_t i = p.c.size(); i-- > 0;) {
        sb = sb * b;
        sa = sa * a;
        sb += p.c[i] / static_cast<double>(i + 1);
        sa += p.c[i] / static_cast<double>(i + 1);
    }
    return sb * b - sa * a;
}

EigResult sym_eig(const Mat& S) {
    S.check_finite();
    if (S.rows != S.cols) throw NotSymmetric("sym_eig: matrix not square");
    const std::size_t n = S.rows;
    const double scale = S.max_abs();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(S(i, j) - S(j, i)) > 1e-12 * std::max(scale, 1e-300))
                throw NotSymmetric("sym_eig: symmetry tolerance violated");

    Mat A = S;
    // Work on the symmetrized copy so rounding asymmetry cannot accumulate.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (A(i, j) + A(j, i));
            A(i, j) = m;
            A(j, i) = m;
        }
    Mat V = Mat::identity(n);

    const int max_sweeps = 100;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
        if (std::sqrt(off) <= 1e-15 * std::max(scale, 1e-300) * n) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
    }
    if (sweep == max_sweeps) throw NoConvergence("sym_eig: Jacobi sweep cap reached");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return A(i, i) > A(j, j); });
    EigResult res;
    res.eigenvalues.resize(n);
    res.eigenvectors = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        res.eigenvalues[j] = A(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) res.eigenvectors(i, j) = V(i, order[j]);
    }
    return res;
}

double spectral_norm(const Mat& A) {
    A.check_finite();
    const Mat AtA = A.transpose() * A;
    const EigResult e = sym_eig(AtA);
    const double lmax = e.eigenvalues.empty() ? 0.0 : std::max(e.eigenvalues.front(), 0.0);
    return std::sqrt(lmax);
}

LuFactor lu_factor(const Mat& A) {
    if (A.rows != A.cols) throw Error("lu_factor: matrix not square");
    A.check_finite();
    const std::size_t n = A.rows;
    const double scale = A.max_abs();
    LuFactor f;
    f.lu = A;
    f.piv.resize(n);
    std::iota(f.piv.begin(), f.piv.end(), 0);
    Mat& M = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(M(i, k)) > std::abs(M(p, k))) p = i;
        if (std::abs(M(p, k)) < 1e-13 * std::max(scale, 1e-300))
            throw Singular("lu_factor: pivot below tolerance");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(M(k, j), M(p, j));
            std::swap(f.piv[k], f.piv[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            M(i, k) /= M(k, k);
            const double lik = M(i, k);
            if (lik == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) M(i, j) -= lik * M(k, j);
        }
    }
    return f;
}

std::vector<double> LuFactor::solve(const std::vector<double>& b) const {
    const std::size_t n = lu.rows;
    if (b.size() != n) throw Error("LuFactor::solve: dimension mismatch");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (std::size_t i = 1; i < n; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
        x[i] = s / lu(i, i);
    }
    return x;
}

std::vector<double> solve(const Mat& A, const std::vector<double>& b) {
    return lu_factor(A).solve(b);
}

Mat solve_mat(const Mat& A, const Mat& B) {
    if (A.rows != B.rows) throw Error("solve_mat: dimension mismatch");
    const LuFactor f = lu_factor(A);
    Mat X(A.cols, B.cols);
    std::vector<double> col(B.rows);
    for (std::size_t j = 0; j < B.cols; ++j) {
        for (std::size_t i = 0; i < B.rows; ++i) col[i] = B(i, j);
        const std::vector<double> x = f.solve(col);
        for (std::size_t i = 0; i < x.size(); ++i) X(i, j) = x[i];
    }
    return X;
}

Mat inverse(const Mat& A) { return solve_mat(A, Mat::identity(A.rows)); }

std::size_t rank_estimate(const Mat& A, double rel_tol) {
    Mat M = A;
    const double scale = std::max(M.max_abs(), 1e-300);
    const std::size_t r = M.rows, c = M.cols;
    std::size_t rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < c && row < r; ++col) {
        std::size_t p = row;
        for (std::size_t i = row + 1; i < r; ++i)
            if (std::abs(M(i, col)) > std::abs(M(p, col))) p = i;
        if (std::abs(M(p, col)) <= rel_tol * scale) continue;
        if (p != row)
            for (std::size_t j = 0; j < c; ++j) std::swap(M(row, j), M(p, j));
        for (std::size_t i = row + 1; i < r; ++i) {
            const double f = M(i, col) / M(row, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < c; ++j) M(i, j) -= f * M(row, j);
        }
        ++rank;
        ++row;
    }
    return rank;
}

Rng::Rng(std::uint64_t seed) : eng_(seed) {}

std::uint64_t Rng::next_u64() { return eng_(); }

double Rng::uniform(double lo, double hi) {
    // 53 random bits -> [0,1); affine map keeps results platform-identical.
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::vector<double> Rng::uniform_vec(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
}

}  // namespace phbc

#include "phbc/phs.hpp"

#include <cmath>
#include <string>

namespace phbc {

MatPoly::MatPoly(const Mat& constant) : dim(constant.rows) {
    if (constant.rows != constant.cols) throw Error("MatPoly: constant block not square");
    entries.reserve(dim * dim);
    for (double v : constant.a) entries.push_back(Poly1::constant(v));
}

MatPoly::MatPoly(std::size_t d, std::vector<Poly1> e) : dim(d), entries(std::move(e)) {
    if (entries.size() != dim * dim) throw Error("MatPoly: entry count mismatch");
}

Mat MatPoly::eval(double t) const {
    Mat M(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) M(i, j) = at(i, j).eval(t);
    return M;
}

int MatPoly::max_degree() const {
    int deg = 0;
    for (const Poly1& p : entries) deg = std::max(deg, p.degree());
    return deg;
}

bool MatPoly::is_constant() const { return max_degree() <= 0; }

HamiltonianDensity HamiltonianDensity::constant(const Mat& H0, double c) {
    HamiltonianDensity h;
    h.pieces.push_back(MatPoly(H0));
    h.lower_bound = c;
    return h;
}

HamiltonianDensity HamiltonianDensity::polynomial(const MatPoly& H, double c) {
    HamiltonianDensity h;
    h.pieces.push_back(H);
    h.lower_bound = c;
    return h;
}

bool HamiltonianDensity::is_constant() const {
    return breakpoints.empty() && pieces.size() == 1 && pieces.front().is_constant();
}

const MatPoly& HamiltonianDensity::piece_at(double t, double a, double b) const {
    (void)a;
    (void)b;
    std::size_t k = 0;
    while (k < breakpoints.size() && t >= breakpoints[k]) ++k;
    return pieces[k];
}

Mat HamiltonianDensity::eval(double t, double a, double b) const {
    return piece_at(t, a, b).eval(t);
}

void validate_system(const PhsSystem& sys) {
    if (sys.n < 1) throw InvalidSystem("system: derivative order n must be >= 1");
    if (sys.d < 1) throw InvalidSystem("system: state dimension d must be >= 1");
    if (!(sys.a < sys.b)) throw InvalidSystem("system: interval requires a < b");
    if (sys.P.size() != static_cast<std::size_t>(sys.n + 1))
        throw InvalidSystem("system: expected n+1 coefficient matrices");
    if (sys.n % 2 == 0 && sys.d % 2 == 1)
        throw InvalidSystem(
            "system: n even with d odd is impossible (P_n would be a skew "
            "invertible matrix of odd dimension)");

    const std::size_t d = static_cast<std::size_t>(sys.d);
    for (int k = 0; k <= sys.n; ++k) {
        const Mat& Pk = sys.P[static_cast<std::size_t>(k)];
        Pk.check_finite();
        if (Pk.rows != d || Pk.cols != d)
            throw InvalidSystem("system: P matrix has wrong dimensions");
        // P_k^T = (-1)^{k+1} P_k entrywise.
        const double sign = (k % 2 == 0) ? -1.0 : 1.0;
        const double scale = std::max(Pk.max_abs(), 1.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (std::abs(Pk(j, i) - sign * Pk(i, j)) > 1e-12 * scale)
                    throw InvalidSystem("system: symmetry pattern of P violated at k=" +
                                        std::to_string(k));
    }
    try {
        lu_factor(sys.P[static_cast<std::size_t>(sys.n)]);
    } catch (const Singular&) {
        throw InvalidSystem("system: leading coefficient P_n is singular");
    }

    if (sys.ham.pieces.empty()) throw InvalidSystem("system: missing energy density");
    if (sys.ham.dim() != d) throw InvalidSystem("system: energy density dimension mismatch");
    if (!(sys.ham.lower_bound > 0.0))
        throw InvalidSystem("system: energy density lower bound must be positive");
    for (const double t : {sys.a, 0.5 * (sys.a + sys.b), sys.b}) {
        const Mat H = sys.ham.eval(t, sys.a, sys.b);
        const double scale = std::max(H.max_abs(), 1.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                if (std::abs(H(i, j) - H(j, i)) > 1e-12 * scale)
                    throw InvalidSystem("system: energy density not symmetric");
        const EigResult e = sym_eig(H);
        if (e.eigenvalues.back() < sys.ham.lower_bound - 1e-12 * scale)
            throw InvalidSystem("system: energy density violates its lower bound");
    }
}

Mat build_q(const PhsSystem& sys) {
    validate_system(sys);
    const std::size_t n = static_cast<std::size_t>(sys.n);
    const std::size_t d = static_cast<std::size_t>(sys.d);
    Mat Q(n * d, n * d);
    for (std::size_t bi = 1; bi <= n; ++bi)
        for (std::size_t bj = 1; bj <= n; ++bj) {
            const std::size_t k = bi + bj - 1;
            if (k > n) continue;
            const double sign = (bi % 2 == 1) ? 1.0 : -1.0;
            const Mat& Pk = sys.P[k];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    Q((bi - 1) * d + i, (bj - 1) * d + j) = sign * Pk(i, j);
        }
    return Q;
}

QSplit split_q(const Mat& Q) {
    Q.check_finite();
    if (Q.rows != Q.cols) throw Error("split_q: Q not square");
    const std::size_t m = Q.rows;
    const double scale = std::max(Q.max_abs(), 1e-300);
    const EigResult e = sym_eig(Q);

    std::size_t npos = 0;
    for (double l : e.eigenvalues) {
        if (std::abs(l) < 1e-12 * scale)
            throw SingularQ("split_q: eigenvalue below invertibility cutoff");
        if (l > 0.0) ++npos;
    }
    const std::size_t nneg = m - npos;

    QSplit qs;
    qs.Q = Q;
    qs.Qplus = Mat(m, m);
    qs.Qminus = Mat(m, m);
    qs.basis_plus = Mat(m, npos);
    qs.basis_minus = Mat(m, nneg);
    // Eigenvalues come sorted descending: positive block first.
    for (std::size_t k = 0; k < npos; ++k)
        for (std::size_t i = 0; i < m; ++i) qs.basis_plus(i, k) = e.eigenvectors(i, k);
    for (std::size_t k = 0; k < nneg; ++k)
        for (std::size_t i = 0; i < m; ++i)
            qs.basis_minus(i, k) = e.eigenvectors(i, npos + k);

    for (std::size_t k = 0; k < m; ++k) {
        const double l = e.eigenvalues[k];
        const double r = std::sqrt(std::abs(l));
        Mat& target = (l > 0.0) ? qs.Qplus : qs.Qminus;
        for (std::size_t i = 0; i < m; ++i) {
            const double vik = e.eigenvectors(i, k);
            if (vik == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j)
                target(i, j) += r * vik * e.eigenvectors(j, k);
        }
    }
    return qs;
}

Mat boundary_block(const QSplit& qs) {
    const std::size_t m = qs.nd();
    Mat B(2 * m, 2 * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            B(i, j) = qs.Qplus(i, j);
            B(i, m + j) = qs.Qminus(i, j);
            B(m + i, j) = qs.Qminus(i, j);
            B(m + i, m + j) = qs.Qplus(i, j);
        }
    try {
        lu_factor(B);
    } catch (const Singular&) {
        throw Degenerate("boundary_block: pivot check failed");
    }
    return B;
}

}  // namespace phbc

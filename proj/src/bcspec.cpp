#include "phbc/bcspec.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace phbc {

namespace {

std::vector<double> vec_sub(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}

// Applies the condition's map to a boundary vector; only meaningful for the
// nonlinear and linear forms.
std::vector<double> eval_map(const BoundaryCondition& bc, const std::vector<double>& x) {
    if (bc.kind == BoundaryCondition::Kind::linear_m) return mat_vec(bc.M, x);
    std::vector<double> y = bc.g(x);
    if (y.size() != x.size())
        throw DimensionMismatch("boundary map returned a vector of wrong length");
    return y;
}

void check_dims(const QSplit& qs, const BoundaryCondition& bc) {
    const std::size_t nd = qs.nd();
    switch (bc.kind) {
        case BoundaryCondition::Kind::linear_m:
            if (bc.M.rows != nd || bc.M.cols != nd)
                throw DimensionMismatch("linear boundary matrix must be nd x nd");
            break;
        case BoundaryCondition::Kind::kernel_w:
            if (bc.W.rows != nd || bc.W.cols != 2 * nd)
                throw DimensionMismatch("kernel matrix must be nd x 2nd");
            break;
        case BoundaryCondition::Kind::nonlinear_g: {
            if (!bc.g) throw DimensionMismatch("nonlinear boundary map is empty");
            const std::vector<double> probe(nd, 0.0);
            if (bc.g(probe).size() != nd)
                throw DimensionMismatch("nonlinear boundary map must preserve length nd");
            break;
        }
    }
}

Mat exchange_blocks(std::size_t nd) {
    Mat J = Mat(2 * nd, 2 * nd);
    for (std::size_t i = 0; i < nd; ++i) {
        J(i, nd + i) = 1.0;
        J(nd + i, i) = 1.0;
    }
    return J;
}

VerificationReport classify_nonlinear(const QSplit& qs, const BoundaryCondition& bc, int samples,
                                      unsigned long long seed, double box) {
    VerificationReport rep;
    rep.criterion = "sampled_lipschitz_bound";
    const std::size_t nd = qs.nd();
    Rng rng(seed);
    double max_ratio = 0.0;
    std::vector<double> wx, wy;
    for (int i = 0; i < samples; ++i) {
        std::vector<double> x = rng.uniform_vec(nd, -box, box);
        std::vector<double> y;
        if (i % 2 == 1) {
            // Small-separation pairs probe the local Lipschitz constant.
            const double eps = std::pow(10.0, -1.0 - 3.0 * rng.uniform(0.0, 1.0));
            std::vector<double> dir = rng.uniform_vec(nd, -1.0, 1.0);
            const double dn = std::max(norm2(dir), 1e-300);
            y = x;
            for (std::size_t j = 0; j < nd; ++j) y[j] += eps * dir[j] / dn;
        } else {
            y = rng.uniform_vec(nd, -box, box);
        }
        const double sep = norm2(vec_sub(x, y));
        if (sep < 1e-14) continue;
        const double ratio = norm2(vec_sub(eval_map(bc, x), eval_map(bc, y))) / sep;
        if (ratio > max_ratio) {
            max_ratio = ratio;
            wx = x;
            wy = y;
        }
    }
    rep.add_residual("max_ratio", max_ratio);
    rep.add_residual("claimed_lip", bc.claimed_lip);
    rep.add_residual("samples", static_cast<double>(samples));
    if (!wx.empty()) rep.witnesses.push_back({"max_ratio_pair", {wx, wy}});
    rep.pass = bc.claimed_lip <= 1.0 && max_ratio <= 1.0 + 1e-8;
    return rep;
}

VerificationReport classify_linear(const BoundaryCondition& bc) {
    VerificationReport rep;
    rep.criterion = "spectral_norm_bound";
    const double s = spectral_norm(bc.M);
    rep.add_residual("spectral_norm", s);
    rep.pass = s <= 1.0 + 1e-10;
    return rep;
}

VerificationReport classify_kernel(const QSplit& qs, const BoundaryCondition& bc) {
    VerificationReport rep;
    rep.criterion = "kernel_rank_and_posdef";
    const std::size_t nd = qs.nd();
    const std::size_t rank = rank_estimate(bc.W, 1e-10);
    rep.add_residual("rank", static_cast<double>(rank));
    Mat T = posdef_w_matrix(qs, bc.W);
    const EigResult eig = sym_eig(T);
    const double min_eig = eig.eigenvalues.back();
    const double scale =
        std::max({1.0, std::abs(eig.eigenvalues.front()), std::abs(min_eig)});
    rep.add_residual("min_eigenvalue", min_eig);
    rep.add_residual("eig_scale", scale);
    rep.pass = rank == nd && min_eig >= -1e-10 * scale;
    if (min_eig < -1e-10 * scale) {
        std::vector<double> v(T.rows);
        for (std::size_t i = 0; i < T.rows; ++i) v[i] = eig.eigenvectors(i, T.rows - 1);
        rep.witnesses.push_back({"negative_direction", {v}});
    }
    return rep;
}

}  // namespace

BoundaryCondition BoundaryCondition::nonlinear(VectorFn fn, double claimed_lip) {
    BoundaryCondition bc;
    bc.kind = Kind::nonlinear_g;
    bc.g = std::move(fn);
    bc.claimed_lip = claimed_lip;
    return bc;
}

BoundaryCondition BoundaryCondition::linear(Mat m) {
    BoundaryCondition bc;
    bc.kind = Kind::linear_m;
    bc.M = std::move(m);
    return bc;
}

BoundaryCondition BoundaryCondition::kernel(Mat w) {
    BoundaryCondition bc;
    bc.kind = Kind::kernel_w;
    bc.W = std::move(w);
    return bc;
}

void VerificationReport::add_residual(std::string name, double value) {
    residuals.emplace_back(std::move(name), value);
}

double VerificationReport::residual(const std::string& name) const {
    for (const auto& [k, v] : residuals)
        if (k == name) return v;
    throw Error("no residual named " + name);
}

bool VerificationReport::has_residual(const std::string& name) const {
    for (const auto& [k, v] : residuals)
        if (k == name) return true;
    return false;
}

Mat posdef_w_matrix(const QSplit& qs, const Mat& W) {
    const std::size_t nd = qs.nd();
    if (W.rows != nd || W.cols != 2 * nd)
        throw DimensionMismatch("kernel matrix must be nd x 2nd");
    Mat X(2 * nd, 2 * nd);
    for (std::size_t i = 0; i < nd; ++i) {
        for (std::size_t j = 0; j < nd; ++j) {
            X(i, j) = -qs.Q(i, j);
            X(i, nd + j) = qs.Q(i, j);
        }
        X(nd + i, i) = 1.0;
        X(nd + i, nd + i) = 1.0;
    }
    const Mat WX = W * inverse(X);
    Mat T = WX * exchange_blocks(nd) * WX.transpose();
    // The product is symmetric up to roundoff; symmetrize before eigensolve.
    for (std::size_t i = 0; i < T.rows; ++i)
        for (std::size_t j = i + 1; j < T.cols; ++j) {
            const double m = 0.5 * (T(i, j) + T(j, i));
            T(i, j) = m;
            T(j, i) = m;
        }
    return T;
}

VerificationReport classify(const QSplit& qs, const BoundaryCondition& bc, int samples,
                            unsigned long long seed, double box) {
    check_dims(qs, bc);
    switch (bc.kind) {
        case BoundaryCondition::Kind::nonlinear_g:
            return classify_nonlinear(qs, bc, samples, seed, box);
        case BoundaryCondition::Kind::linear_m:
            return classify_linear(bc);
        case BoundaryCondition::Kind::kernel_w:
        default:
            return classify_kernel(qs, bc);
    }
}

std::pair<Mat, Mat> w_to_m(const QSplit& qs, const Mat& W) {
    const std::size_t nd = qs.nd();
    if (W.rows != nd || W.cols != 2 * nd)
        throw DimensionMismatch("kernel matrix must be nd x 2nd");
    if (rank_estimate(W, 1e-10) < nd) throw RankDeficient("kernel matrix must have rank nd");
    const Mat Wp = W * inverse(boundary_block(qs));
    Mat left(nd, nd), right(nd, nd);
    for (std::size_t i = 0; i < nd; ++i)
        for (std::size_t j = 0; j < nd; ++j) {
            left(i, j) = Wp(i, j);
            right(i, j) = Wp(i, nd + j);
        }
    Mat M;
    try {
        M = -1.0 * solve_mat(right, left);
    } catch (const Singular&) {
        throw KSingular("recovered scaling block is singular");
    }
    return {M, right};
}

Mat m_to_w(const QSplit& qs, const Mat& M) {
    return m_to_w(qs, M, Mat::identity(qs.nd()));
}

Mat m_to_w(const QSplit& qs, const Mat& M, const Mat& K) {
    const std::size_t nd = qs.nd();
    if (M.rows != nd || M.cols != nd)
        throw DimensionMismatch("linear boundary matrix must be nd x nd");
    if (K.rows != nd || K.cols != nd) throw DimensionMismatch("scaling block must be nd x nd");
    try {
        lu_factor(K);
    } catch (const Singular&) {
        throw KSingular("scaling block must be invertible");
    }
    const Mat left = K * (qs.Qminus - M * qs.Qplus);
    const Mat right = K * (qs.Qplus - M * qs.Qminus);
    Mat W(nd, 2 * nd);
    for (std::size_t i = 0; i < nd; ++i)
        for (std::size_t j = 0; j < nd; ++j) {
            W(i, j) = left(i, j);
            W(i, nd + j) = right(i, j);
        }
    return W;
}

VerificationReport structural_checks(const QSplit& qs, const BoundaryCondition& bc, int samples) {
    check_dims(qs, bc);
    VerificationReport rep;
    rep.criterion = "structural_origin_and_linearity";
    const std::size_t nd = qs.nd();

    if (bc.kind == BoundaryCondition::Kind::kernel_w) {
        // A kernel condition always contains the zero trace and is linear.
        rep.add_residual("map_at_origin", 0.0);
        rep.add_residual("additivity_max", 0.0);
        rep.add_residual("homogeneity_max", 0.0);
        rep.add_residual("linear", 1.0);
        rep.pass = true;
        return rep;
    }

    const double g0 = norm2(eval_map(bc, std::vector<double>(nd, 0.0)));
    rep.add_residual("map_at_origin", g0);

    double add_max = 0.0, hom_max = 0.0;
    Rng rng(0);
    for (int i = 0; i < samples; ++i) {
        const std::vector<double> x = rng.uniform_vec(nd, -2.0, 2.0);
        const std::vector<double> y = rng.uniform_vec(nd, -2.0, 2.0);
        std::vector<double> xy(nd);
        for (std::size_t j = 0; j < nd; ++j) xy[j] = x[j] + y[j];
        const std::vector<double> gxy = eval_map(bc, xy);
        const std::vector<double> gx = eval_map(bc, x);
        const std::vector<double> gy = eval_map(bc, y);
        std::vector<double> sum(nd);
        for (std::size_t j = 0; j < nd; ++j) sum[j] = gx[j] + gy[j];
        const double r_add = norm2(vec_sub(gxy, sum)) / (1.0 + norm2(gxy));
        if (r_add > add_max) {
            add_max = r_add;
            if (r_add > 1e-9 && rep.witnesses.empty())
                rep.witnesses.push_back({"additivity_pair", {x, y}});
        }

        const double lam = rng.uniform(-2.0, 2.0);
        std::vector<double> lx(nd);
        for (std::size_t j = 0; j < nd; ++j) lx[j] = lam * x[j];
        const std::vector<double> glx = eval_map(bc, lx);
        std::vector<double> lgx(nd);
        for (std::size_t j = 0; j < nd; ++j) lgx[j] = lam * gx[j];
        const double r_hom = norm2(vec_sub(glx, lgx)) / (1.0 + norm2(glx));
        hom_max = std::max(hom_max, r_hom);
    }
    rep.add_residual("additivity_max", add_max);
    rep.add_residual("homogeneity_max", hom_max);
    rep.add_residual("linear", (add_max <= 1e-9 && hom_max <= 1e-9) ? 1.0 : 0.0);
    rep.pass = g0 <= 1e-9;
    return rep;
}

MembershipResult domain_membership(const PhsSystem& sys, const QSplit& qs,
                                   const BoundaryCondition& bc, const PolyFunction& u) {
    check_dims(qs, bc);
    MembershipResult res;
    const PolyFunction hu = ham_times(sys, u);
    if (bc.kind == BoundaryCondition::Kind::kernel_w) {
        const TraceVector tb = trace(hu, sys.b, sys.n);
        const TraceVector ta = trace(hu, sys.a, sys.n);
        std::vector<double> v = tb.values;
        v.insert(v.end(), ta.values.begin(), ta.values.end());
        res.residual = norm2(mat_vec(bc.W, v));
        res.scale = 1.0 + bc.W.frobenius() * norm2(v);
    } else {
        const auto [f1, f2] = boundary_map(qs, hu);
        res.residual = norm2(vec_sub(eval_map(bc, f1), f2));
        res.scale = 1.0 + norm2(f1) + norm2(f2);
    }
    res.member = res.residual <= 1e-9 * res.scale;
    return res;
}

}  // namespace phbc

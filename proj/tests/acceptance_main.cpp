// Acceptance gate: one check per shipped guarantee, one verdict line each.
// Exits nonzero when any check fails or overruns its time budget.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "phbc/jsonio.hpp"
#include "phbc/kirszbraun.hpp"
#include "phbc/semigroup.hpp"
#include "test_helpers.hpp"

using namespace phbc;
using namespace phbc::testing;

namespace {

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double maxabs(const Mat& A) { return A.max_abs(); }

struct CorpusItem {
    PhsSystem sys;
    QSplit qs;
};

// 200 random valid systems, fixed seed, shared by the structure criteria.
const std::vector<CorpusItem>& corpus() {
    static const std::vector<CorpusItem> items = [] {
        Rng rng(2026);
        std::vector<CorpusItem> v;
        for (int i = 0; i < 200; ++i) {
            const auto [n, d] = random_dims(rng);
            PhsSystem sys = random_system(rng, n, d);
            v.push_back({sys, split_q(build_q(sys))});
        }
        return v;
    }();
    return items;
}

PolyFunction random_poly_fn(Rng& rng, int d, int deg, double a, double b) {
    PolyFunction u;
    u.a = a;
    u.b = b;
    for (int i = 0; i < d; ++i)
        u.components.push_back(Poly1(rng.uniform_vec(static_cast<std::size_t>(deg + 1), -1.0, 1.0)));
    return u;
}

double graph_norm(const PhsSystem& sys, const PolyFunction& u) {
    const PolyFunction au = apply_a(sys, u);
    return std::sqrt(h_inner(sys, u, u) + h_inner(sys, au, au));
}

// 1. Symmetry defect of the boundary pairing on random systems.
CriterionResult c_green_identity() {
    Rng rng(101);
    double worst = 0.0;
    for (const CorpusItem& it : corpus()) {
        const int deg = it.sys.n + 3;
        const PolyFunction u = random_poly_fn(rng, it.sys.d, deg, it.sys.a, it.sys.b);
        const PolyFunction v = random_poly_fn(rng, it.sys.d, deg, it.sys.a, it.sys.b);
        const double bound = 1e-9 * (1.0 + graph_norm(it.sys, u) * graph_norm(it.sys, v));
        worst = std::max(worst, greens_residual(it.sys, it.qs, u, v) / bound);
    }
    return {worst <= 1.0, "max_residual_over_bound=" + fmt("%.2e", worst)};
}

// 2. Spectral square-root split reconstructs Q; boundary block invertible.
CriterionResult c_spectral_split() {
    double worst = 0.0;
    int singular = 0;
    for (const CorpusItem& it : corpus()) {
        const Mat recon = it.qs.Qplus * it.qs.Qplus - it.qs.Qminus * it.qs.Qminus;
        worst = std::max(worst, maxabs(it.qs.Q - recon));
        worst = std::max(worst, maxabs(it.qs.Qplus * it.qs.Qminus));
        worst = std::max(worst, maxabs(it.qs.Qminus * it.qs.Qplus));
        worst = std::max(worst, -sym_eig(it.qs.Qplus).eigenvalues.back());
        worst = std::max(worst, -sym_eig(it.qs.Qminus).eigenvalues.back());
        try {
            lu_factor(boundary_block(it.qs));
        } catch (const Singular&) {
            ++singular;
        }
    }
    return {worst <= 1e-10 && singular == 0,
            "max_defect=" + fmt("%.2e", worst) + " singular_blocks=" + std::to_string(singular)};
}

// 3. Any prescribed endpoint trace pair is hit by Hermite construction.
CriterionResult c_trace_surjectivity() {
    Rng rng(303);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto [n, d] = random_dims(rng);
        const double a = rng.uniform(-1.0, 0.0);
        const double b = a + rng.uniform(0.5, 2.0);
        const std::size_t nd = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
        const TraceVector tb{rng.uniform_vec(nd, -2.0, 2.0)};
        const TraceVector ta{rng.uniform_vec(nd, -2.0, 2.0)};
        const PolyFunction u = hermite_interpolate(tb, ta, n, d, a, b);
        const TraceVector rb = trace(u, b, n);
        const TraceVector ra = trace(u, a, n);
        for (std::size_t i = 0; i < nd; ++i) {
            worst = std::max(worst, std::abs(rb.values[i] - tb.values[i]));
            worst = std::max(worst, std::abs(ra.values[i] - ta.values[i]));
        }
    }
    return {worst <= 1e-8, "max_trace_error=" + fmt("%.2e", worst)};
}

// 4. Matrix-form and kernel-form classification agree; conversion round-trips.
CriterionResult c_kernel_linear_equivalence() {
    Rng rng(404);
    int agreements = 0, expected_ok = 0;
    double worst_rt = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const CorpusItem& it = corpus()[static_cast<std::size_t>(trial) % corpus().size()];
        const std::size_t nd = it.qs.nd();
        Mat R(nd, nd, rng.uniform_vec(nd * nd, -1.0, 1.0));
        double s = spectral_norm(R);
        while (s < 1e-6) {
            R = Mat(nd, nd, rng.uniform_vec(nd * nd, -1.0, 1.0));
            s = spectral_norm(R);
        }
        const bool contractive = trial < 100;
        const double tau = contractive ? rng.uniform(0.0, 0.95) : rng.uniform(1.05, 3.0);
        const Mat M = (tau / s) * R;
        const bool pm = classify(it.qs, BoundaryCondition::linear(M), 50, 1).pass;
        const bool pw = classify(it.qs, BoundaryCondition::kernel(m_to_w(it.qs, M)), 50, 1).pass;
        if (pm == pw) ++agreements;
        if (pm == contractive) ++expected_ok;
        const auto [M2, K2] = w_to_m(it.qs, m_to_w(it.qs, M));
        (void)K2;
        worst_rt = std::max(worst_rt, maxabs(M2 - M));
    }
    return {agreements == 200 && expected_ok == 200 && worst_rt <= 1e-10,
            "agreements=" + std::to_string(agreements) + "/200 roundtrip=" + fmt("%.2e", worst_rt)};
}

// 5. Hand-computed contraction scalar for the transport family.
CriterionResult c_transport_posdef_scalar() {
    const QSplit qs = split_q(build_q(transport_system()));
    double worst = 0.0;
    for (const double alpha : {0.0, 0.5, 1.0, 2.0}) {
        const Mat W(1, 2, {-alpha, 1.0});
        const Mat S = posdef_w_matrix(qs, W);
        worst = std::max(worst, std::abs(S(0, 0) - 0.5 * (1.0 - alpha * alpha)));
    }
    return {worst <= 1e-12, "max_error=" + fmt("%.2e", worst)};
}

// 6. Resolvent solvability and 1/mu Lipschitz bound, plus the analytic solve.
CriterionResult c_resolvent_lipschitz() {
    const PhsSystem sys = transport_system();
    const QSplit qs = split_q(build_q(sys));
    double worst_ratio = 0.0;
    bool all_pass = true;
    for (const double alpha : {0.0, 0.5, 1.0}) {
        const DiscreteOperator op =
            discretize(sys, qs, BoundaryCondition::linear(Mat(1, 1, {alpha})), 32);
        const VerificationReport rep = certify_m_accretive(op, {0.1, 1.0, 10.0}, 20, 99);
        all_pass = all_pass && rep.pass;
        worst_ratio = std::max(worst_ratio, rep.residual("max_ratio"));
    }
    const DiscreteOperator op0 =
        discretize(sys, qs, BoundaryCondition::linear(Mat(1, 1, {0.0})), 32);
    const ResolventOperator res(op0, 1.0);
    const std::vector<double> u = res.apply(std::vector<double>(op0.dim(), 1.0));
    double ode_err = 0.0;
    for (std::size_t j = 0; j < op0.grid.nodes.size(); ++j)
        ode_err = std::max(ode_err, std::abs(u[j] - (1.0 - std::exp(-op0.grid.nodes[j]))));
    return {all_pass && worst_ratio <= 1.0 + 1e-6 && ode_err <= 1e-5,
            "max_ratio=" + fmt("%.8f", worst_ratio) + " ode_err=" + fmt("%.2e", ode_err)};
}

// 7. The expansive transport condition is flagged by both certifiers.
CriterionResult c_accretivity_detection() {
    const PhsSystem sys = transport_system();
    const QSplit qs = split_q(build_q(sys));
    const bool cls_bad = classify(qs, BoundaryCondition::linear(Mat(1, 1, {2.0})), 200, 1).pass;
    const bool cls_good = classify(qs, BoundaryCondition::linear(Mat(1, 1, {0.5})), 200, 1).pass;
    const DiscreteOperator op2 =
        discretize(sys, qs, BoundaryCondition::linear(Mat(1, 1, {2.0})), 32);
    const DiscreteOperator oph =
        discretize(sys, qs, BoundaryCondition::linear(Mat(1, 1, {0.5})), 32);
    const VerificationReport bad = certify_accretive(op2);
    const VerificationReport good = certify_accretive(oph);
    const double normalized = bad.residual("min_eigenvalue") / bad.residual("scale");
    const bool ok = !cls_bad && !bad.pass && normalized <= -0.1 && cls_good && good.pass;
    return {ok, "normalized_witness=" + fmt("%.3f", normalized)};
}

std::vector<double> gauss_state(const DiscreteOperator& op, double center, double width,
                                double amp, int comp) {
    std::vector<double> u(op.dim(), 0.0);
    const std::size_t d = static_cast<std::size_t>(op.sys.d);
    for (std::size_t j = 0; j < op.grid.nodes.size(); ++j) {
        const double s = (op.grid.nodes[j] - center) / width;
        u[j * d + static_cast<std::size_t>(comp)] = amp * std::exp(-s * s);
    }
    return u;
}

// 8. Trajectory contraction and the discrete energy-flux balance.
CriterionResult c_semigroup_contraction() {
    const double dt = 1e-3, T = 1.0;
    const PhsSystem tsys = transport_system();
    const QSplit tqs = split_q(build_q(tsys));
    const PhsSystem bsys = beam_system();
    const QSplit bqs = split_q(build_q(bsys));
    const VectorFn clamp_fn = [](const std::vector<double>& x) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i], -0.7, 0.7);
        return y;
    };

    struct Entry {
        DiscreteOperator op;
        double width, amp;
    };
    std::vector<Entry> entries;
    for (const double alpha : {0.0, 0.5, 1.0})
        entries.push_back(
            {discretize(tsys, tqs, BoundaryCondition::linear(Mat(1, 1, {alpha})), 32), 0.125,
             1.0});
    entries.push_back({discretize(bsys, bqs, BoundaryCondition::linear(Mat(4, 4)), 32), 0.3, 0.2});
    entries.push_back({discretize(tsys, tqs, BoundaryCondition::nonlinear(clamp_fn, 1.0), 32),
                       0.125, 1.0});

    double worst_inc = 0.0, worst_imb = 0.0;
    bool ok = true;
    for (const Entry& e : entries) {
        const Trajectory tu = simulate(e.op, gauss_state(e.op, 0.45, e.width, e.amp, 0), T, dt);
        const Trajectory tv =
            simulate(e.op, gauss_state(e.op, 0.55, e.width, 0.8 * e.amp, 0), T, dt);
        const Trajectory tz = simulate(e.op, std::vector<double>(e.op.dim(), 0.0), T, dt);
        for (const auto* pair : {&tu, &tv}) {
            const VerificationReport bal = energy_balance_check(e.op, *pair, dt);
            ok = ok && bal.pass;
            worst_imb =
                std::max(worst_imb, bal.residual("max_imbalance") / bal.residual("tolerance"));
        }
        const VerificationReport cuv = contraction_check(e.op, tu, tv);
        const VerificationReport cu0 = contraction_check(e.op, tu, tz);
        const VerificationReport cv0 = contraction_check(e.op, tv, tz);
        for (const auto* rep : {&cuv, &cu0, &cv0}) {
            ok = ok && rep->pass;
            if (rep->residual("initial_distance") > 0.0)
                worst_inc = std::max(worst_inc, rep->residual("max_increase") /
                                                    rep->residual("initial_distance"));
        }
    }
    return {ok, "max_rel_increase=" + fmt("%.2e", worst_inc) +
                    " max_imbalance_over_tol=" + fmt("%.2f", worst_imb)};
}

// 9. Closed-form exponential decomposition of scalar polynomials.
CriterionResult c_scalar_decomposition_oracle() {
    Rng rng(909);
    double worst_end = 0.0, worst_green = 0.0, worst_cf = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Poly1 p(rng.uniform_vec(11, -1.0, 1.0));
        const Poly1 q(rng.uniform_vec(11, -1.0, 1.0));
        PolyFunction u;
        u.components = {p};
        const StdDecomposition dec = std_system_oracle_d1(0.0, 1.0, u);
        worst_end = std::max({worst_end, std::abs(dec.residual_a), std::abs(dec.residual_b)});

        const Poly1 dp = p.derivative(), dq = q.derivative();
        const double lhs = graph_inner_d1(dp, q, 0.0, 1.0) + graph_inner_d1(p, dq, 0.0, 1.0);
        const auto endpoint = [&](double t) {
            return p.eval(t) * q.eval(t) + dp.eval(t) * dq.eval(t);
        };
        const double rhs = endpoint(1.0) - endpoint(0.0);
        worst_green = std::max(worst_green, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
    for (const auto& [a, b] : std::vector<std::pair<double, double>>{
             {0.0, 1.0}, {0.2, 1.1}, {-0.5, 0.7}}) {
        PolyFunction one;
        one.components = {Poly1::constant(1.0)};
        one.a = a;
        one.b = b;
        const StdDecomposition dec = std_system_oracle_d1(a, b, one);
        const double den = std::exp(a) + std::exp(b);
        worst_cf = std::max(worst_cf, std::abs(dec.pi1 - 1.0 / den));
        worst_cf = std::max(worst_cf, std::abs(dec.pim1 - std::exp(a + b) / den));
    }
    const bool ok = worst_end <= 1e-8 && worst_green <= 1e-8 && worst_cf <= 1e-10;
    return {ok, "endpoint=" + fmt("%.2e", worst_end) + " green=" + fmt("%.2e", worst_green) +
                    " closed_form=" + fmt("%.2e", worst_cf)};
}

// 10. Boundary-relation transfer: induced scalar map is well defined and
// contractive in the graph norm for each contraction in the family.
CriterionResult c_boundary_map_correspondence() {
    const std::vector<double> probes = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.3, 0.7, 1.0, 1.5, 2.0};
    const std::vector<std::pair<std::string, ScalarFn>> family = {
        {"zero", [](double) { return 0.0; }},
        {"half", [](double x) { return 0.5 * x; }},
        {"identity", [](double x) { return x; }},
        {"clamp", [](double x) { return std::clamp(x, -0.7, 0.7); }},
    };
    bool ok = true;
    double worst_spread = 0.0, worst_ratio = 0.0;
    for (const auto& [name, g] : family) {
        const DerivedH dh = derive_h_from_g(0.0, 1.0, g, probes, 3);
        ok = ok && dh.report.pass && dh.report.residual("constructions") >= 3.0 &&
             dh.report.residual("probes") == static_cast<double>(probes.size());
        worst_spread = std::max(worst_spread, dh.report.residual("max_spread"));
        worst_ratio = std::max(worst_ratio, dh.report.residual("max_contraction_ratio"));
    }
    ok = ok && worst_spread <= 1e-6 && worst_ratio <= 1.0 + 1e-8;
    return {ok, "max_spread=" + fmt("%.2e", worst_spread) +
                    " max_ratio=" + fmt("%.8f", worst_ratio)};
}

// 11. Lipschitz extension: interpolation, re-validation, and the 1-D
// feasible-interval cross-check.
CriterionResult c_lipschitz_extension() {
    const std::vector<SamplePoint> pts = {
        {{0.0, 0.0}, {0.0}}, {{1.0, 0.0}, {0.8}}, {{0.0, 1.0}, {-0.3}}};
    const SampleSet set(pts, 1.0);
    std::vector<std::vector<double>> sample_x;
    for (const SamplePoint& p : pts) sample_x.push_back(p.x);
    const auto at_samples = extend_sequential(set, sample_x);
    double worst_interp = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t k = 0; k < pts[i].y.size(); ++k)
            worst_interp = std::max(worst_interp, std::abs(at_samples[i][k] - pts[i].y[k]));

    Rng rng(1111);
    std::vector<std::vector<double>> queries;
    for (int i = 0; i < 20; ++i) queries.push_back(rng.uniform_vec(2, -2.0, 2.0));
    const auto values = extend_sequential(set, queries);
    std::vector<SamplePoint> all = pts;
    for (std::size_t i = 0; i < queries.size(); ++i) all.push_back({queries[i], values[i]});
    const VerificationReport reval = validate_samples(all, 1.0, 2e-6);

    // 1-D cross-check: the returned value must lie in the grid-certified
    // feasible interval [0.3, 0.5] for the midpoint query.
    const SampleSet line({{{0.0}, {0.0}}, {{1.0}, {0.8}}}, 1.0);
    const double y = extend_sequential(line, {{0.5}})[0][0];
    double lo = 2.0, hi = -2.0;
    for (double cand = -2.0; cand <= 2.0; cand += 1e-3) {
        if (std::abs(cand - 0.0) <= 0.5 + 1e-9 && std::abs(cand - 0.8) <= 0.5 + 1e-9) {
            lo = std::min(lo, cand);
            hi = std::max(hi, cand);
        }
    }
    const bool in_interval = y >= lo - 1e-3 && y <= hi + 1e-3;
    const bool ok = worst_interp <= 1e-6 && reval.pass && in_interval;
    return {ok, "interp=" + fmt("%.2e", worst_interp) +
                    " revalidate_violation=" + fmt("%.2e", reval.residual("max_violation")) +
                    " midpoint=" + fmt("%.3f", y)};
}

// 12. Weighted energy density vs unit-weight congruence: certification
// verdicts transfer both ways on the semigroup corpus.
CriterionResult c_weighted_flat_congruence() {
    const std::vector<double> mus = {0.1, 1.0, 10.0};
    int checked = 0, agreed = 0;
    const VectorFn clamp_fn = [](const std::vector<double>& x) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i], -0.7, 0.7);
        return y;
    };

    const auto compare = [&](const PhsSystem& wsys, const BoundaryCondition& bc, int N) {
        const FlatProblem flat = weighted_wrap(wsys, bc);
        const DiscreteOperator wop = discretize(wsys, split_q(build_q(wsys)), bc, N);
        const DiscreteOperator fop =
            discretize(flat.sys, split_q(build_q(flat.sys)), flat.bc, N);
        const bool wa = certify_accretive(wop).pass;
        const bool fa = certify_accretive(fop).pass;
        const bool wm = certify_m_accretive(wop, mus, 10, 5).pass;
        const bool fm = certify_m_accretive(fop, mus, 10, 5).pass;
        checked += 2;
        agreed += (wa == fa) + (wm == fm);
    };

    PhsSystem t2 = transport_system();
    t2.ham = HamiltonianDensity::constant(Mat(1, 1, {2.0}), 2.0);
    for (const double alpha : {0.0, 0.5, 1.0})
        compare(t2, BoundaryCondition::linear(Mat(1, 1, {alpha})), 24);
    compare(t2, BoundaryCondition::nonlinear(clamp_fn, 1.0), 24);

    PhsSystem bw = beam_system();
    bw.ham = HamiltonianDensity::constant(Mat(2, 2, {1.0, 0.0, 0.0, 2.0}), 1.0);
    compare(bw, BoundaryCondition::linear(Mat(4, 4)), 24);

    return {checked == 10 && agreed == checked,
            "verdict_agreements=" + std::to_string(agreed) + "/" + std::to_string(checked)};
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        double limit_s;
        std::function<CriterionResult()> fn;
    };
    const std::vector<Entry> entries = {
        {"green_identity", 10.0, c_green_identity},
        {"spectral_split", 5.0, c_spectral_split},
        {"trace_surjectivity", 5.0, c_trace_surjectivity},
        {"kernel_linear_equivalence", 10.0, c_kernel_linear_equivalence},
        {"transport_posdef_scalar", 1.0, c_transport_posdef_scalar},
        {"resolvent_lipschitz", 20.0, c_resolvent_lipschitz},
        {"accretivity_detection", 5.0, c_accretivity_detection},
        {"semigroup_contraction", 60.0, c_semigroup_contraction},
        {"scalar_decomposition_oracle", 5.0, c_scalar_decomposition_oracle},
        {"boundary_map_correspondence", 20.0, c_boundary_map_correspondence},
        {"lipschitz_extension", 10.0, c_lipschitz_extension},
        {"weighted_flat_congruence", 30.0, c_weighted_flat_congruence},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = e.fn();
        } catch (const std::exception& ex) {
            r = {false, std::string("exception: ") + ex.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = r.pass && secs < e.limit_s;
        if (!ok) ++failures;
        std::printf("[%s] %-28s %s (%.2fs)\n", ok ? "PASS" : "FAIL", e.name, r.detail.c_str(),
                    secs);
    }
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", entries.size());
    else
        std::printf("acceptance: %d of %zu criteria FAILED\n", failures, entries.size());
    return failures == 0 ? 0 : 1;
}

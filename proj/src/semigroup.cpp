#include "phbc/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace phbc {

namespace {

void record(const DiscreteOperator& op, Trajectory& traj, double t,
            const std::vector<double>& u) {
    traj.times.push_back(t);
    traj.states.push_back(u);
    traj.energies.push_back(g_inner(op, u, u));
    const std::vector<double> f1 = mat_vec(op.F1m, u);
    const std::vector<double> f2 = mat_vec(op.F2m, u);
    traj.boundary_flux.push_back(dot(f1, f1) - dot(f2, f2));
}

}  // namespace

std::vector<double> step_implicit(const DiscreteOperator& op, const std::vector<double>& u,
                                  double dt) {
    if (!(dt > 0.0)) throw Error("time step must be positive");
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = u[i] / dt;
    return resolvent_solve(op, 1.0 / dt, f);
}

Trajectory simulate(const DiscreteOperator& op, const std::vector<double>& u0, double T,
                    double dt) {
    if (u0.size() != op.dim()) throw DimensionMismatch("initial state has wrong length");
    if (!(T > 0.0) || !(dt > 0.0)) throw Error("horizon and time step must be positive");

    // Project the initial data onto the constraint set: at a large parameter
    // the resolvent applied to mu*u0 reproduces u0 up to O(1/mu) while
    // enforcing the boundary rows exactly.
    const double mu_proj = 1e6;
    std::vector<double> f0(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) f0[i] = mu_proj * u0[i];
    std::vector<double> u = ResolventOperator(op, mu_proj).apply(f0);

    const int steps = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
    const ResolventOperator res(op, 1.0 / dt);
    Trajectory traj;
    record(op, traj, 0.0, u);
    std::vector<double> f(u.size());
    for (int k = 1; k <= steps; ++k) {
        for (std::size_t i = 0; i < u.size(); ++i) f[i] = u[i] / dt;
        try {
            u = res.apply(f);
        } catch (const NotConverged& e) {
            throw NotConverged(std::string(e.what()) + " (step " + std::to_string(k) + ")");
        }
        record(op, traj, k * dt, u);
    }
    return traj;
}

VerificationReport contraction_check(const DiscreteOperator& op, const Trajectory& tu,
                                     const Trajectory& tv) {
    if (tu.times.size() != tv.times.size())
        throw MismatchedTrajectories("trajectories differ in length");
    for (std::size_t k = 0; k < tu.times.size(); ++k)
        if (std::abs(tu.times[k] - tv.times[k]) > 1e-12)
            throw MismatchedTrajectories("trajectories differ in time grids");
    for (std::size_t k = 0; k < tu.states.size(); ++k)
        if (tu.states[k].size() != op.dim() || tv.states[k].size() != op.dim())
            throw MismatchedTrajectories("trajectory states do not match the operator grid");

    VerificationReport rep;
    rep.criterion = "pairwise_distance_nonincreasing";
    std::vector<double> dist(tu.states.size());
    for (std::size_t k = 0; k < tu.states.size(); ++k) {
        std::vector<double> diff(op.dim());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = tu.states[k][i] - tv.states[k][i];
        dist[k] = g_norm(op, diff);
    }
    const double d0 = dist.empty() ? 0.0 : dist.front();
    const double tol = 1e-8 * d0;
    double max_increase = 0.0;
    std::size_t worst = 0;
    for (std::size_t k = 0; k + 1 < dist.size(); ++k) {
        const double inc = dist[k + 1] - dist[k];
        if (inc > max_increase) {
            max_increase = inc;
            worst = k;
        }
    }
    rep.add_residual("initial_distance", d0);
    rep.add_residual("max_increase", max_increase);
    rep.add_residual("tolerance", tol);
    rep.add_residual("steps", static_cast<double>(dist.empty() ? 0 : dist.size() - 1));
    rep.pass = max_increase <= tol;
    if (!rep.pass)
        rep.witnesses.push_back(
            {"violating_step",
             {{static_cast<double>(worst), dist[worst], dist[worst + 1]}}});
    return rep;
}

VerificationReport energy_balance_check(const DiscreteOperator& op, const Trajectory& traj,
                                        double dt) {
    VerificationReport rep;
    rep.criterion = "discrete_energy_flux_balance";
    double scale = 1.0;
    for (double e : traj.energies) scale = std::max(scale, std::abs(e));
    for (double fl : traj.boundary_flux) scale = std::max(scale, std::abs(fl));
    const double N = static_cast<double>(op.grid.N);
    const double tol = 10.0 * (dt + 1.0 / (N * N)) * scale;
    double worst = 0.0;
    std::size_t worst_k = 0;
    for (std::size_t k = 0; k + 1 < traj.energies.size(); ++k) {
        const double imbalance =
            (traj.energies[k + 1] - traj.energies[k]) / dt + traj.boundary_flux[k + 1];
        if (std::abs(imbalance) > worst) {
            worst = std::abs(imbalance);
            worst_k = k;
        }
    }
    rep.add_residual("max_imbalance", worst);
    rep.add_residual("tolerance", tol);
    rep.add_residual("worst_step", static_cast<double>(worst_k));
    rep.add_residual("steps",
                     static_cast<double>(traj.energies.empty() ? 0 : traj.energies.size() - 1));
    rep.pass = worst <= tol;
    return rep;
}

FlatProblem weighted_wrap(const PhsSystem& sys, const BoundaryCondition& bc) {
    validate_system(sys);
    FlatProblem fp;
    fp.sys = sys;
    fp.sys.ham = HamiltonianDensity::constant(
        Mat::identity(static_cast<std::size_t>(sys.d)), 1.0);
    fp.bc = bc;
    return fp;
}

namespace {

void write_value(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

void export_csv(const Trajectory& traj, std::ostream& out) {
    const std::size_t dim = traj.states.empty() ? 0 : traj.states.front().size();
    out << "time,energy,flux";
    for (std::size_t i = 0; i < dim; ++i) out << ",state_" << i;
    out << "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        write_value(out, traj.times[k]);
        out << ',';
        write_value(out, traj.energies[k]);
        out << ',';
        write_value(out, traj.boundary_flux[k]);
        for (double v : traj.states[k]) {
            out << ',';
            write_value(out, v);
        }
        out << "\n";
    }
}

void export_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    export_csv(traj, out);
    if (!out) throw Error("failed writing output file: " + path);
}

}  // namespace phbc

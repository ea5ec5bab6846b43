#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "phbc/discrete.hpp"

namespace phbc {

struct MismatchedTrajectories : Error {
    using Error::Error;
};

// Implicit Euler history. All four lists have one entry per recorded time;
// energies hold the squared weighted norm of the state, boundary_flux the
// value |F1|^2 - |F2|^2 of the state at that time.
struct Trajectory {
    std::vector<double> times;  // strictly increasing, starts at 0
    std::vector<std::vector<double>> states;
    std::vector<double> energies;
    std::vector<double> boundary_flux;
};

// One implicit Euler step of u' = -B(u): the resolvent at 1/dt applied to
// u/dt. Requires dt > 0.
std::vector<double> step_implicit(const DiscreteOperator& op, const std::vector<double>& u,
                                  double dt);

// Steps from 0 to at least T in increments of dt, recording energy and flux
// at every time. The initial state is first projected onto the constraint
// set by one resolvent solve at a large parameter; the factorization at 1/dt
// is built once and reused across steps.
Trajectory simulate(const DiscreteOperator& op, const std::vector<double>& u0, double T,
                    double dt);

// Pass iff the weighted distance between the two state histories never
// increases by more than 1e-8 times the initial distance in any step.
// Throws MismatchedTrajectories unless times and state shapes agree.
VerificationReport contraction_check(const DiscreteOperator& op, const Trajectory& tu,
                                     const Trajectory& tv);

// Per-step discrete energy balance |dE/dt + flux| with the flux taken at the
// end-of-step state, checked against 10*(dt + N^-2) times a scale built from
// the trajectory's largest energy and flux. Meaningful when the boundary
// condition fixes the origin.
VerificationReport energy_balance_check(const DiscreteOperator& op, const Trajectory& traj,
                                        double dt);

// Equivalent problem on the unweighted space: the flat variable is the
// energy-weighted state, so the boundary condition data carries over
// unchanged while the energy density becomes the identity.
struct FlatProblem {
    PhsSystem sys;
    BoundaryCondition bc;
};

FlatProblem weighted_wrap(const PhsSystem& sys, const BoundaryCondition& bc);

// CSV with header time,energy,flux,state_0,...; 17 significant digits.
void export_csv(const Trajectory& traj, std::ostream& out);
void export_csv(const Trajectory& traj, const std::string& path);

}  // namespace phbc

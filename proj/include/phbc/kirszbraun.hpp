#pragma once

#include <vector>

#include "phbc/bcspec.hpp"
#include "phbc/matnum.hpp"

namespace phbc {

struct InvalidSamples : Error {
    using Error::Error;
};
struct NotConverged : Error {
    using Error::Error;
};

struct SamplePoint {
    std::vector<double> x;
    std::vector<double> y;
};

// Checks the pairwise contraction property ||y_i - y_j|| <= L*||x_i - x_j|| + tol;
// a fail verdict carries the worst violating pair as witness.
VerificationReport validate_samples(const std::vector<SamplePoint>& points, double lip,
                                    double tol = 1e-9);

// Sampled graph of an L-Lipschitz map. Construction validates dimensions and
// the pairwise contraction property (tolerance overridable for augmented
// sets produced by extension).
struct SampleSet {
    std::vector<SamplePoint> points;
    double lip = 1.0;

    SampleSet(std::vector<SamplePoint> pts, double lip_, double tol = 1e-9);
};

// Worst slack of the extension constraints at y: max_i(||y-y_i|| - L*||x-x_i||).
// Nonpositive values mean y extends the samples without increasing the
// Lipschitz constant at the query x.
double extension_slack(const SampleSet& s, const std::vector<double>& x,
                       const std::vector<double>& y);

// Returns a y with extension_slack(s, x, y) <= 1e-6, found by subgradient
// descent on the convex max function from a distance-weighted barycenter
// start (iteration cap 1e5). The slack of the result never exceeds the slack
// of the start. Throws NotConverged when no such y is found, which signals
// numerical trouble or an invalid sample set.
std::vector<double> extend(const SampleSet& s, const std::vector<double>& x);

// Processes queries in order, appending each result to the working sample
// set so that all returned values are mutually compatible with the samples
// under the same Lipschitz constant.
std::vector<std::vector<double>> extend_sequential(const SampleSet& s,
                                                   const std::vector<std::vector<double>>& queries);

}  // namespace phbc

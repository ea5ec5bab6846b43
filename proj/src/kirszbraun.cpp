#include "phbc/kirszbraun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phbc {

namespace {

double dist(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

// Slack against a raw point list; index of the active constraint returned
// through `active` when given.
double slack_raw(const std::vector<SamplePoint>& pts, double lip, const std::vector<double>& x,
                 const std::vector<double>& y, std::size_t* active = nullptr) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double s = dist(y, pts[i].y) - lip * dist(x, pts[i].x);
        if (s > worst) {
            worst = s;
            if (active) *active = i;
        }
    }
    return worst;
}

std::vector<double> extend_raw(const std::vector<SamplePoint>& pts, double lip,
                               const std::vector<double>& x) {
    const std::size_t q = pts.front().y.size();

    // Distance-weighted barycenter start.
    std::vector<double> bary(q, 0.0);
    double wsum = 0.0;
    std::size_t nearest = 0;
    double nearest_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dx = dist(x, pts[i].x);
        const double w = 1.0 / (lip * dx + 1e-12);
        wsum += w;
        for (std::size_t j = 0; j < q; ++j) bary[j] += w * pts[i].y[j];
        if (dx < nearest_dist) {
            nearest_dist = dx;
            nearest = i;
        }
    }
    for (double& v : bary) v /= wsum;

    std::vector<double> best = bary;
    double best_slack = slack_raw(pts, lip, x, bary);
    // The stored value at the nearest sample is often already feasible.
    {
        const double s = slack_raw(pts, lip, x, pts[nearest].y);
        if (s < best_slack) {
            best_slack = s;
            best = pts[nearest].y;
        }
    }

    std::vector<double> z = best;
    const int cap = 100000;
    for (int it = 0; it < cap && best_slack > 1e-7; ++it) {
        std::size_t active = 0;
        const double fz = slack_raw(pts, lip, x, z, &active);
        if (fz < best_slack) {
            best_slack = fz;
            best = z;
            if (best_slack <= 1e-7) break;
        }
        const double r = dist(z, pts[active].y);
        if (r < 1e-300) break;  // active ball centre reached; slack is nonpositive there
        // Step length targets the zero level of the max function, whose
        // minimum is nonpositive whenever the samples are a contraction graph.
        const double step = fz / r;
        for (std::size_t j = 0; j < q; ++j) z[j] -= step * (z[j] - pts[active].y[j]);
    }

    if (best_slack > 1e-6)
        throw NotConverged("extension constraints not met within the iteration cap");
    return best;
}

}  // namespace

VerificationReport validate_samples(const std::vector<SamplePoint>& points, double lip,
                                    double tol) {
    VerificationReport rep;
    rep.criterion = "pairwise_contraction";
    double worst = 0.0;
    std::size_t wi = 0, wj = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double v = dist(points[i].y, points[j].y) - lip * dist(points[i].x, points[j].x);
            if (v > worst) {
                worst = v;
                wi = i;
                wj = j;
            }
        }
    rep.add_residual("max_violation", worst);
    rep.add_residual("pairs", 0.5 * static_cast<double>(points.size() * (points.size() - 1)));
    rep.pass = worst <= tol;
    if (!rep.pass)
        rep.witnesses.push_back({"violating_pair", {points[wi].x, points[wi].y, points[wj].x,
                                                    points[wj].y}});
    return rep;
}

SampleSet::SampleSet(std::vector<SamplePoint> pts, double lip_, double tol)
    : points(std::move(pts)), lip(lip_) {
    if (points.empty()) throw InvalidSamples("sample set must contain at least one point");
    if (!(lip > 0.0)) throw InvalidSamples("Lipschitz constant must be positive");
    const std::size_t p = points.front().x.size();
    const std::size_t q = points.front().y.size();
    if (p == 0 || q == 0) throw InvalidSamples("sample points must be nonempty vectors");
    for (const SamplePoint& pt : points)
        if (pt.x.size() != p || pt.y.size() != q)
            throw InvalidSamples("all sample points must share the same dimensions");
    const VerificationReport rep = validate_samples(points, lip, tol);
    if (!rep.pass)
        throw InvalidSamples("sample pair violates the contraction bound by " +
                             std::to_string(rep.residual("max_violation")));
}

double extension_slack(const SampleSet& s, const std::vector<double>& x,
                       const std::vector<double>& y) {
    return slack_raw(s.points, s.lip, x, y);
}

std::vector<double> extend(const SampleSet& s, const std::vector<double>& x) {
    if (x.size() != s.points.front().x.size())
        throw InvalidSamples("query dimension does not match the samples");
    return extend_raw(s.points, s.lip, x);
}

std::vector<std::vector<double>> extend_sequential(const SampleSet& s,
                                                   const std::vector<std::vector<double>>& queries) {
    std::vector<SamplePoint> work = s.points;
    std::vector<std::vector<double>> out;
    out.reserve(queries.size());
    for (const std::vector<double>& x : queries) {
        if (x.size() != work.front().x.size())
            throw InvalidSamples("query dimension does not match the samples");
        std::vector<double> y = extend_raw(work, s.lip, x);
        work.push_back({x, y});
        out.push_back(std::move(y));
    }
    return out;
}

}  // namespace phbc

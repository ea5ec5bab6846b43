#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phbc/jsonio.hpp"
#include "phbc/kirszbraun.hpp"
#include "phbc/semigroup.hpp"

using namespace phbc;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
    unsigned long long seed = 0;
    int samples = 200;
    int grid = 32;
    bool reproducible = false;
    bool force = false;
};

ordered_json mat_json(const Mat& M) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < M.rows; ++r) {
        ordered_json row = ordered_json::array();
        for (std::size_t c = 0; c < M.cols; ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

void merge_residuals(VerificationReport& into, const VerificationReport& from,
                     const std::string& prefix) {
    for (const auto& [name, value] : from.residuals) into.add_residual(prefix + name, value);
    for (const Witness& w : from.witnesses) into.witnesses.push_back(w);
}

VerificationReport admissibility_report(const QSplit& qs, const BoundaryCondition& bc,
                                        const GlobalOpts& g) {
    const VerificationReport cls = classify(qs, bc, g.samples, g.seed);
    const VerificationReport str = structural_checks(qs, bc, g.samples);
    VerificationReport merged;
    merged.criterion = "boundary_condition_admissibility";
    merged.pass = cls.pass && str.pass;
    merge_residuals(merged, cls, "");
    merge_residuals(merged, str, "structural_");
    return merged;
}

void print_report(const VerificationReport& rep, const GlobalOpts& g) {
    std::cout << serialize_report(make_report_file(rep, g.seed, !g.reproducible));
}

int run_classify(const GlobalOpts& g, const std::string& path) {
    const SystemFile sf = load_system_file(path);
    const QSplit qs = split_q(build_q(sf.sys));
    const VerificationReport rep = admissibility_report(qs, sf.bc, g);
    print_report(rep, g);
    return rep.pass ? 0 : 1;
}

int run_convert(const GlobalOpts&, const std::string& path, const std::string& to) {
    const SystemFile sf = load_system_file(path);
    const QSplit qs = split_q(build_q(sf.sys));
    if (sf.bc.kind == BoundaryCondition::Kind::nonlinear_g)
        throw ParseError("$.bc: conversion requires a matrix form ('M' or 'W')");

    ordered_json out;
    const std::size_t nd = qs.nd();
    if (to == "m") {
        Mat M, K;
        if (sf.bc.kind == BoundaryCondition::Kind::linear_m) {
            M = sf.bc.M;
            K = Mat::identity(nd);
        } else {
            std::tie(M, K) = w_to_m(qs, sf.bc.W);
        }
        out["M"] = mat_json(M);
        out["K"] = mat_json(K);
    } else {
        Mat W, K = Mat::identity(nd);
        W = (sf.bc.kind == BoundaryCondition::Kind::kernel_w) ? sf.bc.W : m_to_w(qs, sf.bc.M);
        out["W"] = mat_json(W);
        out["K"] = mat_json(K);
    }
    out["tool_version"] = tool_version;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_verify(const GlobalOpts& g, const std::string& path, const std::vector<double>& mus) {
    const SystemFile sf = load_system_file(path);
    const QSplit qs = split_q(build_q(sf.sys));

    // Boundary identity on random smooth data in exact arithmetic.
    Rng rng(g.seed);
    double worst_green = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        PolyFunction u, v;
        u.a = v.a = sf.sys.a;
        u.b = v.b = sf.sys.b;
        for (int i = 0; i < sf.sys.d; ++i) {
            u.components.push_back(Poly1(rng.uniform_vec(4, -1.0, 1.0)));
            v.components.push_back(Poly1(rng.uniform_vec(4, -1.0, 1.0)));
        }
        const double denom = 1.0 + std::abs(h_inner(sf.sys, apply_a(sf.sys, u), v)) +
                             std::abs(h_inner(sf.sys, u, apply_a(sf.sys, v)));
        worst_green = std::max(worst_green, greens_residual(sf.sys, qs, u, v) / denom);
    }
    const bool green_ok = worst_green <= 1e-9;

    const DiscreteOperator op = discretize(sf.sys, qs, sf.bc, g.grid);
    const VerificationReport acc = certify_accretive(op);
    const VerificationReport macc = certify_m_accretive(op, mus, 20, g.seed);

    VerificationReport merged;
    merged.criterion = "system_verification";
    merged.pass = green_ok && acc.pass && macc.pass;
    merged.add_residual("green_identity_max_residual", worst_green);
    merge_residuals(merged, acc, "accretive_");
    merge_residuals(merged, macc, "resolvent_");
    print_report(merged, g);
    return merged.pass ? 0 : 1;
}

std::vector<double> parse_u0(const std::string& spec, const DiscreteOperator& op) {
    if (spec == "zero") return std::vector<double>(op.dim(), 0.0);
    if (spec == "bump" || spec.rfind("bump:", 0) == 0) {
        double center = 0.5 * (op.sys.a + op.sys.b);
        double width = (op.sys.b - op.sys.a) / 8.0;
        double amp = 1.0;
        int comp = 0;
        if (spec.size() > 5) {
            std::string rest = spec.substr(5);
            std::size_t pos = 0;
            while (pos < rest.size()) {
                const std::size_t comma = rest.find(',', pos);
                const std::string item =
                    rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
                const std::size_t eq = item.find('=');
                if (eq == std::string::npos)
                    throw ParseError("--u0 bump: expected key=value, got '" + item + "'");
                const std::string key = item.substr(0, eq);
                const double value = std::stod(item.substr(eq + 1));
                if (key == "center")
                    center = value;
                else if (key == "width")
                    width = value;
                else if (key == "amp")
                    amp = value;
                else if (key == "comp")
                    comp = static_cast<int>(value);
                else
                    throw ParseError("--u0 bump: unknown key '" + key + "'");
                pos = comma == std::string::npos ? rest.size() : comma + 1;
            }
        }
        if (!(width > 0.0)) throw ParseError("--u0 bump: width must be positive");
        if (comp < 0 || comp >= op.sys.d)
            throw ParseError("--u0 bump: component out of range");
        std::vector<double> u(op.dim(), 0.0);
        const std::size_t d = static_cast<std::size_t>(op.sys.d);
        for (std::size_t j = 0; j < op.grid.nodes.size(); ++j) {
            const double s = (op.grid.nodes[j] - center) / width;
            u[j * d + static_cast<std::size_t>(comp)] = amp * std::exp(-s * s);
        }
        return u;
    }
    // Otherwise a JSON file holding the nodal state.
    std::ifstream in(spec);
    if (!in) throw ParseError("--u0: cannot open file: " + spec);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(spec + ": invalid JSON: " + e.what());
    }
    const json& arr = doc.is_object() && doc.contains("state") ? doc["state"] : doc;
    if (!arr.is_array())
        throw ParseError(spec + ": expected an array of nodal values (or {\"state\": [...]})");
    if (arr.size() != op.dim())
        throw ParseError(spec + ": state has " + std::to_string(arr.size()) +
                         " values, operator needs " + std::to_string(op.dim()));
    std::vector<double> u;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw ParseError(spec + "[" + std::to_string(i) + "]: expected a number");
        u.push_back(arr[i].get<double>());
    }
    return u;
}

int run_simulate(const GlobalOpts& g, const std::string& path, const std::string& u0spec,
                 double T, double dt, const std::string& out) {
    const SystemFile sf = load_system_file(path);
    const QSplit qs = split_q(build_q(sf.sys));
    const VerificationReport adm = admissibility_report(qs, sf.bc, g);
    if (!adm.pass && !g.force) {
        std::cerr << "error: boundary condition failed classification; "
                     "pass --force to simulate it anyway\n";
        print_report(adm, g);
        return 1;
    }

    const DiscreteOperator op = discretize(sf.sys, qs, sf.bc, g.grid);
    const Trajectory traj = simulate(op, parse_u0(u0spec, op), T, dt);
    export_csv(traj, out);

    // Energy monotonicity relative to the stationary zero state, plus the
    // per-step balance identity.
    const double e0 = traj.energies.front();
    const double d0 = std::sqrt(std::max(e0, 0.0));
    double max_increase = 0.0;
    for (std::size_t k = 0; k + 1 < traj.energies.size(); ++k) {
        const double inc = std::sqrt(std::max(traj.energies[k + 1], 0.0)) -
                           std::sqrt(std::max(traj.energies[k], 0.0));
        max_increase = std::max(max_increase, inc);
    }
    const bool mono = max_increase <= 1e-8 * d0;
    const VerificationReport bal = energy_balance_check(op, traj, dt);

    VerificationReport rep;
    rep.criterion = "trajectory_dissipation_and_balance";
    rep.pass = mono && bal.pass;
    rep.add_residual("steps", static_cast<double>(traj.times.size() - 1));
    rep.add_residual("energy_initial", e0);
    rep.add_residual("energy_final", traj.energies.back());
    rep.add_residual("monotonicity_max_increase", max_increase);
    rep.add_residual("monotonicity_tolerance", 1e-8 * d0);
    merge_residuals(rep, bal, "balance_");
    print_report(rep, g);
    return rep.pass ? 0 : 1;
}

int run_kirszbraun(const GlobalOpts& g, const std::string& samples_path,
                   const std::string& queries_path) {
    std::ifstream sin(samples_path);
    if (!sin) throw ParseError("cannot open file: " + samples_path);
    json sdoc;
    try {
        sdoc = json::parse(sin);
    } catch (const json::parse_error& e) {
        throw ParseError(samples_path + ": invalid JSON: " + e.what());
    }
    if (!sdoc.is_object() || !sdoc.contains("lip") || !sdoc.contains("points"))
        throw ParseError(samples_path + ": expected {\"lip\": L, \"points\": [...]}");
    if (!sdoc["lip"].is_number()) throw ParseError(samples_path + ": $.lip must be a number");
    const double lip = sdoc["lip"].get<double>();
    if (!sdoc["points"].is_array())
        throw ParseError(samples_path + ": $.points must be an array");
    std::vector<SamplePoint> points;
    for (std::size_t i = 0; i < sdoc["points"].size(); ++i) {
        const json& p = sdoc["points"][i];
        const std::string ppath = samples_path + ": $.points[" + std::to_string(i) + "]";
        if (!p.is_object() || !p.contains("x") || !p.contains("y") || !p["x"].is_array() ||
            !p["y"].is_array())
            throw ParseError(ppath + ": expected {\"x\": [...], \"y\": [...]}");
        SamplePoint sp;
        for (const json& v : p["x"]) {
            if (!v.is_number()) throw ParseError(ppath + ".x: expected numbers");
            sp.x.push_back(v.get<double>());
        }
        for (const json& v : p["y"]) {
            if (!v.is_number()) throw ParseError(ppath + ".y: expected numbers");
            sp.y.push_back(v.get<double>());
        }
        points.push_back(std::move(sp));
    }

    const VerificationReport validation = validate_samples(points, lip);
    if (!validation.pass) {
        print_report(validation, g);
        return 1;
    }

    std::ifstream qin(queries_path);
    if (!qin) throw ParseError("cannot open file: " + queries_path);
    json qdoc;
    try {
        qdoc = json::parse(qin);
    } catch (const json::parse_error& e) {
        throw ParseError(queries_path + ": invalid JSON: " + e.what());
    }
    const json& qarr = qdoc.is_object() && qdoc.contains("queries") ? qdoc["queries"] : qdoc;
    if (!qarr.is_array()) throw ParseError(queries_path + ": expected an array of points");
    std::vector<std::vector<double>> queries;
    for (std::size_t i = 0; i < qarr.size(); ++i) {
        const json& q = qarr[i];
        if (!q.is_array())
            throw ParseError(queries_path + ": $[" + std::to_string(i) +
                             "]: expected an array");
        std::vector<double> x;
        for (const json& v : q) {
            if (!v.is_number())
                throw ParseError(queries_path + ": $[" + std::to_string(i) +
                                 "]: expected numbers");
            x.push_back(v.get<double>());
        }
        queries.push_back(std::move(x));
    }

    const SampleSet set(points, lip);
    const std::vector<std::vector<double>> values = extend_sequential(set, queries);

    std::vector<SamplePoint> all = points;
    for (std::size_t i = 0; i < queries.size(); ++i) all.push_back({queries[i], values[i]});
    const VerificationReport post = validate_samples(all, lip);

    ordered_json out;
    out["verdict"] = post.pass ? "pass" : "fail";
    ordered_json vals = ordered_json::array();
    for (const std::vector<double>& v : values) {
        ordered_json row = ordered_json::array();
        for (double x : v) row.push_back(x);
        vals.push_back(std::move(row));
    }
    out["values"] = std::move(vals);
    out["max_violation"] = post.residual("max_violation");
    out["tool_version"] = tool_version;
    out["seed"] = g.seed;
    std::cout << out.dump(2) << "\n";
    return post.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-condition classification, verification, and simulation "
                 "for first-order port-Hamiltonian boundary systems"};
    GlobalOpts g;
    app.add_option("--seed", g.seed, "Seed for all randomized procedures")->capture_default_str();
    app.add_option("--samples", g.samples, "Sample count for randomized checks")
        ->capture_default_str();
    app.add_option("--grid", g.grid, "Collocation grid size")->capture_default_str();
    app.add_flag("--reproducible", g.reproducible, "Suppress the report timestamp");
    app.add_flag("--force", g.force, "Simulate even when classification fails");

    std::string system_path, to, u0spec = "zero", out_path, samples_path, queries_path;
    double T = 1.0, dt = 0.01;
    std::vector<double> mus = {0.5, 1.0, 2.0};

    CLI::App* c_classify = app.add_subcommand("classify", "Classify a boundary condition");
    c_classify->add_option("system", system_path, "System JSON file")->required();
    c_classify->fallthrough();

    CLI::App* c_convert =
        app.add_subcommand("convert", "Convert between matrix and kernel forms");
    c_convert->add_option("system", system_path, "System JSON file")->required();
    c_convert->add_option("--to", to, "Target form: m or w")
        ->required()
        ->check(CLI::IsMember({"m", "w"}));
    c_convert->fallthrough();

    CLI::App* c_verify =
        app.add_subcommand("verify", "Verify the boundary identity and resolvent bounds");
    c_verify->add_option("system", system_path, "System JSON file")->required();
    c_verify->add_option("--mu", mus, "Resolvent parameters")
        ->delimiter(',')
        ->capture_default_str();
    c_verify->fallthrough();

    CLI::App* c_simulate = app.add_subcommand("simulate", "Integrate u' = -B(u)");
    c_simulate->add_option("system", system_path, "System JSON file")->required();
    c_simulate->add_option("--u0", u0spec,
                           "Initial state: zero, bump[:key=value,...], or a JSON file")
        ->capture_default_str();
    c_simulate->add_option("--T", T, "Time horizon")->capture_default_str();
    c_simulate->add_option("--dt", dt, "Time step")->capture_default_str();
    c_simulate->add_option("--out", out_path, "Trajectory CSV path")->required();
    c_simulate->fallthrough();

    CLI::App* c_kir =
        app.add_subcommand("kirszbraun", "Extend a sampled Lipschitz map to new points");
    c_kir->add_option("samples", samples_path, "Samples JSON file")->required();
    c_kir->add_option("queries", queries_path, "Queries JSON file")->required();
    c_kir->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_classify->parsed()) return run_classify(g, system_path);
        if (c_convert->parsed()) return run_convert(g, system_path, to);
        if (c_verify->parsed()) return run_verify(g, system_path, mus);
        if (c_simulate->parsed()) return run_simulate(g, system_path, u0spec, T, dt, out_path);
        if (c_kir->parsed()) return run_kirszbraun(g, samples_path, queries_path);
        std::cerr << "error: no command given (see --help)\n";
        return 2;
    } catch (const RankDeficient& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const KSingular& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidSamples& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

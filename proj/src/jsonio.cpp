#include "phbc/jsonio.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "phbc/matnum.hpp"

namespace phbc {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path + ": expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + ": missing key '" + key + "'");
    return *it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path + ": expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ParseError(path + ": expected an integer");
    return v.get<int>();
}

Mat as_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty() || !v.front().is_array())
        throw ParseError(path + ": expected a nested array of rows");
    const std::size_t rows = v.size();
    const std::size_t cols = v.front().size();
    if (cols == 0) throw ParseError(path + ": rows must be non-empty");
    Mat M(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = v[r];
        const std::string rpath = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.size() != cols)
            throw ParseError(rpath + ": ragged row; expected " + std::to_string(cols) +
                             " entries");
        for (std::size_t c = 0; c < cols; ++c)
            M(r, c) = as_number(row[c], rpath + "[" + std::to_string(c) + "]");
    }
    return M;
}

void check_square(const Mat& M, std::size_t d, const std::string& path) {
    if (M.rows != d || M.cols != d)
        throw ParseError(path + ": expected a " + std::to_string(d) + "x" + std::to_string(d) +
                         " matrix, got " + std::to_string(M.rows) + "x" +
                         std::to_string(M.cols));
}

MatPoly as_matpoly(const json& v, std::size_t d, const std::string& path) {
    if (!v.is_array() || v.size() != d)
        throw ParseError(path + ": expected " + std::to_string(d) + " rows");
    std::vector<Poly1> entries;
    for (std::size_t r = 0; r < d; ++r) {
        const json& row = v[r];
        const std::string rpath = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.size() != d)
            throw ParseError(rpath + ": expected " + std::to_string(d) + " coefficient lists");
        for (std::size_t c = 0; c < d; ++c) {
            const json& cell = row[c];
            const std::string cpath = rpath + "[" + std::to_string(c) + "]";
            if (!cell.is_array() || cell.empty())
                throw ParseError(cpath + ": expected a non-empty coefficient list");
            std::vector<double> coeffs;
            for (std::size_t k = 0; k < cell.size(); ++k)
                coeffs.push_back(as_number(cell[k], cpath + "[" + std::to_string(k) + "]"));
            entries.push_back(Poly1(coeffs));
        }
    }
    return MatPoly(d, std::move(entries));
}

// Smallest eigenvalue of the symmetric part sampled across the interval,
// shaded slightly downward; nonpositive values are passed through so system
// validation rejects the density.
double sampled_lower_bound(const MatPoly& H, double a, double b) {
    double c = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= 200; ++s) {
        const double t = a + (b - a) * s / 200.0;
        const Mat Ht = H.eval(t);
        Mat S(Ht.rows, Ht.cols);
        for (std::size_t i = 0; i < Ht.rows; ++i)
            for (std::size_t j = 0; j < Ht.cols; ++j) S(i, j) = 0.5 * (Ht(i, j) + Ht(j, i));
        const EigResult eig = sym_eig(S);
        c = std::min(c, eig.eigenvalues.back());
    }
    return c > 0.0 ? c * (1.0 - 1e-9) : c;
}

HamiltonianDensity parse_hamiltonian(const json& v, std::size_t d, double a, double b,
                                     const std::string& path) {
    if (!v.is_object()) throw ParseError(path + ": expected an object");
    const bool has_const = v.contains("constant");
    const bool has_poly = v.contains("polynomial");
    if (has_const == has_poly)
        throw ParseError(path + ": expected exactly one of 'constant' or 'polynomial'");
    MatPoly H;
    if (has_const) {
        const Mat H0 = as_matrix(v["constant"], path + ".constant");
        check_square(H0, d, path + ".constant");
        H = MatPoly(H0);
    } else {
        H = as_matpoly(v["polynomial"], d, path + ".polynomial");
    }
    double c;
    if (v.contains("lower_bound")) {
        c = as_number(v["lower_bound"], path + ".lower_bound");
    } else {
        c = sampled_lower_bound(H, a, b);
    }
    return has_const ? HamiltonianDensity::constant(H.eval(a), c)
                     : HamiltonianDensity::polynomial(H, c);
}

VectorFn builtin_clamp(double lo, double hi) {
    return [lo, hi](const std::vector<double>& x) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i], lo, hi);
        return y;
    };
}

VectorFn builtin_rotation(double angle, double scale, std::size_t nd) {
    const double cs = std::cos(angle), sn = std::sin(angle);
    return [cs, sn, scale, nd](const std::vector<double>& x) {
        std::vector<double> y(x.size());
        std::size_t i = 0;
        for (; i + 1 < nd; i += 2) {
            y[i] = scale * (cs * x[i] - sn * x[i + 1]);
            y[i + 1] = scale * (sn * x[i] + cs * x[i + 1]);
        }
        if (i < nd) y[i] = scale * x[i];
        return y;
    };
}

BoundaryCondition parse_bc(const json& v, std::size_t nd, const json& root,
                           double& lipschitz_claim, const std::string& path) {
    if (!v.is_object()) throw ParseError(path + ": expected an object");
    const int given = (v.contains("M") ? 1 : 0) + (v.contains("W") ? 1 : 0) +
                      (v.contains("g") ? 1 : 0);
    if (given != 1) throw ParseError(path + ": expected exactly one of 'M', 'W', or 'g'");

    if (v.contains("M")) {
        const Mat M = as_matrix(v["M"], path + ".M");
        check_square(M, nd, path + ".M");
        return BoundaryCondition::linear(M);
    }
    if (v.contains("W")) {
        const Mat W = as_matrix(v["W"], path + ".W");
        if (W.rows != nd || W.cols != 2 * nd)
            throw ParseError(path + ".W: expected a " + std::to_string(nd) + "x" +
                             std::to_string(2 * nd) + " matrix");
        return BoundaryCondition::kernel(W);
    }

    const json& g = v["g"];
    const std::string gpath = path + ".g";
    if (!g.is_object()) throw ParseError(gpath + ": expected an object");
    const json& jname = require(g, "name", gpath);
    if (!jname.is_string()) throw ParseError(gpath + ".name: expected a string");
    const std::string name = jname.get<std::string>();

    VectorFn fn;
    double natural = 1.0;
    if (name == "linear") {
        const Mat M = as_matrix(require(g, "matrix", gpath), gpath + ".matrix");
        check_square(M, nd, gpath + ".matrix");
        natural = spectral_norm(M);
        fn = [M](const std::vector<double>& x) { return mat_vec(M, x); };
    } else if (name == "clamp") {
        const double lo = g.contains("lo") ? as_number(g["lo"], gpath + ".lo") : -1.0;
        const double hi = g.contains("hi") ? as_number(g["hi"], gpath + ".hi") : 1.0;
        if (!(lo < hi)) throw ParseError(gpath + ": clamp bounds must satisfy lo < hi");
        fn = builtin_clamp(lo, hi);
    } else if (name == "scaled_rotation") {
        const double angle = g.contains("angle") ? as_number(g["angle"], gpath + ".angle") : 0.0;
        const double scale = g.contains("scale") ? as_number(g["scale"], gpath + ".scale") : 1.0;
        natural = std::abs(scale);
        fn = builtin_rotation(angle, scale, nd);
    } else if (name == "shifted") {
        const json& joff = require(g, "offset", gpath);
        if (!joff.is_array() || joff.size() != nd)
            throw ParseError(gpath + ".offset: expected " + std::to_string(nd) + " numbers");
        std::vector<double> offset;
        for (std::size_t i = 0; i < nd; ++i)
            offset.push_back(as_number(joff[i], gpath + ".offset[" + std::to_string(i) + "]"));
        fn = [offset](const std::vector<double>& x) {
            std::vector<double> y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + offset[i];
            return y;
        };
    } else {
        throw ParseError(gpath + ".name: unknown built-in '" + name +
                         "' (known: linear, clamp, scaled_rotation, shifted)");
    }

    lipschitz_claim = root.contains("lipschitz_claim")
                          ? as_number(root["lipschitz_claim"], "$.lipschitz_claim")
                          : natural;
    return BoundaryCondition::nonlinear(fn, lipschitz_claim);
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace

SystemFile parse_system_file(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("$: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("$: expected an object");

    SystemFile sf;
    sf.sys.n = as_int(require(doc, "n", "$"), "$.n");
    sf.sys.d = as_int(require(doc, "d", "$"), "$.d");
    if (sf.sys.n < 1) throw ParseError("$.n: derivative order must be at least 1");
    if (sf.sys.d < 1) throw ParseError("$.d: state dimension must be at least 1");
    const std::size_t d = static_cast<std::size_t>(sf.sys.d);

    const json& itv = require(doc, "interval", "$");
    if (!itv.is_array() || itv.size() != 2)
        throw ParseError("$.interval: expected [a, b]");
    sf.sys.a = as_number(itv[0], "$.interval[0]");
    sf.sys.b = as_number(itv[1], "$.interval[1]");
    if (!(sf.sys.a < sf.sys.b)) throw ParseError("$.interval: endpoints must satisfy a < b");

    const json& jp = require(doc, "P", "$");
    if (!jp.is_array() || jp.size() != static_cast<std::size_t>(sf.sys.n) + 1)
        throw ParseError("$.P: expected " + std::to_string(sf.sys.n + 1) + " matrices");
    for (std::size_t k = 0; k < jp.size(); ++k) {
        const std::string kpath = "$.P[" + std::to_string(k) + "]";
        Mat Pk = as_matrix(jp[k], kpath);
        check_square(Pk, d, kpath);
        sf.sys.P.push_back(std::move(Pk));
    }

    sf.sys.ham = parse_hamiltonian(require(doc, "hamiltonian", "$"), d, sf.sys.a, sf.sys.b,
                                   "$.hamiltonian");

    try {
        validate_system(sf.sys);
    } catch (const Error& e) {
        throw ParseError(std::string("$: invalid system: ") + e.what());
    }

    const std::size_t nd = static_cast<std::size_t>(sf.sys.nd());
    sf.bc = parse_bc(require(doc, "bc", "$"), nd, doc, sf.lipschitz_claim, "$.bc");
    return sf;
}

SystemFile load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system_file(buf.str());
}

ReportFile make_report_file(VerificationReport rep, unsigned long long seed,
                            bool with_timestamp) {
    ReportFile rf;
    rf.report = std::move(rep);
    rf.seed = seed;
    if (with_timestamp) rf.timestamp = iso_timestamp();
    return rf;
}

std::string serialize_report(const ReportFile& rf) {
    ordered_json j;
    j["verdict"] = rf.report.pass ? "pass" : "fail";
    j["criterion"] = rf.report.criterion;
    ordered_json res = ordered_json::array();
    for (const auto& [name, value] : rf.report.residuals) {
        ordered_json r;
        r["name"] = name;
        r["value"] = value;
        res.push_back(std::move(r));
    }
    j["residuals"] = std::move(res);
    ordered_json wit = ordered_json::array();
    for (const Witness& w : rf.report.witnesses) {
        ordered_json jw;
        jw["label"] = w.label;
        jw["inputs"] = w.inputs;
        wit.push_back(std::move(jw));
    }
    j["witnesses"] = std::move(wit);
    j["tool_version"] = rf.version;
    j["seed"] = rf.seed;
    if (!rf.timestamp.empty()) j["timestamp"] = rf.timestamp;
    return j.dump(2) + "\n";
}

ReportFile parse_report(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("$: invalid JSON: ") + e.what());
    }
    ReportFile rf;
    const json& verdict = require(doc, "verdict", "$");
    if (!verdict.is_string() ||
        (verdict.get<std::string>() != "pass" && verdict.get<std::string>() != "fail"))
        throw ParseError("$.verdict: expected \"pass\" or \"fail\"");
    rf.report.pass = verdict.get<std::string>() == "pass";
    const json& crit = require(doc, "criterion", "$");
    if (!crit.is_string()) throw ParseError("$.criterion: expected a string");
    rf.report.criterion = crit.get<std::string>();

    const json& res = require(doc, "residuals", "$");
    if (!res.is_array()) throw ParseError("$.residuals: expected an array");
    for (std::size_t i = 0; i < res.size(); ++i) {
        const std::string rpath = "$.residuals[" + std::to_string(i) + "]";
        const json& name = require(res[i], "name", rpath);
        if (!name.is_string()) throw ParseError(rpath + ".name: expected a string");
        rf.report.add_residual(name.get<std::string>(),
                               as_number(require(res[i], "value", rpath), rpath + ".value"));
    }

    const json& wit = require(doc, "witnesses", "$");
    if (!wit.is_array()) throw ParseError("$.witnesses: expected an array");
    for (std::size_t i = 0; i < wit.size(); ++i) {
        const std::string wpath = "$.witnesses[" + std::to_string(i) + "]";
        Witness w;
        const json& label = require(wit[i], "label", wpath);
        if (!label.is_string()) throw ParseError(wpath + ".label: expected a string");
        w.label = label.get<std::string>();
        const json& inputs = require(wit[i], "inputs", wpath);
        if (!inputs.is_array()) throw ParseError(wpath + ".inputs: expected an array");
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            const json& vec = inputs[k];
            const std::string vpath = wpath + ".inputs[" + std::to_string(k) + "]";
            if (!vec.is_array()) throw ParseError(vpath + ": expected an array");
            std::vector<double> values;
            for (std::size_t m = 0; m < vec.size(); ++m)
                values.push_back(as_number(vec[m], vpath + "[" + std::to_string(m) + "]"));
            w.inputs.push_back(std::move(values));
        }
        rf.report.witnesses.push_back(std::move(w));
    }

    const json& ver = require(doc, "tool_version", "$");
    if (!ver.is_string()) throw ParseError("$.tool_version: expected a string");
    rf.version = ver.get<std::string>();
    const json& seed = require(doc, "seed", "$");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
        throw ParseError("$.seed: expected an integer");
    rf.seed = seed.get<unsigned long long>();
    if (doc.contains("timestamp")) {
        if (!doc["timestamp"].is_string()) throw ParseError("$.timestamp: expected a string");
        rf.timestamp = doc["timestamp"].get<std::string>();
    }
    return rf;
}

}  // namespace phbc

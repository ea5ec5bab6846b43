#pragma once

#include <string>

#include "phbc/bcspec.hpp"
#include "phbc/phs.hpp"

namespace phbc {

inline constexpr const char* tool_version = "1.0.0";

struct ParseError : Error {
    using Error::Error;
};

// Complete problem description loaded from a JSON document: the system, its
// boundary condition, and the claimed Lipschitz bound when the condition is
// given by a built-in nonlinear map.
struct SystemFile {
    PhsSystem sys;
    BoundaryCondition bc;
    double lipschitz_claim = 1.0;
};

// Parse errors carry the JSON path of the offending value.
SystemFile parse_system_file(const std::string& text);
SystemFile load_system_file(const std::string& path);

// Report document: the verification report plus run metadata. An empty
// timestamp is omitted from the serialized form.
struct ReportFile {
    VerificationReport report;
    unsigned long long seed = 0;
    std::string version = tool_version;
    std::string timestamp;
};

ReportFile make_report_file(VerificationReport rep, unsigned long long seed,
                            bool with_timestamp);

// Serialization round-trips losslessly: parse_report(serialize_report(r))
// reproduces every field, and re-serializing gives identical bytes.
std::string serialize_report(const ReportFile& rf);
ReportFile parse_report(const std::string& text);

}  // namespace phbc

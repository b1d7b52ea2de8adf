#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmpair/calculus.hpp"
#include "dmpair/gauss_green.hpp"
#include "dmpair/oracle.hpp"

namespace dmpair {

class ScenarioError : public Error {
public:
    using Error::Error;
};

/// One requested verification, as declared in a scenario file.
struct CheckConfig {
    std::string name;  // pairing | coarea | chain | leibniz | gaussgreen | oracle | cantor
    double tolerance = 1e-8;

    std::string field;       // A (2D field or 1D field name)
    std::string function;    // u
    std::string function2;   // v (leibniz)
    std::string polygon;     // E or Omega'
    std::string interface_name;  // Sigma
    std::vector<std::string> test_functions;
    // region name -> expected measure value (optional)
    std::vector<std::pair<std::string, std::optional<double>>> regions;
    std::vector<std::string> h_exprs;  // chain rule functions, in the variable x
    std::optional<std::pair<double, double>> interval;  // 1D evaluation interval
    std::optional<double> expect;                       // expected value for the interval
    double oracle_epsilon = 0.01;
    int cantor_depth = 20;
    int cantor_levels = 8;
};

/// A declarative scenario: geometry, fields, functions and requested
/// checks, loaded from a JSON file.
struct Scenario {
    std::string name;
    Window window;
    std::map<std::string, PolygonalPartition> partitions;
    std::map<std::string, PiecewiseVectorField> fields;
    std::map<std::string, BVFunc> functions;
    std::map<std::string, Polygon> polygons;
    std::map<std::string, OrientedInterface> interfaces;
    std::map<std::string, RegionSpec> regions;
    std::map<std::string, TestFunc> test_functions;
    std::map<std::string, PiecewiseExpr1D> fields_1d;
    std::map<std::string, BVFunc1D> functions_1d;
    std::vector<CheckConfig> checks;
};

/// Parse and validate a scenario file. Schema violations and geometry
/// failures carry the offending key in the message.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& name);

struct CheckItem {
    std::string label;
    double value = 0.0;
    std::optional<double> expected;
    double residual = 0.0;
    bool passed = true;
};

struct CheckResult {
    std::string check;
    double tolerance = 0.0;
    bool passed = true;
    std::vector<CheckItem> items;
    std::string error;  // nonempty when the check aborted
};

struct ReportBundle {
    std::string scenario;
    bool passed = true;
    std::vector<CheckResult> checks;
};

/// Execute the requested checks (all configured checks when the selection
/// is empty). Deterministic: two runs produce identical reports. Honors
/// the DMPAIR_THREADS environment variable for running independent checks
/// concurrently (report assembly stays ordered).
ReportBundle run_scenario(const Scenario& scenario, const std::vector<std::string>& selection = {},
                          std::optional<double> tolerance_override = std::nullopt,
                          bool with_oracle = false);

/// Machine-readable report with a stable key schema.
std::string report_to_json(const ReportBundle& report);

const std::vector<std::string>& known_checks();

}  // namespace dmpair

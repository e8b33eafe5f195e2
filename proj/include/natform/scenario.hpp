#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "natform/forms.hpp"
#include "natform/maps.hpp"
#include "natform/weakcalc.hpp"

namespace natform {

/// Configuration problem, with the 1-based line it was found on (0 when the
/// problem is not tied to a single line).
struct ConfigError : std::runtime_error {
    int line = 0;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

/// One "coeff_expr, basis_pattern" term of a form specification.
struct FormTermSpec {
    Poly coeff;                // polynomial in the target (or source) variables
    std::vector<int> pattern;  // strictly increasing 0-based axes
};

struct FormSpec {
    int degree = -1;
    std::vector<FormTermSpec> terms;
    std::string named;  // half_angle | angle | volume | auto (exclusive with terms)
};

struct MapSpec {
    std::string family;  // linear | polynomial | radial_power | winding | identity
    int dim = 0;         // radial_power / winding / identity source dim
    double s = 1.0;      // radial exponent
    std::vector<std::vector<double>> matrix_rows;  // linear
    std::vector<Poly> components;                  // polynomial
    int source_dim = 0;
};

struct BatterySpec {
    double radius = 0.0;  // 0 => default 0.15 * shortest side
    double amplitude = 1.0;
    bool site_center = true, site_singular = true, site_off = true;
    std::optional<Vec> off_override;
    std::vector<std::vector<int>> patterns;  // empty => all of the needed degree
};

struct SweepSpec {
    std::string param;  // s | k | p | q
    std::vector<double> values;
    std::optional<double> from, to;
    int steps = 0;
};

struct GridSpec {
    int resolution = 64;
    int levels = 3;
    double epsilon0 = 0.1;
    double tol = 1e-6;
    double sobolev_p = 0.0;   // 0 => default k+1
    double lambda_q = 0.0;    // 0 => default k/(k-1), requires k >= 2
    double mollify_eps0 = 0.0;  // 0 => 0.1 * diameter
    int mollify_levels = 4;
};

/// Parsed scenario file; nothing heavy is built yet.
struct ScenarioSpec {
    std::string id;
    Vec lower, upper;
    std::vector<Vec> extra_excluded;
    MapSpec map;
    FormSpec form;
    std::optional<Poly> decomposed_a;       // [form] a = ...
    std::optional<FormSpec> decomposed_gamma;  // [form] gamma = ...
    std::optional<Poly> leibniz_h;          // [form] h = ... (source variables)
    std::optional<FormSpec> leibniz_beta;   // [form] beta = ... (source variables)
    BatterySpec battery;
    GridSpec grid;
    std::optional<SweepSpec> sweep;
    std::vector<std::pair<std::string, std::string>> expectations;  // key -> expected verdict
};

/// Parses the flat key-value scenario format. Unknown sections or keys are
/// errors with line numbers, not warnings.
ScenarioSpec parse_scenario(const std::string& text, const std::string& id);
ScenarioSpec parse_scenario_file(const std::string& path);

/// Everything assembled and validated for one (possibly sweep-overridden)
/// run point.
struct BuiltScenario {
    BuiltScenario(Domain d, MapModel m) : domain(std::move(d)), map(std::move(m)) {}

    Domain domain;
    MapModel map;
    FormField alpha;  // on the target space, degree k
    int k = 0;
    std::vector<std::pair<std::string, Vec>> battery_sites;  // deduplicated, in battery order
    double battery_radius = 0.0;
    double battery_amplitude = 1.0;
    std::vector<std::vector<int>> battery_patterns;  // empty => all of the needed degree
    std::optional<FormField> decomposed_a;
    std::optional<FormField> decomposed_gamma;
    std::optional<FormField> leibniz_h;
    std::optional<FormField> leibniz_beta;
    GridSchedule sched;
    double tol = 1e-6;
    double sobolev_p = 2.0;
    double lambda_q = 0.0;  // 0 when not applicable
    double mollify_eps0 = 0.0;
    int mollify_levels = 4;
};

/// Materializes the scenario's bump battery at a given form degree, on an
/// alternative domain if requested (tau runs on the shrunken box). Throws
/// ConfigError when the degree is out of range or the battery is empty.
std::vector<BatteryEntry> make_battery(const BuiltScenario& built, int degree,
                                       const Domain* domain_override = nullptr);

struct SweepOverride {
    std::string param;
    double value = 0.0;
};

/// Builds (and validates) the runnable scenario, optionally with one sweep
/// parameter overridden. Throws ConfigError on any inconsistency.
BuiltScenario build_scenario(const ScenarioSpec& spec,
                             const std::optional<SweepOverride>& over = std::nullopt);

/// Builds a FormField over `ambient` variables from a spec (used for alpha,
/// gamma, beta). Analytic derivative attached.
FormField build_form(const FormSpec& spec, int ambient, int auto_degree = -1);

/// Parses a polynomial in variables named x1..xm or y1..yn (prefix given).
Poly parse_poly(const std::string& expr, int nvars, char var_prefix, int line_for_errors);

}  // namespace natform

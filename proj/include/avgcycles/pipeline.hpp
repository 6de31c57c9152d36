#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avgcycles/averaging.hpp"
#include "avgcycles/blowup.hpp"
#include "avgcycles/flowsim.hpp"
#include "avgcycles/poly.hpp"
#include "avgcycles/roots.hpp"

namespace avgcycles {

/// Shortest decimal that parses back to the same double.
std::string format_number(double v);

std::string coefficients_csv(const CoefficientTable& table);     // i,j,value,err
std::string averaged_csv(const AveragedPolynomial& poly);        // n,coefficient
std::string roots_csv(const RootReport& report);                 // z_star,h_deriv,simple
std::string flow_factor_csv(const FlowFactor& ff);               // theta,w,value
std::string orbit_csv(const std::vector<OrbitSample>& samples);  // t,x,y
std::string step_log_csv(const std::vector<StepRecord>& steps);  // theta0,theta1
std::string cycle_report_json(const CycleReport& report);

struct RunManifest {
    std::string config_path;
    std::string subcommand;
    std::vector<std::pair<std::string, double>> tolerances;
    std::vector<std::pair<std::string, double>> timings_s;
    std::vector<std::string> outputs;
    std::string version = AVGCYCLES_VERSION;

    std::string to_json() const;
};

/// The two worked examples: center (1, 1, -1/4, 3) switched along x=0
/// (seven cycles) and along y=0 (three cycles).
enum class Example { Thm11, Thm12 };

std::string_view to_string(Example which) noexcept;
Example parse_example(std::string_view name);

/// Perturbation term whose contribution to h is forced to `target`.
struct TargetTerm {
    Component comp;
    Side side;
    int i, j;
    double target;
};

/// Problem document with an empty perturbation.
std::string example_template(Example which);
std::vector<TargetTerm> example_targets(Example which);

/// Expected coefficients of h (exponent -> value) and its positive roots.
std::vector<std::pair<int, double>> example_expected_h(Example which);
std::vector<double> example_expected_roots(Example which);

struct SolvedTerm {
    TargetTerm term;
    PerturbationWeight weight;
    double value;  // target / weight
};

/// Chooses each perturbation coefficient as target / (its integral weight)
/// so that h has exactly the target coefficients.
std::vector<SolvedTerm> solve_targets(Problem& problem, const FlowFactor& ff, const std::vector<TargetTerm>& targets,
                                      double tol);

/// Even-i basis integrals over both half periods (y=0 line only):
/// (i, j, basis, side, value, err).
struct SymmetryAuditEntry {
    int i, j;
    Basis basis;
    Side side;
    double value, err;
};
std::vector<SymmetryAuditEntry> symmetry_audit(const FlowFactor& ff, double tol);

struct ReproduceOptions {
    double tol = 1e-9;
    std::optional<double> z_max;
    bool skip_verify = false;
    SymmetryMode symmetry = SymmetryMode::Check;
    VerificationConfig verify;
};

struct ReproduceResult {
    Example which;
    Problem problem;
    FlowFactor ff;
    std::vector<SolvedTerm> solved;
    CoefficientTable table;
    AveragedPolynomial h;
    RootReport roots;
    std::vector<SymmetryAuditEntry> audit;  // Thm12 only
    std::optional<CycleReport> cycles;
    std::vector<std::pair<std::string, double>> timings_s;
};

ReproduceResult reproduce(Example which, const ReproduceOptions& opt = {});

struct CriterionResult {
    std::string name;
    bool passed;
    std::string detail;
};

/// Pass/fail table for a reproduce run: coefficients, roots, sign-variation
/// bound, symmetry audit, verified cycles.
std::vector<CriterionResult> evaluate_reproduction(const ReproduceResult& result);

}  // namespace avgcycles

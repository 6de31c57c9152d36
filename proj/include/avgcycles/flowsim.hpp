#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "avgcycles/blowup.hpp"
#include "avgcycles/poly.hpp"
#include "avgcycles/roots.hpp"

namespace avgcycles {

/// dr/dtheta = F0 + eps F1 with the branch chosen by the sign of cos (x=0)
/// or sin (y=0); the switching set itself belongs to the plus branch.
double rhs_transformed(const Problem& problem, double theta, double r, double eps);

/// Same equation on a fixed side.
double rhs_transformed(const Problem& problem, Side side, double theta, double r, double eps);

/// Untruncated orbit equation of the perturbed system in (theta, r):
/// r (r^3 f + eps (r cos p + sin q)) / (r^3 g + eps (cos q - 2 r sin p)).
double rhs_exact_polar(const Problem& problem, Side side, double theta, double r, double eps);

enum class RhsForm { FirstOrder, Exact };

struct StepRecord {
    double theta0, theta1;
};

struct PeriodOptions {
    double tol = 1e-11;
    RhsForm form = RhsForm::FirstOrder;
    bool log_steps = false;
};

struct PeriodResult {
    double r_end = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::vector<StepRecord> step_log;
};

/// r(alpha + 2pi) from r(alpha) = z. Steps are split at alpha + pi so no
/// step straddles a switching angle. Throws RadiusCollapse if r reaches 0.
PeriodResult integrate_period_detailed(const Problem& problem, const FlowFactor& ff, double z, double eps,
                                       const PeriodOptions& opt = {});

double integrate_period(const Problem& problem, const FlowFactor& ff, double z, double eps, double tol = 1e-11);

/// r(alpha + 2pi; z, eps) - z.
double displacement(const Problem& problem, const FlowFactor& ff, double z, double eps, double tol = 1e-11);

struct VerificationConfig {
    std::vector<double> epsilons{1e-3, 1e-4};
    double integrator_tol = 1e-11;
    double bisection_tol = 1e-10;
    double capture_window = 50.0;  // multiples of eps

    void validate() const;
};

struct FixedPoint {
    double epsilon = 0.0;
    std::optional<double> z_hat;  // empty when UNVERIFIED
    double residual = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double disp_lo = 0.0, disp_hi = 0.0;  // NaN when the integration failed
    std::string note;                     // why the point is UNVERIFIED
    bool verified() const noexcept { return z_hat.has_value(); }
};

struct CycleRecord {
    double z_star = 0.0;
    bool simple = true;
    std::vector<FixedPoint> per_epsilon;
    /// |z_hat(eps_2) - z*| / |z_hat(eps_1) - z*| for the first two epsilons.
    std::optional<double> convergence_ratio;
    bool verified() const noexcept;
};

struct CycleReport {
    std::vector<CycleRecord> records;
    int count_verified = 0;  // records verified at every epsilon

    int count_verified_at(double epsilon) const;
};

/// Brackets the displacement on [z* - w, z* + w], w = capture_window * eps,
/// for every predicted simple root and every eps, and bisects to bisection_tol.
CycleReport find_fixed_points(const Problem& problem, const FlowFactor& ff, const RootReport& predicted,
                              const VerificationConfig& cfg = {});

struct OrbitSample {
    double t, x, y;
};

/// Trajectory of the perturbed planar system from (x0, y0). Integrates
/// backwards when t_max < 0. Crossings of the switching line are located on
/// the dense output and the branch is switched exactly there.
std::vector<OrbitSample> cartesian_orbit(const Problem& problem, double x0, double y0, double eps, double t_max,
                                         double tol = 1e-11);

/// Radius at which the planar trajectory started at angle alpha with radius z
/// first returns to the ray theta = alpha, integrating in the time direction
/// in which theta increases. Independent of the (theta, r) formulation.
double cartesian_return_radius(const Problem& problem, double z, double eps, double tol = 1e-11);

}  // namespace avgcycles

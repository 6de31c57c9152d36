#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "avgcycles/poly.hpp"

namespace avgcycles {

// Trigonometric pieces of the unperturbed field after x = r cos t, y = r^2 sin t.
double eval_M(const CenterParams& p, double theta) noexcept;  // a cos^2 + b sin
double eval_N(const CenterParams& p, double theta) noexcept;  // c cos^3 + d cos sin
double eval_f(const CenterParams& p, double theta) noexcept;  // cos M + sin N
double eval_g(const CenterParams& p, double theta) noexcept;  // cos N - 2 sin M

struct GMinimum {
    double min_abs_g;
    double theta;
};

/// Minimum of |g| over one period: uniform sampling followed by
/// golden-section refinement around the five smallest samples.
/// Throws GNearZero if the minimum falls below `floor`.
GMinimum check_g_nonvanishing(const CenterParams& params, std::size_t n_samples = 4096,
                              double floor = 1e-8);

/// Perturbation part of dr/dtheta on one side of the switching line:
/// (1 + sin^2)/(r^3 g^2) [r^2 N p(r cos, r^2 sin) - r M q(r cos, r^2 sin)].
double first_order_term(const Problem& problem, Side side, double theta, double r);

/// Inverse of x = r cos t, y = r^2 sin t for (x, y) != 0; theta in (-pi, pi].
struct WeightedPolar {
    double r;
    double theta;
};
WeightedPolar to_weighted_polar(double x, double y);

struct Checkpoint {
    double theta;
    double w;
};

/// exp(w(theta)) with w(theta) = integral of f/g from the base angle, stored
/// as piecewise Chebyshev expansions of the antiderivative. Immutable.
class FlowFactor {
public:
    double base_angle() const noexcept { return alpha_; }
    double domain_lo() const noexcept { return lo_; }
    double domain_hi() const noexcept { return hi_; }
    /// Bound on |w_computed - w| over the whole domain.
    double err_bound() const noexcept { return err_bound_; }
    const CenterParams& params() const noexcept { return params_; }

    double log_value(double theta) const;
    double value(double theta) const;

    /// Panel boundaries with their w; includes every multiple of pi/2 from
    /// the base angle, hence all switching angles.
    const std::vector<Checkpoint>& checkpoints() const noexcept { return checkpoints_; }
    std::size_t panel_count() const noexcept { return panels_.size(); }

    static constexpr int kDegree = 32;

private:
    struct Panel {
        double a, b;
        double w_left;
        std::vector<double> coeffs;  // antiderivative in T_k((2t-a-b)/(b-a)), zero at a
    };

    FlowFactor(const CenterParams& params, double alpha) : params_(params), alpha_(alpha) {}
    const Panel& locate(double theta) const;

    CenterParams params_;
    double alpha_;
    double lo_ = 0.0, hi_ = 0.0;
    double err_bound_ = 0.0;
    std::vector<Panel> panels_;
    std::vector<Checkpoint> checkpoints_;

    friend FlowFactor build_flow_factor(const CenterParams&, double, double);
};

/// Builds the flow factor on [alpha - pi, alpha + 3pi] with mandatory panel
/// breaks at alpha + k pi/2. Runs check_g_nonvanishing first.
FlowFactor build_flow_factor(const CenterParams& params, double alpha, double tol = 1e-12);

double flow_factor_value(const FlowFactor& ff, double theta);

}  // namespace avgcycles

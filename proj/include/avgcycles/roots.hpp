#pragma once

#include <optional>
#include <vector>

#include "avgcycles/averaging.hpp"

namespace avgcycles {

struct RootInfo {
    double z_star;
    double lo, hi;  // final bracket, h(lo) * h(hi) < 0
    double h_deriv;
    bool simple;
};

struct RootReport {
    std::vector<RootInfo> roots;  // strictly increasing z_star
    /// Local minima of |h| below the simplicity floor with no sign change (possible even-multiplicity roots).
    std::vector<double> suspected_multiple;
    int descartes_bound = 0;
    double z_min = 0.0, z_max = 0.0;
    double tolerance = 0.0;
    /// Fewer simple roots than the sign-variation bound is normal; flagged for the reader.
    bool bound_attained() const noexcept { return int(roots.size()) == descartes_bound; }
    std::vector<double> simple_roots() const;
};

/// Sign variations of the nonzero coefficients in ascending exponent order.
int descartes_bound(const AveragedPolynomial& poly);

/// 1 + max |c_n| / |c_lead| over the non-leading coefficients.
double cauchy_bound(const AveragedPolynomial& poly);

/// Positive roots on (tol, z_max]: sign changes on 512 uniform + 512
/// log-spaced samples, each bracket bisected to width tol. z_max defaults
/// to the Cauchy bound.
RootReport isolate_positive_roots(const AveragedPolynomial& poly, std::optional<double> z_max = std::nullopt,
                                  double tol = 1e-12, double simplicity_floor = 1e-8);

/// z (z - 1) ... (z - (r - 1)), exponents 1..r: r - 1 positive simple roots
/// and exactly r - 1 sign variations.
AveragedPolynomial max_positive_roots_witness(int r);

}  // namespace avgcycles

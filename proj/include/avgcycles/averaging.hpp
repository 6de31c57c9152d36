#pragma once

#include <map>
#include <optional>
#include <vector>

#include "avgcycles/blowup.hpp"
#include "avgcycles/poly.hpp"
#include "avgcycles/quadrature.hpp"

namespace avgcycles {

/// phi_{i,j}(t) = (1 + sin^2) N cos^i sin^{j-1} ff^{i+2j-4} / g^2, j >= 1.
double integrand_phi(const FlowFactor& ff, int i, int j, double theta);

/// psi_{i,j}(t) = (1 + sin^2) M cos^{i-1} sin^j ff^{i+2j-4} / g^2, i >= 1.
double integrand_psi(const FlowFactor& ff, int i, int j, double theta);

/// Half-period ranges [alpha, alpha + pi] (plus side) and
/// [alpha + pi, alpha + 2pi] (minus side).
struct HalfPeriod {
    double lo, hi;
};
HalfPeriod half_period(SwitchingLine line, Side side) noexcept;

/// Integral with an error estimate that includes propagated flow factor error.
struct Integral {
    double value = 0.0;
    double err = 0.0;
    double abs_value = 0.0;
};

enum class Basis { Phi, Psi };

/// One basis integral over one half period.
Integral integrate_basis(const FlowFactor& ff, SwitchingLine line, Basis basis, Side side, int i, int j,
                         double tol);

struct CoefficientValue {
    double value = 0.0;
    double err = 0.0;
};

/// k_{i,j} (or l_{i,j}): a^+_{i,j-1} int_+ phi - b^+_{i-1,j} int_+ psi + (same on the minus side).
/// Integrals whose perturbation coefficient is zero are skipped.
CoefficientValue compute_coefficient(const Problem& problem, const FlowFactor& ff, int i, int j,
                                     double tol = 1e-9);

/// Whether even-i entries for y=0 are computed and audited against the
/// cancellation identity, or skipped.
enum class SymmetryMode { Check, Skip };

struct CoefficientTable {
    SwitchingLine line;
    std::map<Monomial, CoefficientValue> entries;  // keys with 1 <= i+j <= 4
};

/// All k_{i,j}; entries are computed in parallel (see parallel.hpp).
CoefficientTable compute_coefficient_table(const Problem& problem, const FlowFactor& ff, double tol = 1e-9,
                                           SymmetryMode mode = SymmetryMode::Check);

/// h(z) = z^3 h_1(z) as a sparse polynomial in z with exponents 1..8.
class AveragedPolynomial {
public:
    AveragedPolynomial() = default;
    explicit AveragedPolynomial(std::map<int, double> coeffs,
                                std::map<int, std::vector<Monomial>> provenance = {});

    const std::map<int, double>& coeffs() const noexcept { return coeffs_; }
    /// Exponent n -> contributing (i, j) with i + 2j = n.
    const std::map<int, std::vector<Monomial>>& provenance() const noexcept { return provenance_; }

    double coeff(int n) const;
    double operator()(double z) const;
    double derivative(double z) const;
    bool is_zero() const noexcept { return coeffs_.empty(); }
    /// max_n |c_n| z^n, the natural size of h near z.
    double scale_at(double z) const;

private:
    std::map<int, double> coeffs_;  // nonzero entries only
    std::map<int, std::vector<Monomial>> provenance_;
};

/// Groups k_{i,j} by n = i + 2j. For y=0 tables, even-n groups must vanish
/// within 10x their error estimate (else SymmetryViolation) and are dropped.
AveragedPolynomial assemble_h(const CoefficientTable& table);

/// h_1(z) by direct quadrature of F_1(s, ff(s) z) / ff(s) over one period.
double h1_direct(const Problem& problem, const FlowFactor& ff, double z, double tol = 1e-9);

/// Which perturbation polynomial a coefficient lives in.
enum class Component { P, Q };

/// Contribution of a single perturbation coefficient (i, j) of p or q on one
/// side to h(z): h gains weight * coeff * z^exponent.
struct PerturbationWeight {
    int exponent;
    double weight;
    double err;
};
PerturbationWeight perturbation_weight(const FlowFactor& ff, SwitchingLine line, Component comp, Side side,
                                       int i, int j, double tol = 1e-9);

/// Default quadrature settings used for the averaging integrals.
quad::Options averaging_quad_options(double tol);

}  // namespace avgcycles

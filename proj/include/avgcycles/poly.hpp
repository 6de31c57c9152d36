#pragma once

#include <array>
#include <compare>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>

namespace avgcycles {

/// Exponent pair (i, j) of the monomial x^i y^j.
struct Monomial {
    int i = 0;
    int j = 0;
    auto operator<=>(const Monomial&) const = default;
};

struct Term {
    int i;
    int j;
    double coeff;
};

/// Sparse bivariate polynomial of total degree <= 3. Zero coefficients are
/// never stored, so two polynomials compare equal iff their term maps do.
class BivarPoly {
public:
    static constexpr int kMaxDegree = 3;

    BivarPoly() = default;
    BivarPoly(std::initializer_list<Term> terms);
    explicit BivarPoly(const std::map<Monomial, double>& terms);

    double coeff(int i, int j) const;
    double operator()(double x, double y) const;

    const std::map<Monomial, double>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    BivarPoly with_term(int i, int j, double coeff) const;
    BivarPoly scaled(double factor) const;

    friend BivarPoly operator+(const BivarPoly& lhs, const BivarPoly& rhs);
    friend bool operator==(const BivarPoly&, const BivarPoly&) = default;

private:
    void insert(int i, int j, double coeff);

    std::map<Monomial, double> terms_;
};

double eval_bipoly(const BivarPoly& p, double x, double y);

/// Coefficients of dx/dt = a x^2 + b y, dy/dt = c x^3 + d x y, checked to
/// have a center at the origin. Only constructible through validate_center.
class CenterParams {
public:
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double c() const noexcept { return c_; }
    double d() const noexcept { return d_; }
    /// (d - 2a)^2 + 8bc, strictly negative.
    double discriminant() const noexcept { return discriminant_; }

    friend CenterParams validate_center(double a, double b, double c, double d);
    friend bool operator==(const CenterParams&, const CenterParams&) = default;

private:
    CenterParams(double a, double b, double c, double d, double disc)
        : a_(a), b_(b), c_(c), d_(d), discriminant_(disc) {}

    double a_, b_, c_, d_, discriminant_;
};

CenterParams validate_center(double a, double b, double c, double d);

enum class SwitchingLine { VerticalX0, HorizontalY0 };

/// Which closed/open half-plane of the switching line a point belongs to.
/// Plus is the closed half (x >= 0 or y >= 0).
enum class Side { Plus, Minus };

/// Polar angle at which the return map starts: -pi/2 for x=0, 0 for y=0.
double base_angle(SwitchingLine line) noexcept;

/// {alpha, alpha + pi, alpha + 2pi}.
std::array<double, 3> split_angles(SwitchingLine line) noexcept;

Side side_at_angle(SwitchingLine line, double theta) noexcept;
Side side_at_point(SwitchingLine line, double x, double y) noexcept;

std::string_view to_string(SwitchingLine line) noexcept;
std::string_view to_string(Side side) noexcept;

struct Problem {
    CenterParams params;
    SwitchingLine line;
    BivarPoly p_plus;
    BivarPoly p_minus;
    BivarPoly q_plus;
    BivarPoly q_minus;

    const BivarPoly& p(Side side) const noexcept { return side == Side::Plus ? p_plus : p_minus; }
    const BivarPoly& q(Side side) const noexcept { return side == Side::Plus ? q_plus : q_minus; }
};

/// Parses the JSON problem document. Coefficients may be numbers or strings
/// holding a decimal or a rational "n/d" (rounded to nearest on division).
Problem parse_problem(std::string_view config_text);

/// Inverse of parse_problem; coefficients are written as shortest
/// round-trip decimals so parse(serialize(p)) reproduces every term exactly.
std::string serialize_problem(const Problem& problem);

/// Reads a coefficient literal: "-0.25", "-1/4", "5040/15489718.2".
double parse_coefficient_literal(std::string_view text);

}  // namespace avgcycles

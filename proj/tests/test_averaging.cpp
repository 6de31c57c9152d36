#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "avgcycles/averaging.hpp"
#include "avgcycles/error.hpp"
#include "oracles.hpp"

using namespace avgcycles;
using std::numbers::pi;

namespace {

const CenterParams& example()
{
    static const auto p = validate_center(1, 1, -0.25, 3);
    return p;
}

const FlowFactor& ff_x()
{
    static const auto ff = build_flow_factor(example(), -pi / 2);
    return ff;
}

const FlowFactor& ff_y()
{
    static const auto ff = build_flow_factor(example(), 0.0);
    return ff;
}

Problem empty_problem(SwitchingLine line) { return Problem{example(), line, {}, {}, {}, {}}; }

// Basis integrands written out with the closed-form flow factor.
double phi_closed(bool x_line, int i, int j, double t)
{
    const auto& P = oracle::kExample;
    const double u = x_line ? oracle::u_closed(t) : oracle::v_closed(t);
    const double s = std::sin(t), c = std::cos(t), G = oracle::g(P, t);
    return (1 + s * s) * oracle::N(P, t) * std::pow(c, i) * std::pow(s, j - 1) * std::pow(u, i + 2 * j - 4) / (G * G);
}

double psi_closed(bool x_line, int i, int j, double t)
{
    const auto& P = oracle::kExample;
    const double u = x_line ? oracle::u_closed(t) : oracle::v_closed(t);
    const double s = std::sin(t), c = std::cos(t), G = oracle::g(P, t);
    return (1 + s * s) * oracle::M(P, t) * std::pow(c, i - 1) * std::pow(s, j) * std::pow(u, i + 2 * j - 4) / (G * G);
}

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an avgcycles::Error");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("integrand point values")
{
    CHECK(integrand_phi(ff_x(), 2, 1, 0.0) == doctest::Approx(-4.0).epsilon(1e-14));
    for (int j = 2; j <= 4; ++j) CHECK(integrand_phi(ff_x(), 0, j, 0.0) == 0.0);
    const double u0 = oracle::u_closed(0.0);
    CHECK(integrand_psi(ff_x(), 1, 0, 0.0) == doctest::Approx(16.0 / (u0 * u0 * u0)).epsilon(1e-11));
    for (int j = 1; j <= 3; ++j) CHECK(integrand_psi(ff_x(), 1, j, 0.0) == 0.0);
}

TEST_CASE("integrand index checks")
{
    CHECK(kind_of([] { integrand_phi(ff_x(), 1, 0, 0.1); }) == ErrorKind::IndexOutOfRange);
    CHECK(kind_of([] { integrand_psi(ff_x(), 0, 1, 0.1); }) == ErrorKind::IndexOutOfRange);
    CHECK(kind_of([] { integrand_phi(ff_x(), 3, 2, 0.1); }) == ErrorKind::IndexOutOfRange);
    CHECK(kind_of([] { compute_coefficient(empty_problem(SwitchingLine::VerticalX0), ff_x(), 0, 0); }) ==
          ErrorKind::IndexOutOfRange);
}

TEST_CASE("even-i integrands are odd about pi/2 on the y=0 line")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ang(0, pi);
    for (int k = 0; k < 20; ++k) {
        const double t = ang(rng);
        const double a = integrand_phi(ff_y(), 0, 2, t), b = integrand_phi(ff_y(), 0, 2, pi - t);
        CHECK(std::abs(a + b) <= 1e-9 * std::max(1.0, std::abs(a)));
        const double c = integrand_psi(ff_y(), 2, 1, t), d = integrand_psi(ff_y(), 2, 1, pi - t);
        CHECK(std::abs(c + d) <= 1e-9 * std::max(1.0, std::abs(c)));
    }
}

TEST_CASE("integrands are 2pi periodic")
{
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> ang(-pi, pi / 2);
    for (int k = 0; k < 50; ++k) {
        const double s = ang(rng);
        const double a = integrand_phi(ff_y(), 1, 2, s), b = integrand_phi(ff_y(), 1, 2, s + 2 * pi);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("integrands agree with the closed-form flow factor")
{
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> ang(-pi / 2, 3 * pi / 2);
    for (int k = 0; k < 30; ++k) {
        const double t = ang(rng);
        CHECK(integrand_phi(ff_x(), 1, 2, t) == doctest::Approx(phi_closed(true, 1, 2, t)).epsilon(1e-10));
        CHECK(integrand_psi(ff_y(), 3, 0, t) == doctest::Approx(psi_closed(false, 3, 0, t)).epsilon(1e-10));
    }
}

TEST_CASE("x=0 line: single-coefficient weights against Simpson on the closed form")
{
    // weight of each coefficient = its basis integral over [-pi/2, pi/2].
    struct Case {
        Component comp;
        int i, j;
    } cases[] = {{Component::Q, 0, 0}, {Component::P, 0, 0}, {Component::P, 1, 0}, {Component::P, 2, 0},
                 {Component::P, 3, 0}, {Component::P, 2, 1}, {Component::P, 1, 2}, {Component::P, 0, 3}};
    for (const auto& c : cases) {
        const auto w = perturbation_weight(ff_x(), SwitchingLine::VerticalX0, c.comp, Side::Plus, c.i, c.j);
        const double ref =
            c.comp == Component::P
                ? oracle::simpson([&](double t) { return phi_closed(true, c.i, c.j + 1, t); }, -pi / 2, pi / 2, 400'000)
                : -oracle::simpson([&](double t) { return psi_closed(true, c.i + 1, c.j, t); }, -pi / 2, pi / 2,
                                   400'000);
        CHECK(w.weight == doctest::Approx(ref).epsilon(1e-9));
        CHECK(w.exponent == (c.comp == Component::P ? c.i + 2 * c.j + 2 : c.i + 1 + 2 * c.j));
    }
}

TEST_CASE("x=0 line: frozen weights")
{
    // Values from an independent adaptive quadrature of the closed form
    // (scipy.integrate.quad, limit 500), to the digits shown.
    auto w = [](Component comp, int i, int j) {
        return perturbation_weight(ff_x(), SwitchingLine::VerticalX0, comp, Side::Plus, i, j).weight;
    };
    CHECK(w(Component::Q, 0, 0) == doctest::Approx(-7334350428.95).epsilon(1e-11));
    CHECK(w(Component::P, 0, 0) == doctest::Approx(4338677.884).epsilon(1e-9));
    CHECK(w(Component::P, 1, 0) == doctest::Approx(3608.1495).epsilon(1e-7));
    CHECK(w(Component::P, 2, 0) == doctest::Approx(4 * pi).epsilon(1e-12));
    CHECK(w(Component::P, 3, 0) == doctest::Approx(-0.5115).epsilon(1e-3));
    CHECK(w(Component::P, 2, 1) == doctest::Approx(0.20814).epsilon(1e-4));
    CHECK(w(Component::P, 1, 2) == doctest::Approx(-0.14722).epsilon(1e-4));
    CHECK(w(Component::P, 0, 3) == doctest::Approx(0.21054).epsilon(1e-4));
}

TEST_CASE("y=0 line: weights against Simpson on the closed form")
{
    const auto d00 = perturbation_weight(ff_y(), SwitchingLine::HorizontalY0, Component::Q, Side::Plus, 0, 0);
    CHECK(d00.weight ==
          doctest::Approx(-oracle::simpson([](double t) { return psi_closed(false, 1, 0, t); }, 0, pi, 400'000))
              .epsilon(1e-9));
    CHECK(d00.weight == doctest::Approx(-192976077.6).epsilon(1e-9));
    for (int j = 0; j <= 2; ++j) {
        const auto c = perturbation_weight(ff_y(), SwitchingLine::HorizontalY0, Component::P, Side::Plus, 1, j);
        const double ref = oracle::simpson([&](double t) { return phi_closed(false, 1, j + 1, t); }, 0, pi, 400'000);
        CHECK(c.weight == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("minus-side weights integrate over the second half period")
{
    const auto w = perturbation_weight(ff_x(), SwitchingLine::VerticalX0, Component::P, Side::Minus, 1, 1);
    const double ref = oracle::simpson([](double t) { return phi_closed(true, 1, 2, t); }, pi / 2, 3 * pi / 2, 400'000);
    CHECK(w.weight == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("one adaptive call equals the sum over a split at alpha + pi/2")
{
    for (int total = 1; total <= 4; ++total)
        for (int i = 0; i <= total; ++i) {
            const int j = total - i;
            if (j < 1) continue;
            auto f = [&](double t) { return integrand_phi(ff_x(), i, j, t); };
            const auto opt = averaging_quad_options(1e-9);
            const auto whole = quad::integrate(f, -pi / 2, pi / 2, {}, opt);
            const auto a = quad::integrate(f, -pi / 2, 0.0, {}, opt), b = quad::integrate(f, 0.0, pi / 2, {}, opt);
            const double tol = std::max(1e-9, 1e-13 * whole.abs_value);
            CHECK(std::abs(whole.value - (a.value + b.value)) <= 2 * tol + whole.err + a.err + b.err);
        }
}

TEST_CASE("coefficients: a20 gives 4 pi, linearity, skipped integrals")
{
    auto pr = empty_problem(SwitchingLine::VerticalX0);
    pr.p_plus = BivarPoly{{2, 0, 1.0}};
    const auto k = compute_coefficient(pr, ff_x(), 2, 1);
    CHECK(k.value == doctest::Approx(4 * pi).epsilon(1e-12));
    CHECK(k.err >= 0.0);

    pr.p_plus = BivarPoly{{2, 0, 2.0}};
    CHECK(compute_coefficient(pr, ff_x(), 2, 1).value == 2 * k.value);

    const auto none = compute_coefficient(pr, ff_x(), 1, 1);
    CHECK(none.value == 0.0);
    CHECK(none.err == 0.0);
}

TEST_CASE("zero perturbation gives a zero polynomial")
{
    for (auto line : {SwitchingLine::VerticalX0, SwitchingLine::HorizontalY0}) {
        const auto pr = empty_problem(line);
        const auto& ff = line == SwitchingLine::VerticalX0 ? ff_x() : ff_y();
        const auto table = compute_coefficient_table(pr, ff);
        CHECK(table.entries.size() == 14);
        CHECK(assemble_h(table).is_zero());
        CHECK(h1_direct(pr, ff, 1.3) == 0.0);
    }
}

TEST_CASE("assemble_h groups by i + 2j")
{
    CoefficientTable t{SwitchingLine::VerticalX0, {}};
    t.entries[{0, 1}] = {2.0, 0.0};
    t.entries[{2, 0}] = {3.0, 0.0};
    t.entries[{1, 0}] = {-1.0, 0.0};
    t.entries[{0, 4}] = {0.5, 0.0};
    const auto h = assemble_h(t);
    CHECK(h.coeff(1) == -1.0);
    CHECK(h.coeff(2) == 5.0);
    CHECK(h.coeff(8) == 0.5);
    CHECK(h.provenance().at(2).size() == 2);
    CHECK(h(2.0) == doctest::Approx(-2 + 20 + 128));
    CHECK(h.derivative(2.0) == doctest::Approx(-1 + 20 + 8 * 0.5 * 128));
}

TEST_CASE("y=0 tables: even exponents must cancel")
{
    CoefficientTable t{SwitchingLine::HorizontalY0, {}};
    t.entries[{1, 0}] = {1.0, 1e-12};
    t.entries[{0, 1}] = {1e-13, 1e-12};
    const auto h = assemble_h(t);
    CHECK(h.coeff(2) == 0.0);
    CHECK(h.coeffs().size() == 1);
    t.entries[{0, 1}] = {1e-6, 1e-12};
    CHECK(kind_of([&] { assemble_h(t); }) == ErrorKind::SymmetryViolation);
}

TEST_CASE("y=0 line: random full perturbation passes the symmetry check")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1, 1);
    auto pr = empty_problem(SwitchingLine::HorizontalY0);
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j) {
            pr.p_plus = pr.p_plus.with_term(i, j, u(rng));
            pr.p_minus = pr.p_minus.with_term(i, j, u(rng));
            pr.q_plus = pr.q_plus.with_term(i, j, u(rng) * 1e-4);
            pr.q_minus = pr.q_minus.with_term(i, j, u(rng) * 1e-4);
        }
    const auto table = compute_coefficient_table(pr, ff_y(), 1e-9, SymmetryMode::Check);
    const auto h = assemble_h(table);
    for (const auto& [n, c] : h.coeffs()) CHECK(n % 2 == 1);

    const auto fast = compute_coefficient_table(pr, ff_y(), 1e-9, SymmetryMode::Skip);
    CHECK(fast.entries.at({0, 2}).value == 0.0);
    const auto hf = assemble_h(fast);
    for (const auto& [n, c] : h.coeffs()) CHECK(hf.coeff(n) == c);
}

TEST_CASE("direct h1 matches the assembled polynomial")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1, 1), zs(0.05, 8.0);
    for (auto line : {SwitchingLine::VerticalX0, SwitchingLine::HorizontalY0}) {
        const auto& ff = line == SwitchingLine::VerticalX0 ? ff_x() : ff_y();
        auto pr = empty_problem(line);
        for (int i = 0; i <= 3; ++i)
            for (int j = 0; i + j <= 3; ++j) {
                pr.p_plus = pr.p_plus.with_term(i, j, u(rng));
                pr.q_minus = pr.q_minus.with_term(i, j, u(rng));
            }
        const auto h = assemble_h(compute_coefficient_table(pr, ff));
        for (int k = 0; k < 10; ++k) {
            const double z = zs(rng);
            const double direct = z * z * z * h1_direct(pr, ff, z, 1e-12);
            CHECK(direct == doctest::Approx(h(z)).epsilon(1e-8).scale(h.scale_at(z)));
        }
    }
    CHECK_THROWS_AS(h1_direct(empty_problem(SwitchingLine::VerticalX0), ff_x(), 0.0), Error);
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "avgcycles/error.hpp"
#include "avgcycles/ode.hpp"
#include "avgcycles/parallel.hpp"
#include "avgcycles/quadrature.hpp"

using namespace avgcycles;
using std::numbers::pi;

TEST_CASE("Gauss-Kronrod panel is exact for degree <= 31")
{
    const auto e = quad::gauss_kronrod21([](double x) { return std::pow(x, 30) - 3 * x * x; }, -1.0, 1.0);
    CHECK(e.value == doctest::Approx(2.0 / 31 - 2.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature on smooth and peaked integrands")
{
    const auto a = quad::integrate([](double x) { return std::exp(-x) * std::sin(10 * x); }, 0.0, 2 * pi);
    const double exact = 10.0 / 101.0 * (1 - std::exp(-2 * pi));
    CHECK(std::abs(a.value - exact) < 1e-12);
    CHECK(a.err < 1e-9);

    // Near-singular peak: 1 / (x^2 + 1e-6).
    const auto b = quad::integrate([](double x) { return 1.0 / (x * x + 1e-6); }, -1.0, 1.0);
    CHECK(b.value == doctest::Approx(2e3 * std::atan(1e3)).epsilon(1e-12));
    CHECK(b.panels > 5);
}

TEST_CASE("mandatory breaks and split consistency")
{
    auto f = [](double x) { return std::abs(std::sin(x)); };
    const double br[] = {pi};
    const auto whole = quad::integrate(f, 0.0, 2 * pi, br);
    CHECK(whole.value == doctest::Approx(4.0).epsilon(1e-14));
    const auto l = quad::integrate(f, 0.0, pi), r = quad::integrate(f, pi, 2 * pi);
    CHECK(std::abs(whole.value - (l.value + r.value)) < 2e-13);
}

TEST_CASE("quadrature budget exhaustion throws")
{
    quad::Options opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 0;
    opt.max_panels = 4;
    try {
        quad::integrate([](double x) { return std::sin(1 / (x + 1e-3)); }, 0.0, 1.0, {}, opt);
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::QuadratureFailure);
    }
}

TEST_CASE("DOPRI5: exponential decay, both directions, exact endpoint")
{
    ode::Dopri5<1>::Options o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    ode::Dopri5<1> s(o);
    auto rhs = [](double, const std::array<double, 1>& y) { return std::array<double, 1>{-2.0 * y[0]}; };
    std::array<double, 1> y{1.0};
    const double tend = s.integrate(rhs, 0.0, 3.0, y);
    CHECK(tend == 3.0);
    CHECK(y[0] == doctest::Approx(std::exp(-6.0)).epsilon(1e-10));
    s.integrate(rhs, 3.0, 0.0, y);
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("DOPRI5 dense output is accurate inside steps")
{
    ode::Dopri5<2> s({1e-10, 1e-12, 0.0, 100000});
    auto rhs = [](double, const std::array<double, 2>& y) { return std::array<double, 2>{y[1], -y[0]}; };
    std::array<double, 2> y{0.0, 1.0};
    double worst = 0.0;
    s.integrate(rhs, 0.0, 10.0, y, [&](const ode::Dopri5<2>::Dense& d, double, const std::array<double, 2>&) {
        for (int k = 1; k < 4; ++k) {
            const double t = d.t0 + d.h * k / 4;
            worst = std::max(worst, std::abs(d(t)[0] - std::sin(t)));
        }
        return true;
    });
    CHECK(worst < 1e-8);
    CHECK(s.stats().accepted > 0);
}

TEST_CASE("DOPRI5 early stop and step budget")
{
    ode::Dopri5<1> s({1e-10, 1e-12, 0.0, 50});
    auto rhs = [](double, const std::array<double, 1>& y) { return std::array<double, 1>{y[0]}; };
    std::array<double, 1> y{1.0};
    const double t = s.integrate(rhs, 0.0, 1.0, y, [](const auto&, double, const auto&) { return false; });
    CHECK(t > 0.0);
    CHECK(t < 1.0);
    std::array<double, 1> z{1.0};
    CHECK_THROWS_AS(s.integrate(rhs, 0.0, 1e4, z), Error);
}

TEST_CASE("parallel_for covers every index once and rethrows")
{
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t k) { hits[k] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t k) {
                        if (k == 7) throw Error(ErrorKind::InvalidArgument, "boom");
                    }),
                    Error);
    CHECK(thread_budget() >= 1);
}

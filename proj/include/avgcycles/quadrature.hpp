#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "avgcycles/error.hpp"

namespace avgcycles::quad {

/// Result of one Gauss-Kronrod panel or of a whole adaptive integration.
struct Estimate {
    double value = 0.0;
    double err = 0.0;
    /// Integral of |f|, used for roundoff floors and cancellation checks.
    double abs_value = 0.0;
    std::size_t panels = 0;
};

struct Options {
    double abs_tol = 1e-9;
    double rel_tol = 1e-13;
    std::size_t max_panels = 4000;
};

namespace detail {

// 10-point Gauss / 21-point Kronrod pair on [-1, 1]; odd entries of xgk are
// the Gauss nodes.
inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b;
    Estimate est;
    double roundoff;
    bool operator<(const Panel& o) const { return est.err < o.est.err; }
};

}  // namespace detail

/// Single G10K21 panel with the QUADPACK error heuristic.
template <class F>
Estimate gauss_kronrod21(F&& f, double a, double b)
{
    using namespace detail;
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double dhlgth = std::abs(hlgth);

    std::array<double, 10> fv1{}, fv2{};
    const double fc = f(centr);
    double resg = 0.0;
    double resk = wgk[10] * fc;
    double resabs = std::abs(resk);
    for (int j = 0; j < 10; ++j) {
        const double absc = hlgth * xgk[j];
        const double f1 = f(centr - absc);
        const double f2 = f(centr + absc);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += wgk[j] * (f1 + f2);
        resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = wgk[10] * std::abs(fc - reskh);
    for (int j = 0; j < 10; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    Estimate e;
    e.value = resk * hlgth;
    e.abs_value = resabs * dhlgth;
    resasc *= dhlgth;
    double err = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    e.err = std::max(err, 50.0 * eps * e.abs_value);
    e.panels = 1;
    return e;
}

/// Globally adaptive G10K21 over [a, b] with mandatory breakpoints. Stops when
/// the summed error estimate meets max(abs_tol, rel_tol*|I|), or when every
/// remaining panel is limited by roundoff (its estimate then stays in err).
/// Panel sums are accumulated in left-to-right order so results do not
/// depend on refinement order.
template <class F>
Estimate integrate(F&& f, double a, double b, std::span<const double> breaks = {}, const Options& opt = {})
{
    using detail::Panel;
    if (!(b > a)) {
        if (a == b) return {};
        throw Error(ErrorKind::InvalidArgument, "integration bounds must satisfy a <= b");
    }
    std::vector<double> edges{a};
    for (double x : breaks)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    constexpr double eps = std::numeric_limits<double>::epsilon();
    std::priority_queue<Panel> open;
    std::vector<Panel> done;
    double total = 0.0, total_err = 0.0;
    auto make = [&](double lo, double hi) {
        Panel p{lo, hi, gauss_kronrod21(f, lo, hi), 0.0};
        p.roundoff = 50.0 * eps * p.est.abs_value;
        return p;
    };
    auto add = [&](Panel p) {
        total += p.est.value;
        total_err += p.est.err;
        const bool at_floor = p.est.err <= p.roundoff * 1.0000001;
        const bool too_narrow = (p.b - p.a) <= 64 * eps * std::max(std::abs(p.a), std::abs(p.b));
        if (at_floor || too_narrow)
            done.push_back(p);
        else
            open.push(p);
    };
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) add(make(edges[k], edges[k + 1]));

    std::size_t n_panels = edges.size() - 1;
    while (!open.empty() && total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (n_panels >= opt.max_panels)
            throw Error(ErrorKind::QuadratureFailure,
                        "panel budget " + std::to_string(opt.max_panels) + " exhausted on [" +
                            std::to_string(a) + ", " + std::to_string(b) + "], error estimate " +
                            std::to_string(total_err));
        Panel p = open.top();
        open.pop();
        total -= p.est.value;
        total_err -= p.est.err;
        const double mid = 0.5 * (p.a + p.b);
        add(make(p.a, mid));
        add(make(mid, p.b));
        ++n_panels;
    }
    while (!open.empty()) {
        done.push_back(open.top());
        open.pop();
    }
    std::sort(done.begin(), done.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    Estimate out;
    for (const auto& p : done) {
        out.value += p.est.value;
        out.err += p.est.err;
        out.abs_value += p.est.abs_value;
    }
    out.panels = done.size();
    return out;
}

}  // namespace avgcycles::quad

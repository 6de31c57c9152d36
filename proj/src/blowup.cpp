#include "avgcycles/blowup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "avgcycles/error.hpp"

namespace avgcycles {

namespace {

constexpr double kPi = std::numbers::pi;

double golden_min_abs(const CenterParams& p, double lo, double hi, double& arg)
{
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = std::abs(eval_g(p, x1));
    double f2 = std::abs(eval_g(p, x2));
    for (int it = 0; it < 80 && (hi - lo) > 1e-15; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = std::abs(eval_g(p, x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = std::abs(eval_g(p, x2));
        }
    }
    arg = f1 < f2 ? x1 : x2;
    return std::min(f1, f2);
}

// Chebyshev-Lobatto interpolation of f/g on [a, b] and its antiderivative.
struct ChebFit {
    std::vector<double> antideriv;  // length N + 2
    double tail;                    // sup-norm estimate of the interpolation error
    double scale;                   // max |f/g| at the nodes
};

ChebFit fit_panel(const CenterParams& p, double a, double b)
{
    constexpr int n = FlowFactor::kDegree;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<double, n + 1> vals{};
    double scale = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double t = std::cos(kPi * j / n);
        const double th = mid + half * t;
        vals[j] = eval_f(p, th) / eval_g(p, th);
        scale = std::max(scale, std::abs(vals[j]));
    }
    std::array<double, n + 3> c{};
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double w = (j == 0 || j == n) ? 0.5 : 1.0;
            s += w * vals[j] * std::cos(kPi * double(k) * j / n);
        }
        c[k] = s * 2.0 / n;
    }
    c[0] *= 0.5;
    c[n] *= 0.5;

    ChebFit fit;
    fit.antideriv.assign(n + 2, 0.0);
    // d/dt sum A_k T_k = sum c_k T_k, with c_0 entering as 2 c_0 in the recurrence.
    fit.antideriv[1] = (2.0 * c[0] - c[2]) / 2.0;
    for (int k = 2; k <= n + 1; ++k) fit.antideriv[k] = (c[k - 1] - c[k + 1]) / (2.0 * k);
    for (auto& v : fit.antideriv) v *= half;
    double at_minus_one = 0.0;
    for (int k = 1; k <= n + 1; ++k) at_minus_one += (k % 2 ? -1.0 : 1.0) * fit.antideriv[k];
    fit.antideriv[0] = -at_minus_one;

    fit.tail = 2.0 * (std::abs(c[n - 2]) + std::abs(c[n - 1]) + std::abs(c[n]));
    fit.scale = scale;
    return fit;
}

double clenshaw(const std::vector<double>& coeffs, double t)
{
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) {
        const double b0 = 2.0 * t * b1 - b2 + coeffs[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + coeffs[0];
}

}  // namespace

double eval_M(const CenterParams& p, double theta) noexcept
{
    const double c = std::cos(theta);
    return p.a() * c * c + p.b() * std::sin(theta);
}

double eval_N(const CenterParams& p, double theta) noexcept
{
    const double c = std::cos(theta);
    return p.c() * c * c * c + p.d() * c * std::sin(theta);
}

double eval_f(const CenterParams& p, double theta) noexcept
{
    return std::cos(theta) * eval_M(p, theta) + std::sin(theta) * eval_N(p, theta);
}

double eval_g(const CenterParams& p, double theta) noexcept
{
    return std::cos(theta) * eval_N(p, theta) - 2.0 * std::sin(theta) * eval_M(p, theta);
}

GMinimum check_g_nonvanishing(const CenterParams& params, std::size_t n_samples, double floor)
{
    if (n_samples < 256) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 256");
    if (!(floor > 0.0)) throw Error(ErrorKind::InvalidArgument, "floor must be positive");

    const double step = 2.0 * kPi / double(n_samples);
    std::vector<double> absg(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) absg[k] = std::abs(eval_g(params, step * double(k)));

    std::vector<std::size_t> minima;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double prev = absg[(k + n_samples - 1) % n_samples];
        const double next = absg[(k + 1) % n_samples];
        if (absg[k] <= prev && absg[k] <= next) minima.push_back(k);
    }
    std::sort(minima.begin(), minima.end(), [&](auto l, auto r) { return absg[l] < absg[r]; });
    if (minima.size() > 5) minima.resize(5);

    GMinimum best{absg[minima.front()], step * double(minima.front())};
    for (auto k : minima) {
        const double centre = step * double(k);
        double arg = centre;
        const double v = golden_min_abs(params, centre - step, centre + step, arg);
        if (v < best.min_abs_g) best = {v, arg};
    }
    best.theta = std::remainder(best.theta, 2.0 * kPi);
    if (best.theta < 0) best.theta += 2.0 * kPi;
    if (best.min_abs_g < floor)
        throw Error(ErrorKind::GNearZero, "min |g| = " + std::to_string(best.min_abs_g) + " at theta = " +
                                              std::to_string(best.theta) + " is below floor " +
                                              std::to_string(floor));
    return best;
}

double first_order_term(const Problem& problem, Side side, double theta, double r)
{
    if (!(r > 0.0)) throw Error(ErrorKind::NonpositiveRadius, "r = " + std::to_string(r));
    const auto& prm = problem.params;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double g = eval_g(prm, theta);
    const double x = r * c;
    const double y = r * r * s;
    const double pv = problem.p(side)(x, y);
    const double qv = problem.q(side)(x, y);
    return (1.0 + s * s) / (r * r * r * g * g) * (r * r * eval_N(prm, theta) * pv - r * eval_M(prm, theta) * qv);
}

WeightedPolar to_weighted_polar(double x, double y)
{
    const double r2 = 0.5 * (x * x + std::sqrt(x * x * x * x + 4.0 * y * y));
    const double r = std::sqrt(r2);
    if (!(r > 0.0)) throw Error(ErrorKind::NonpositiveRadius, "origin has no polar angle");
    return {r, std::atan2(y / r2, x / r)};
}

// ---------------------------------------------------------------------------

FlowFactor build_flow_factor(const CenterParams& params, double alpha, double tol)
{
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    check_g_nonvanishing(params);

    FlowFactor ff(params, alpha);
    ff.lo_ = alpha - kPi;
    ff.hi_ = alpha + 3.0 * kPi;
    const double sup_tol = tol / (ff.hi_ - ff.lo_);
    constexpr std::size_t max_panels = 4096;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    struct Raw {
        double a, b;
        ChebFit fit;
    };
    std::vector<Raw> raw;
    double err = 0.0;

    // Mandatory breaks at alpha + k pi/2, k = -2..6, then adaptive bisection.
    for (int k = -2; k < 6; ++k) {
        const double a0 = alpha + k * kPi / 2;
        const double b0 = alpha + (k + 1) * kPi / 2;
        std::vector<std::pair<double, double>> stack{{a0, b0}};
        std::vector<Raw> accepted;
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            ChebFit fit = fit_panel(params, a, b);
            const double floor = 64.0 * eps * fit.scale;
            if (fit.tail <= std::max(sup_tol, floor)) {
                accepted.push_back({a, b, std::move(fit)});
            } else {
                if (raw.size() + accepted.size() + stack.size() >= max_panels)
                    throw Error(ErrorKind::QuadratureFailure,
                                "flow factor needs more than " + std::to_string(max_panels) + " panels");
                const double m = 0.5 * (a + b);
                stack.push_back({m, b});
                stack.push_back({a, m});
            }
        }
        std::sort(accepted.begin(), accepted.end(), [](auto& l, auto& r) { return l.a < r.a; });
        for (auto& p : accepted) {
            err += p.fit.tail * (p.b - p.a);
            raw.push_back(std::move(p));
        }
    }

    // Chain w outward from alpha so that w(alpha) = 0 exactly.
    const auto first_right = std::find_if(raw.begin(), raw.end(), [&](const Raw& r) { return r.a >= alpha; });
    const std::size_t pivot = std::size_t(first_right - raw.begin());
    ff.panels_.resize(raw.size());
    double running = 0.0;
    for (std::size_t k = pivot; k < raw.size(); ++k) {
        const double total = clenshaw(raw[k].fit.antideriv, 1.0);
        ff.panels_[k] = {raw[k].a, raw[k].b, running, raw[k].fit.antideriv};
        running += total;
    }
    running = 0.0;
    for (std::size_t k = pivot; k-- > 0;) {
        const double total = clenshaw(raw[k].fit.antideriv, 1.0);
        running -= total;
        ff.panels_[k] = {raw[k].a, raw[k].b, running, raw[k].fit.antideriv};
    }

    for (const auto& p : ff.panels_) ff.checkpoints_.push_back({p.a, p.w_left});
    ff.checkpoints_.push_back({ff.panels_.back().b, ff.log_value(ff.panels_.back().b)});
    ff.err_bound_ = err + 16.0 * eps * double(ff.panels_.size());
    return ff;
}

const FlowFactor::Panel& FlowFactor::locate(double theta) const
{
    if (!(theta >= lo_ && theta <= hi_))
        throw Error(ErrorKind::DomainExceeded, "theta = " + std::to_string(theta) + " outside [" +
                                                   std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
    auto it = std::upper_bound(panels_.begin(), panels_.end(), theta,
                               [](double t, const Panel& p) { return t < p.a; });
    if (it != panels_.begin()) --it;
    return *it;
}

double FlowFactor::log_value(double theta) const
{
    if (theta == alpha_) return 0.0;
    const Panel& p = locate(theta);
    const double t = std::clamp((2.0 * theta - p.a - p.b) / (p.b - p.a), -1.0, 1.0);
    return p.w_left + clenshaw(p.coeffs, t);
}

double FlowFactor::value(double theta) const { return std::exp(log_value(theta)); }

double flow_factor_value(const FlowFactor& ff, double theta) { return ff.value(theta); }

}  // namespace avgcycles

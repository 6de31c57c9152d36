#include "avgcycles/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "avgcycles/error.hpp"
#include "avgcycles/ode.hpp"
#include "avgcycles/parallel.hpp"

namespace avgcycles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Ode1 = ode::Dopri5<1>;
using Ode2 = ode::Dopri5<2>;

double first_order_rhs(const Problem& pr, Side side, double theta, double r, double eps)
{
    const double f0 = eval_f(pr.params, theta) / eval_g(pr.params, theta) * r;
    if (eps == 0.0) return f0;
    return f0 + eps * first_order_term(pr, side, theta, r);
}

double exact_rhs(const Problem& pr, Side side, double theta, double r, double eps)
{
    const double c = std::cos(theta), s = std::sin(theta);
    const double r3 = r * r * r;
    const double f = eval_f(pr.params, theta), g = eval_g(pr.params, theta);
    if (eps == 0.0) return r * f / g;
    const double x = r * c, y = r * r * s;
    const double p = pr.p(side)(x, y), q = pr.q(side)(x, y);
    const double num = r3 * f + eps * (r * c * p + s * q);
    const double den = r3 * g + eps * (c * q - 2.0 * r * s * p);
    return r * num / den;
}

double smallest_flow_factor(const FlowFactor& ff)
{
    const double lo = ff.base_angle(), hi = lo + 2 * kPi;
    double m = 1.0;
    for (const auto& cp : ff.checkpoints())
        if (cp.theta >= lo && cp.theta <= hi) m = std::min(m, std::exp(cp.w));
    return m;
}

double switching_coordinate(SwitchingLine line, double x, double y) { return line == SwitchingLine::VerticalX0 ? x : y; }

struct PlanarField {
    const Problem& pr;
    double eps;
    Side side;
    Ode2::State operator()(double, const Ode2::State& z) const
    {
        const double x = z[0], y = z[1];
        const auto& P = pr.params;
        Ode2::State out{P.a() * x * x + P.b() * y, P.c() * x * x * x + P.d() * x * y};
        if (eps != 0.0) {
            out[0] += eps * pr.p(side)(x, y);
            out[1] += eps * pr.q(side)(x, y);
        }
        return out;
    }
};

// Side a trajectory enters when it starts at (x, y) moving in time direction dir.
Side entering_side(const Problem& pr, double x, double y, double eps, double dir)
{
    const double s = switching_coordinate(pr.line, x, y);
    if (s != 0.0) return side_at_point(pr.line, x, y);
    const auto v = PlanarField{pr, eps, Side::Plus}(0.0, {x, y});
    const double ds = dir * switching_coordinate(pr.line, v[0], v[1]);
    return ds < 0 ? Side::Minus : Side::Plus;
}

// Integrates the planar system, switching branch at every crossing.
// on_sample(t, x, y, is_event) returns false to stop.
template <class OnSample>
void run_planar(const Problem& pr, double x0, double y0, double eps, double t_max, double tol, OnSample&& on_sample)
{
    if (x0 == 0.0 && y0 == 0.0) throw Error(ErrorKind::InvalidArgument, "orbit cannot start at the origin");
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    const double dir = t_max >= 0 ? 1.0 : -1.0;
    Side side = entering_side(pr, x0, y0, eps, dir);
    Ode2::State y{x0, y0};
    double t = 0.0;
    if (!on_sample(t, y[0], y[1], false)) return;

    typename Ode2::Options opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-2 * std::max(std::abs(x0), std::abs(y0));
    Ode2 solver(opt);

    while (dir * (t_max - t) > 0) {
        bool event = false, stop = false;
        double t_event = 0.0;
        Ode2::State y_event{};
        auto on_step = [&](const Ode2::Dense& dense, double t_new, const Ode2::State& y_new) {
            if (side_at_point(pr.line, y_new[0], y_new[1]) != side) {
                // Bisect the switching coordinate on the dense output.
                double lo = dense.t0, hi = t_new;
                for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const auto ym = dense(mid);
                    const double sm = switching_coordinate(pr.line, ym[0], ym[1]);
                    const bool same = side == Side::Plus ? sm >= 0.0 : sm < 0.0;
                    (same ? lo : hi) = mid;
                }
                t_event = hi;
                y_event = dense(t_event);
                (pr.line == SwitchingLine::VerticalX0 ? y_event[0] : y_event[1]) = 0.0;
                event = true;
                return false;
            }
            if (!on_sample(t_new, y_new[0], y_new[1], false)) {
                stop = true;
                return false;
            }
            return true;
        };
        const double t_end = solver.integrate(PlanarField{pr, eps, side}, t, t_max, y, on_step);
        if (stop) return;
        if (!event) {
            t = t_end;
            break;
        }
        t = t_event;
        y = y_event;
        side = side == Side::Plus ? Side::Minus : Side::Plus;
        if (!on_sample(t, y[0], y[1], true)) return;
    }
}

}  // namespace

double rhs_transformed(const Problem& problem, Side side, double theta, double r, double eps)
{
    if (!(r > 0.0)) throw Error(ErrorKind::NonpositiveRadius, "r = " + std::to_string(r));
    return first_order_rhs(problem, side, theta, r, eps);
}

double rhs_transformed(const Problem& problem, double theta, double r, double eps)
{
    return rhs_transformed(problem, side_at_angle(problem.line, theta), theta, r, eps);
}

double rhs_exact_polar(const Problem& problem, Side side, double theta, double r, double eps)
{
    if (!(r > 0.0)) throw Error(ErrorKind::NonpositiveRadius, "r = " + std::to_string(r));
    return exact_rhs(problem, side, theta, r, eps);
}

PeriodResult integrate_period_detailed(const Problem& problem, const FlowFactor& ff, double z, double eps,
                                       const PeriodOptions& opt)
{
    if (!(z > 0.0)) throw Error(ErrorKind::NonpositiveRadius, "z = " + std::to_string(z));
    if (!(opt.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    const auto angles = split_angles(problem.line);

    // Local error control a decade below tol: global error over a period is
    // a few times the local tolerance.
    Ode1::Options oo;
    oo.rtol = 0.1 * opt.tol;
    oo.atol = 0.1 * opt.tol * z * smallest_flow_factor(ff);
    const double r_escape = 1e8 * z / smallest_flow_factor(ff);
    Ode1 solver(oo);

    PeriodResult out;
    Ode1::State r{z};
    for (int seg = 0; seg < 2; ++seg) {
        const Side side = seg == 0 ? Side::Plus : Side::Minus;
        auto rhs = [&](double theta, const Ode1::State& y) -> Ode1::State {
            if (!(y[0] > 0.0)) return {kNaN};
            return {opt.form == RhsForm::Exact ? exact_rhs(problem, side, theta, y[0], eps)
                                               : first_order_rhs(problem, side, theta, y[0], eps)};
        };
        auto on_step = [&](const Ode1::Dense& dense, double theta, const Ode1::State& y) {
            if (!(y[0] > 0.0))
                throw Error(ErrorKind::RadiusCollapse, "r = " + std::to_string(y[0]) + " at theta = " +
                                                           std::to_string(theta));
            if (y[0] > r_escape)
                throw Error(ErrorKind::StepFailure, "radius diverged (r = " + std::to_string(y[0]) +
                                                        ") at theta = " + std::to_string(theta));
            if (opt.log_steps) out.step_log.push_back({dense.t0, theta});
            return true;
        };
        solver.integrate(rhs, angles[seg], angles[seg + 1], r, on_step);
        out.accepted_steps += solver.stats().accepted;
        out.rejected_steps += solver.stats().rejected;
    }
    out.r_end = r[0];
    return out;
}

double integrate_period(const Problem& problem, const FlowFactor& ff, double z, double eps, double tol)
{
    PeriodOptions opt;
    opt.tol = tol;
    return integrate_period_detailed(problem, ff, z, eps, opt).r_end;
}

double displacement(const Problem& problem, const FlowFactor& ff, double z, double eps, double tol)
{
    return integrate_period(problem, ff, z, eps, tol) - z;
}

void VerificationConfig::validate() const
{
    if (epsilons.empty()) throw Error(ErrorKind::InvalidArgument, "epsilon ladder is empty");
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (!(epsilons[k] > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilons must be positive");
        if (k > 0 && !(epsilons[k] < epsilons[k - 1]))
            throw Error(ErrorKind::InvalidArgument, "epsilons must be strictly decreasing");
    }
    if (!(integrator_tol > 0.0) || !(bisection_tol > 0.0) || !(capture_window > 0.0))
        throw Error(ErrorKind::InvalidArgument, "tolerances and capture window must be positive");
}

bool CycleRecord::verified() const noexcept
{
    return !per_epsilon.empty() &&
           std::all_of(per_epsilon.begin(), per_epsilon.end(), [](const FixedPoint& f) { return f.verified(); });
}

int CycleReport::count_verified_at(double epsilon) const
{
    int n = 0;
    for (const auto& rec : records)
        for (const auto& fp : rec.per_epsilon)
            if (fp.epsilon == epsilon && fp.verified()) ++n;
    return n;
}

CycleReport find_fixed_points(const Problem& problem, const FlowFactor& ff, const RootReport& predicted,
                              const VerificationConfig& cfg)
{
    cfg.validate();
    CycleReport report;
    for (const auto& root : predicted.roots) {
        CycleRecord rec;
        rec.z_star = root.z_star;
        rec.simple = root.simple;
        for (double e : cfg.epsilons) rec.per_epsilon.push_back({e, std::nullopt, 0.0, 0.0, 0.0, kNaN, kNaN, {}});
        report.records.push_back(std::move(rec));
    }

    const std::size_t n_eps = cfg.epsilons.size();
    parallel_for(report.records.size() * n_eps, [&](std::size_t job) {
        auto& rec = report.records[job / n_eps];
        auto& fp = rec.per_epsilon[job % n_eps];
        if (!rec.simple) {
            fp.note = "root is not simple";
            return;
        }
        const double e = fp.epsilon;
        const double w = cfg.capture_window * e;
        double lo = std::max(rec.z_star - w, 0.5 * rec.z_star), hi = rec.z_star + w;
        fp.window_lo = lo;
        fp.window_hi = hi;
        auto D = [&](double z) { return displacement(problem, ff, z, e, cfg.integrator_tol); };
        try {
            double dlo = D(lo), dhi = D(hi);
            fp.disp_lo = dlo;
            fp.disp_hi = dhi;
            if (dlo == 0.0) {
                fp.z_hat = lo;
                return;
            }
            if (dhi == 0.0) {
                fp.z_hat = hi;
                return;
            }
            if ((dlo > 0) == (dhi > 0)) {
                fp.note = "no sign change in the capture window";
                return;
            }
            while (hi - lo > cfg.bisection_tol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double dm = D(mid);
                if (dm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                ((dm > 0) == (dlo > 0) ? lo : hi) = mid;
            }
            const double z = 0.5 * (lo + hi);
            fp.z_hat = z;
            fp.residual = std::abs(D(z));
        } catch (const Error& err) {
            fp.z_hat.reset();
            fp.note = err.what();
        }
    });

    for (auto& rec : report.records) {
        if (rec.verified()) ++report.count_verified;
        if (n_eps >= 2 && rec.per_epsilon[0].verified() && rec.per_epsilon[1].verified()) {
            const double d1 = std::abs(*rec.per_epsilon[0].z_hat - rec.z_star);
            const double d2 = std::abs(*rec.per_epsilon[1].z_hat - rec.z_star);
            if (d1 > 0.0) rec.convergence_ratio = d2 / d1;
        }
    }
    return report;
}

std::vector<OrbitSample> cartesian_orbit(const Problem& problem, double x0, double y0, double eps, double t_max,
                                         double tol)
{
    std::vector<OrbitSample> out;
    run_planar(problem, x0, y0, eps, t_max, tol, [&](double t, double x, double y, bool) {
        out.push_back({t, x, y});
        return true;
    });
    return out;
}

double cartesian_return_radius(const Problem& problem, double z, double eps, double tol)
{
    if (!(z > 0.0)) throw Error(ErrorKind::NonpositiveRadius, "z = " + std::to_string(z));
    const double alpha = base_angle(problem.line);
    const double x0 = z * std::cos(alpha), y0 = z * z * std::sin(alpha);
    // theta' has the sign of g, which never vanishes.
    const double dir = eval_g(problem.params, alpha) > 0 ? 1.0 : -1.0;
    const auto gmin = check_g_nonvanishing(problem.params);
    const double t_max = dir * 1e6 / (z * gmin.min_abs_g);

    int events = 0;
    double r_return = kNaN;
    run_planar(problem, x0, y0, eps, t_max, tol, [&](double, double x, double y, bool is_event) {
        if (!is_event) return true;
        if (++events < 2) return true;
        r_return = to_weighted_polar(x, y).r;
        return false;
    });
    if (!std::isfinite(r_return))
        throw Error(ErrorKind::StepFailure, "trajectory did not return to the starting ray");
    return r_return;
}

}  // namespace avgcycles

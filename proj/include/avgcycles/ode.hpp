#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "avgcycles/error.hpp"

namespace avgcycles::ode {

/// Dormand-Prince 5(4) with Hairer's 4th-order continuous extension.
/// Integrates in either direction; stops exactly at the end point.
template <std::size_t D>
class Dopri5 {
public:
    using State = std::array<double, D>;

    struct Options {
        double rtol = 1e-11;
        double atol = 1e-13;
        double h_init = 0.0;  // 0: a hundredth of the interval
        std::size_t max_steps = 2'000'000;
    };

    /// Dense interpolant over the last accepted step.
    struct Dense {
        double t0, h;
        std::array<State, 5> rc;

        State operator()(double t) const
        {
            const double s = (t - t0) / h;
            const double s1 = 1.0 - s;
            State y;
            for (std::size_t i = 0; i < D; ++i)
                y[i] = rc[0][i] + s * (rc[1][i] + s1 * (rc[2][i] + s * (rc[3][i] + s1 * rc[4][i])));
            return y;
        }
    };

    struct Stats {
        std::size_t accepted = 0;
        std::size_t rejected = 0;
    };

    explicit Dopri5(Options opt) : opt_(opt) {}

    /// rhs(t, y) -> dy/dt. on_step(dense, t_new, y_new) is called after each
    /// accepted step and returns false to stop early. Returns the final time.
    template <class Rhs, class OnStep>
    double integrate(Rhs&& rhs, double t0, double t1, State& y, OnStep&& on_step)
    {
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                         a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                         a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
        constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                         a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
        constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                         e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
        constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                         d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                         d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

        stats_ = {};
        if (t0 == t1) return t1;
        const double dir = t1 > t0 ? 1.0 : -1.0;
        double h = opt_.h_init > 0 ? dir * opt_.h_init : (t1 - t0) / 100.0;
        double t = t0;
        State k1 = rhs(t, y), k2, k3, k4, k5, k6, k7, ytmp, ynew;
        constexpr double eps = std::numeric_limits<double>::epsilon();

        while (dir * (t1 - t) > 0) {
            if (stats_.accepted + stats_.rejected >= opt_.max_steps)
                throw Error(ErrorKind::StepFailure, "step budget exhausted at t = " + std::to_string(t));
            bool last = false;
            if (dir * (t + h - t1) >= 0) {
                h = t1 - t;
                last = true;
            }
            if (std::abs(h) <= 16 * eps * std::max(1.0, std::abs(t)))
                throw Error(ErrorKind::StepFailure, "step size underflow at t = " + std::to_string(t));

            for (std::size_t i = 0; i < D; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
            k2 = rhs(t + c2 * h, ytmp);
            for (std::size_t i = 0; i < D; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = rhs(t + c3 * h, ytmp);
            for (std::size_t i = 0; i < D; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = rhs(t + c4 * h, ytmp);
            for (std::size_t i = 0; i < D; ++i)
                ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = rhs(t + c5 * h, ytmp);
            for (std::size_t i = 0; i < D; ++i)
                ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            const double tph = last ? t1 : t + h;
            k6 = rhs(tph, ytmp);
            for (std::size_t i = 0; i < D; ++i)
                ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            k7 = rhs(tph, ynew);

            double err = 0.0;
            for (std::size_t i = 0; i < D; ++i) {
                const double sk = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const double ei =
                    h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]) / sk;
                err += ei * ei;
            }
            err = std::sqrt(err / double(D));
            if (!std::isfinite(err)) {
                ++stats_.rejected;
                h *= 0.2;
                continue;
            }
            const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
            if (err > 1.0) {
                ++stats_.rejected;
                h *= std::max(0.2, fac);
                continue;
            }

            Dense dense{t, h, {}};
            for (std::size_t i = 0; i < D; ++i) {
                dense.rc[0][i] = y[i];
                dense.rc[1][i] = ynew[i] - y[i];
                dense.rc[2][i] = h * k1[i] - dense.rc[1][i];
                dense.rc[3][i] = dense.rc[1][i] - h * k7[i] - dense.rc[2][i];
                dense.rc[4][i] =
                    h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            ++stats_.accepted;
            t = tph;
            y = ynew;
            k1 = k7;
            if (!on_step(dense, t, y)) return t;
            h *= fac;
        }
        return t;
    }

    template <class Rhs>
    double integrate(Rhs&& rhs, double t0, double t1, State& y)
    {
        return integrate(rhs, t0, t1, y, [](const Dense&, double, const State&) { return true; });
    }

    const Stats& stats() const noexcept { return stats_; }

private:
    Options opt_;
    Stats stats_;
};

}  // namespace avgcycles::ode

#include "avgcycles/roots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "avgcycles/error.hpp"

namespace avgcycles {

namespace {

constexpr int kUniformSamples = 512;
constexpr int kLogSamples = 512;

int sign_of(double v) { return (v > 0) - (v < 0); }

}  // namespace

std::vector<double> RootReport::simple_roots() const
{
    std::vector<double> out;
    for (const auto& r : roots)
        if (r.simple) out.push_back(r.z_star);
    return out;
}

int descartes_bound(const AveragedPolynomial& poly)
{
    if (poly.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "sign variations of the zero polynomial");
    int variations = 0;
    int prev = 0;
    for (const auto& [n, c] : poly.coeffs()) {
        const int s = sign_of(c);
        if (prev != 0 && s != prev) ++variations;
        prev = s;
    }
    return variations;
}

double cauchy_bound(const AveragedPolynomial& poly)
{
    if (poly.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "Cauchy bound of the zero polynomial");
    const auto& cs = poly.coeffs();
    const double lead = std::abs(cs.rbegin()->second);
    double worst = 0.0;
    for (auto it = cs.begin(); it != std::prev(cs.end()); ++it) worst = std::max(worst, std::abs(it->second));
    return 1.0 + worst / lead;
}

RootReport isolate_positive_roots(const AveragedPolynomial& poly, std::optional<double> z_max, double tol,
                                  double simplicity_floor)
{
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    RootReport report;
    report.tolerance = tol;
    report.z_min = tol;
    if (poly.is_zero()) {
        report.z_max = z_max.value_or(0.0);
        return report;
    }
    report.descartes_bound = descartes_bound(poly);
    const double hi = z_max ? *z_max : cauchy_bound(poly);
    if (!(hi > tol)) throw Error(ErrorKind::InvalidArgument, "z_max must exceed tol");
    report.z_max = hi;

    std::vector<double> grid;
    grid.reserve(kUniformSamples + kLogSamples);
    for (int k = 0; k < kUniformSamples; ++k) grid.push_back(tol + (hi - tol) * k / (kUniformSamples - 1));
    const double llo = std::log(tol), lhi = std::log(hi);
    for (int k = 0; k < kLogSamples; ++k) grid.push_back(std::exp(llo + (lhi - llo) * k / (kLogSamples - 1)));
    grid.front() = tol;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    grid.back() = hi;

    std::vector<double> vals(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) vals[k] = poly(grid[k]);

    auto refine = [&](double lo, double up, double flo) {
        // Invariant: sign(h(lo)) == sign(flo) != sign(h(up)).
        double z = 0.5 * (lo + up);
        while (up - lo > tol) {
            z = 0.5 * (lo + up);
            if (z <= lo || z >= up) break;
            const double fz = poly(z);
            if (fz == 0.0) {
                // Rounded to an exact zero: tighten around z if the sign change survives.
                const double a = std::max(lo, z - 0.5 * tol), b = std::min(up, z + 0.5 * tol);
                const double fa = poly(a), fb = poly(b);
                if (sign_of(fa) == sign_of(flo) && sign_of(fb) == -sign_of(flo)) {
                    lo = a;
                    up = b;
                }
                break;
            }
            if (sign_of(fz) == sign_of(flo)) {
                lo = z;
                flo = fz;
            } else {
                up = z;
            }
            z = 0.5 * (lo + up);
        }
        const double d = poly.derivative(z);
        report.roots.push_back({z, lo, up, d, std::abs(d) > simplicity_floor * poly.scale_at(z)});
    };

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const int s0 = sign_of(vals[k]);
        const int s1 = sign_of(vals[k + 1]);
        if (s0 != 0 && s1 != 0 && s0 != s1) {
            refine(grid[k], grid[k + 1], vals[k]);
        } else if (s1 == 0 && k + 2 < grid.size()) {
            // Grid point exactly on a root: bracket with its neighbours.
            const int s2 = sign_of(vals[k + 2]);
            if (s0 != 0 && s2 != 0 && s0 != s2)
                refine(grid[k], grid[k + 2], vals[k]);
            else
                report.suspected_multiple.push_back(grid[k + 1]);
        }
    }

    // Near-zeros without a sign change: minimise |h| between the neighbours.
    auto abs_h = [&](double z) { return std::abs(poly(z)); };
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        const double a = std::abs(vals[k]);
        if (vals[k] == 0.0) continue;
        if (!(a <= std::abs(vals[k - 1]) && a <= std::abs(vals[k + 1]) &&
              sign_of(vals[k - 1]) == sign_of(vals[k]) && sign_of(vals[k + 1]) == sign_of(vals[k])))
            continue;
        double l = grid[k - 1], u = grid[k + 1];
        constexpr double kInvPhi = 0.6180339887498949;
        double x1 = u - kInvPhi * (u - l), x2 = l + kInvPhi * (u - l);
        double f1 = abs_h(x1), f2 = abs_h(x2);
        while (u - l > tol * std::max(1.0, u)) {
            if (f1 < f2) {
                u = x2;
                x2 = x1;
                f2 = f1;
                x1 = u - kInvPhi * (u - l);
                f1 = abs_h(x1);
            } else {
                l = x1;
                x1 = x2;
                f1 = f2;
                x2 = l + kInvPhi * (u - l);
                f2 = abs_h(x2);
            }
        }
        const double zm = f1 < f2 ? x1 : x2;
        if (std::min(f1, f2) <= simplicity_floor * poly.scale_at(zm)) report.suspected_multiple.push_back(zm);
    }
    std::sort(report.suspected_multiple.begin(), report.suspected_multiple.end());
    std::sort(report.roots.begin(), report.roots.end(),
              [](const RootInfo& l, const RootInfo& r) { return l.z_star < r.z_star; });
    return report;
}

AveragedPolynomial max_positive_roots_witness(int r)
{
    if (r < 1 || r > 8) throw Error(ErrorKind::IndexOutOfRange, "witness needs 1 <= r <= 8, got " + std::to_string(r));
    // Integer convolution of z * prod_{k=1}^{r-1} (z - k); ascending powers.
    std::vector<std::int64_t> c{0, 1};
    for (int k = 1; k < r; ++k) {
        std::vector<std::int64_t> next(c.size() + 1, 0);
        for (std::size_t n = 0; n < c.size(); ++n) {
            next[n + 1] += c[n];
            next[n] -= k * c[n];
        }
        c = std::move(next);
    }
    std::map<int, double> coeffs;
    for (std::size_t n = 0; n < c.size(); ++n)
        if (c[n] != 0) coeffs[int(n)] = double(c[n]);
    return AveragedPolynomial(std::move(coeffs));
}

}  // namespace avgcycles

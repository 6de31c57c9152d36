#include "avgcycles/averaging.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "avgcycles/error.hpp"
#include "avgcycles/parallel.hpp"

namespace avgcycles {

namespace {

constexpr double kPi = std::numbers::pi;

double ipow(double x, int n)
{
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

void check_index(int i, int j, Basis basis)
{
    const bool ok = i >= 0 && j >= 0 && i + j <= 4 && i + j >= 1 &&
                    (basis == Basis::Phi ? j >= 1 : i >= 1);
    if (!ok)
        throw Error(ErrorKind::IndexOutOfRange, std::string(basis == Basis::Phi ? "phi" : "psi") + "(" +
                                                    std::to_string(i) + "," + std::to_string(j) + ")");
}

// Shared factor (1 + sin^2) ff^{i+2j-4} / g^2.
double common_factor(const FlowFactor& ff, int i, int j, double theta, double s)
{
    const double g = eval_g(ff.params(), theta);
    const int power = i + 2 * j - 4;
    const double w = ff.log_value(theta);
    return (1.0 + s * s) * std::exp(power * w) / (g * g);
}

std::vector<double> mandatory_breaks(SwitchingLine line)
{
    const double alpha = base_angle(line);
    std::vector<double> b;
    for (int k = 0; k <= 4; ++k) b.push_back(alpha + k * kPi / 2);
    return b;
}

}  // namespace

double integrand_phi(const FlowFactor& ff, int i, int j, double theta)
{
    check_index(i, j, Basis::Phi);
    const double c = std::cos(theta), s = std::sin(theta);
    return common_factor(ff, i, j, theta, s) * eval_N(ff.params(), theta) * ipow(c, i) * ipow(s, j - 1);
}

double integrand_psi(const FlowFactor& ff, int i, int j, double theta)
{
    check_index(i, j, Basis::Psi);
    const double c = std::cos(theta), s = std::sin(theta);
    return common_factor(ff, i, j, theta, s) * eval_M(ff.params(), theta) * ipow(c, i - 1) * ipow(s, j);
}

HalfPeriod half_period(SwitchingLine line, Side side) noexcept
{
    const double alpha = base_angle(line);
    return side == Side::Plus ? HalfPeriod{alpha, alpha + kPi} : HalfPeriod{alpha + kPi, alpha + 2 * kPi};
}

quad::Options averaging_quad_options(double tol)
{
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    quad::Options opt;
    opt.abs_tol = tol;
    opt.rel_tol = 1e-13;
    opt.max_panels = 4000;
    return opt;
}

Integral integrate_basis(const FlowFactor& ff, SwitchingLine line, Basis basis, Side side, int i, int j,
                         double tol)
{
    check_index(i, j, basis);
    const auto [lo, hi] = half_period(line, side);
    const auto breaks = mandatory_breaks(line);
    auto f = [&](double t) {
        return basis == Basis::Phi ? integrand_phi(ff, i, j, t) : integrand_psi(ff, i, j, t);
    };
    const auto est = quad::integrate(f, lo, hi, breaks, averaging_quad_options(tol));
    // ff^k carries a relative error of |k| * err_bound(w).
    const double propagated = std::abs(i + 2 * j - 4) * ff.err_bound() * est.abs_value;
    return {est.value, est.err + propagated, est.abs_value};
}

CoefficientValue compute_coefficient(const Problem& problem, const FlowFactor& ff, int i, int j, double tol)
{
    if (i < 0 || j < 0 || i + j < 1 || i + j > 4)
        throw Error(ErrorKind::IndexOutOfRange, "k(" + std::to_string(i) + "," + std::to_string(j) + ")");
    CoefficientValue out;
    for (Side side : {Side::Plus, Side::Minus}) {
        if (j >= 1) {
            const double a = problem.p(side).coeff(i, j - 1);
            if (a != 0.0) {
                const auto I = integrate_basis(ff, problem.line, Basis::Phi, side, i, j, tol);
                out.value += a * I.value;
                out.err += std::abs(a) * I.err;
            }
        }
        if (i >= 1) {
            const double b = problem.q(side).coeff(i - 1, j);
            if (b != 0.0) {
                const auto I = integrate_basis(ff, problem.line, Basis::Psi, side, i, j, tol);
                out.value -= b * I.value;
                out.err += std::abs(b) * I.err;
            }
        }
    }
    return out;
}

CoefficientTable compute_coefficient_table(const Problem& problem, const FlowFactor& ff, double tol,
                                           SymmetryMode mode)
{
    std::vector<Monomial> keys;
    for (int total = 1; total <= 4; ++total)
        for (int i = 0; i <= total; ++i) keys.push_back({i, total - i});

    std::vector<CoefficientValue> values(keys.size());
    const bool skip_even = problem.line == SwitchingLine::HorizontalY0 && mode == SymmetryMode::Skip;
    parallel_for(keys.size(), [&](std::size_t k) {
        if (skip_even && keys[k].i % 2 == 0) return;
        values[k] = compute_coefficient(problem, ff, keys[k].i, keys[k].j, tol);
    });

    CoefficientTable table{problem.line, {}};
    for (std::size_t k = 0; k < keys.size(); ++k) table.entries[keys[k]] = values[k];
    return table;
}

// ---------------------------------------------------------------------------

AveragedPolynomial::AveragedPolynomial(std::map<int, double> coeffs, std::map<int, std::vector<Monomial>> provenance)
    : provenance_(std::move(provenance))
{
    for (const auto& [n, c] : coeffs) {
        if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative exponent in averaged polynomial");
        if (c != 0.0) coeffs_[n] = c;
    }
}

double AveragedPolynomial::coeff(int n) const
{
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? 0.0 : it->second;
}

double AveragedPolynomial::operator()(double z) const
{
    double sum = 0.0;
    for (const auto& [n, c] : coeffs_) sum += c * ipow(z, n);
    return sum;
}

double AveragedPolynomial::derivative(double z) const
{
    double sum = 0.0;
    for (const auto& [n, c] : coeffs_)
        if (n > 0) sum += n * c * ipow(z, n - 1);
    return sum;
}

double AveragedPolynomial::scale_at(double z) const
{
    double s = 0.0;
    for (const auto& [n, c] : coeffs_) s = std::max(s, std::abs(c) * ipow(z, n));
    return s;
}

AveragedPolynomial assemble_h(const CoefficientTable& table)
{
    std::map<int, double> sums;
    std::map<int, double> errs;
    std::map<int, std::vector<Monomial>> provenance;
    for (const auto& [key, entry] : table.entries) {
        const int n = key.i + 2 * key.j;
        sums[n] += entry.value;
        errs[n] += entry.err;
        provenance[n].push_back(key);
    }
    if (table.line == SwitchingLine::HorizontalY0) {
        for (auto it = sums.begin(); it != sums.end();) {
            if (it->first % 2 != 0) {
                ++it;
                continue;
            }
            if (std::abs(it->second) > 10.0 * errs[it->first])
                throw Error(ErrorKind::SymmetryViolation,
                            "coefficient of z^" + std::to_string(it->first) + " is " + std::to_string(it->second) +
                                " with error estimate " + std::to_string(errs[it->first]));
            it = sums.erase(it);
        }
    }
    return AveragedPolynomial(std::move(sums), std::move(provenance));
}

double h1_direct(const Problem& problem, const FlowFactor& ff, double z, double tol)
{
    if (!(z > 0.0)) throw Error(ErrorKind::InvalidArgument, "h1_direct needs z > 0");
    const auto breaks = mandatory_breaks(problem.line);
    double total = 0.0;
    for (Side side : {Side::Plus, Side::Minus}) {
        if (problem.p(side).empty() && problem.q(side).empty()) continue;
        const auto [lo, hi] = half_period(problem.line, side);
        auto f = [&](double s) {
            const double u = ff.value(s);
            return first_order_term(problem, side, s, u * z) / u;
        };
        total += quad::integrate(f, lo, hi, breaks, averaging_quad_options(tol)).value;
    }
    return total;
}

PerturbationWeight perturbation_weight(const FlowFactor& ff, SwitchingLine line, Component comp, Side side,
                                       int i, int j, double tol)
{
    if (i < 0 || j < 0 || i + j > BivarPoly::kMaxDegree)
        throw Error(ErrorKind::IndexOutOfRange,
                    "perturbation term (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (comp == Component::P) {
        const auto I = integrate_basis(ff, line, Basis::Phi, side, i, j + 1, tol);
        return {i + 2 * j + 2, I.value, I.err};
    }
    const auto I = integrate_basis(ff, line, Basis::Psi, side, i + 1, j, tol);
    return {i + 1 + 2 * j, -I.value, I.err};
}

}  // namespace avgcycles

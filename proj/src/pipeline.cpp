#include "avgcycles/pipeline.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include "avgcycles/error.hpp"
#include "avgcycles/parallel.hpp"

namespace avgcycles {

namespace {

using json = nlohmann::ordered_json;

class Stopwatch {
public:
    double lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

constexpr const char* kThm11Template = R"({
  "center": {"a": 1, "b": 1, "c": "-1/4", "d": 3},
  "switching_line": "x=0",
  "perturbation": {"p_plus": [], "p_minus": [], "q_plus": [], "q_minus": []}
})";

constexpr const char* kThm12Template = R"({
  "center": {"a": 1, "b": 1, "c": "-1/4", "d": 3},
  "switching_line": "y=0",
  "perturbation": {"p_plus": [], "p_minus": [], "q_plus": [], "q_minus": []}
})";

json number_or_null(double v)
{
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string coefficients_csv(const CoefficientTable& table)
{
    std::ostringstream os;
    os << "i,j,value,err\n";
    for (const auto& [key, e] : table.entries)
        os << key.i << ',' << key.j << ',' << format_number(e.value) << ',' << format_number(e.err) << '\n';
    return os.str();
}

std::string averaged_csv(const AveragedPolynomial& poly)
{
    std::ostringstream os;
    os << "n,coefficient\n";
    for (const auto& [n, c] : poly.coeffs()) os << n << ',' << format_number(c) << '\n';
    return os.str();
}

std::string roots_csv(const RootReport& report)
{
    std::ostringstream os;
    os << "z_star,h_deriv,simple\n";
    for (const auto& r : report.roots)
        os << format_number(r.z_star) << ',' << format_number(r.h_deriv) << ',' << (r.simple ? "true" : "false")
           << '\n';
    return os.str();
}

std::string flow_factor_csv(const FlowFactor& ff)
{
    std::ostringstream os;
    os << "theta,w,value\n";
    for (const auto& cp : ff.checkpoints())
        os << format_number(cp.theta) << ',' << format_number(cp.w) << ',' << format_number(std::exp(cp.w)) << '\n';
    return os.str();
}

std::string orbit_csv(const std::vector<OrbitSample>& samples)
{
    std::ostringstream os;
    os << "t,x,y\n";
    for (const auto& s : samples)
        os << format_number(s.t) << ',' << format_number(s.x) << ',' << format_number(s.y) << '\n';
    return os.str();
}

std::string step_log_csv(const std::vector<StepRecord>& steps)
{
    std::ostringstream os;
    os << "theta0,theta1\n";
    for (const auto& s : steps) os << format_number(s.theta0) << ',' << format_number(s.theta1) << '\n';
    return os.str();
}

std::string cycle_report_json(const CycleReport& report)
{
    json out;
    out["count_verified"] = report.count_verified;
    json recs = json::array();
    for (const auto& rec : report.records) {
        json r;
        r["z_star"] = rec.z_star;
        r["simple"] = rec.simple;
        r["verified"] = rec.verified();
        json fps = json::array();
        for (const auto& fp : rec.per_epsilon) {
            json f;
            f["epsilon"] = fp.epsilon;
            f["status"] = fp.verified() ? "VERIFIED" : "UNVERIFIED";
            f["z_hat"] = fp.z_hat ? json(*fp.z_hat) : json(nullptr);
            f["residual"] = fp.verified() ? json(fp.residual) : json(nullptr);
            f["window"] = {fp.window_lo, fp.window_hi};
            f["displacement_at_window"] = {number_or_null(fp.disp_lo), number_or_null(fp.disp_hi)};
            if (!fp.note.empty()) f["note"] = fp.note;
            fps.push_back(std::move(f));
        }
        r["fixed_points"] = std::move(fps);
        r["convergence_ratio"] = rec.convergence_ratio ? json(*rec.convergence_ratio) : json(nullptr);
        recs.push_back(std::move(r));
    }
    out["records"] = std::move(recs);
    return out.dump(2) + "\n";
}

std::string RunManifest::to_json() const
{
    json out;
    out["version"] = version;
    out["subcommand"] = subcommand;
    out["config"] = config_path;
    json tol = json::object();
    for (const auto& [k, v] : tolerances) tol[k] = v;
    out["tolerances"] = std::move(tol);
    json tim = json::object();
    for (const auto& [k, v] : timings_s) tim[k] = std::max(0.0, v);
    out["timings_s"] = std::move(tim);
    out["outputs"] = outputs;
    return out.dump(2) + "\n";
}

std::string_view to_string(Example which) noexcept { return which == Example::Thm11 ? "thm11" : "thm12"; }

Example parse_example(std::string_view name)
{
    if (name == "thm11") return Example::Thm11;
    if (name == "thm12") return Example::Thm12;
    throw Error(ErrorKind::InvalidArgument, "unknown example '" + std::string(name) + "' (expected thm11 or thm12)");
}

std::string example_template(Example which) { return which == Example::Thm11 ? kThm11Template : kThm12Template; }

std::vector<TargetTerm> example_targets(Example which)
{
    using C = Component;
    constexpr Side P = Side::Plus;
    if (which == Example::Thm11)
        return {{C::Q, P, 0, 0, -5040}, {C::P, P, 0, 0, 13068}, {C::P, P, 1, 0, -13132}, {C::P, P, 2, 0, 6769},
                {C::P, P, 3, 0, -1960},  {C::P, P, 2, 1, 322},    {C::P, P, 1, 2, -28},     {C::P, P, 0, 3, 1}};
    return {{C::Q, P, 0, 0, -6}, {C::P, P, 1, 0, 11}, {C::P, P, 1, 1, -6}, {C::P, P, 1, 2, 1}};
}

std::vector<std::pair<int, double>> example_expected_h(Example which)
{
    if (which == Example::Thm11)
        return {{1, -5040}, {2, 13068}, {3, -13132}, {4, 6769}, {5, -1960}, {6, 322}, {7, -28}, {8, 1}};
    return {{1, -6}, {3, 11}, {5, -6}, {7, 1}};
}

std::vector<double> example_expected_roots(Example which)
{
    if (which == Example::Thm11) return {1, 2, 3, 4, 5, 6, 7};
    return {1.0, std::sqrt(2.0), std::sqrt(3.0)};
}

std::vector<SolvedTerm> solve_targets(Problem& problem, const FlowFactor& ff, const std::vector<TargetTerm>& targets,
                                      double tol)
{
    std::vector<SolvedTerm> out(targets.size());
    parallel_for(targets.size(), [&](std::size_t k) {
        const auto& t = targets[k];
        const auto w = perturbation_weight(ff, problem.line, t.comp, t.side, t.i, t.j, tol);
        if (w.weight == 0.0)
            throw Error(ErrorKind::InvalidArgument, "target term has zero integral weight");
        out[k] = {t, w, t.target / w.weight};
    });
    for (const auto& s : out) {
        BivarPoly& poly = s.term.comp == Component::P
                              ? (s.term.side == Side::Plus ? problem.p_plus : problem.p_minus)
                              : (s.term.side == Side::Plus ? problem.q_plus : problem.q_minus);
        poly = poly.with_term(s.term.i, s.term.j, s.value);
    }
    return out;
}

std::vector<SymmetryAuditEntry> symmetry_audit(const FlowFactor& ff, double tol)
{
    std::vector<SymmetryAuditEntry> jobs;
    for (int total = 1; total <= 4; ++total)
        for (int i = 0; i <= total; i += 2) {
            const int j = total - i;
            for (Side side : {Side::Plus, Side::Minus}) {
                if (j >= 1) jobs.push_back({i, j, Basis::Phi, side, 0.0, 0.0});
                if (i >= 1) jobs.push_back({i, j, Basis::Psi, side, 0.0, 0.0});
            }
        }
    parallel_for(jobs.size(), [&](std::size_t k) {
        auto& e = jobs[k];
        const auto I = integrate_basis(ff, SwitchingLine::HorizontalY0, e.basis, e.side, e.i, e.j, tol);
        e.value = I.value;
        e.err = I.err;
    });
    return jobs;
}

ReproduceResult reproduce(Example which, const ReproduceOptions& opt)
{
    Stopwatch sw;
    std::vector<std::pair<std::string, double>> timings;
    Problem problem = parse_problem(example_template(which));
    FlowFactor ff = build_flow_factor(problem.params, base_angle(problem.line));
    timings.emplace_back("flow_factor", sw.lap());

    auto solved = solve_targets(problem, ff, example_targets(which), opt.tol);
    timings.emplace_back("solve_targets", sw.lap());

    auto table = compute_coefficient_table(problem, ff, opt.tol, opt.symmetry);
    auto h = assemble_h(table);
    timings.emplace_back("coefficients", sw.lap());

    std::vector<SymmetryAuditEntry> audit;
    if (which == Example::Thm12 && opt.symmetry == SymmetryMode::Check) {
        audit = symmetry_audit(ff, opt.tol);
        timings.emplace_back("symmetry_audit", sw.lap());
    }

    auto roots = isolate_positive_roots(h, opt.z_max);
    timings.emplace_back("roots", sw.lap());

    std::optional<CycleReport> cycles;
    if (!opt.skip_verify) {
        cycles = find_fixed_points(problem, ff, roots, opt.verify);
        timings.emplace_back("verify", sw.lap());
    }
    return ReproduceResult{which,          std::move(problem), std::move(ff),     std::move(solved),
                           std::move(table), std::move(h),     std::move(roots),  std::move(audit),
                           std::move(cycles), std::move(timings)};
}

std::vector<CriterionResult> evaluate_reproduction(const ReproduceResult& r)
{
    std::vector<CriterionResult> out;
    std::ostringstream os;

    {
        bool ok = true;
        double worst = 0.0;
        const auto expected = example_expected_h(r.which);
        for (const auto& [n, c] : expected) {
            const double rel = std::abs(r.h.coeff(n) - c) / std::abs(c);
            worst = std::max(worst, rel);
            ok = ok && rel <= 1e-6;
        }
        ok = ok && r.h.coeffs().size() == expected.size();
        os.str("");
        os << "max relative deviation " << format_number(worst) << ", " << r.h.coeffs().size() << " terms";
        out.push_back({"averaged coefficients", ok, os.str()});
    }
    {
        const auto expected = example_expected_roots(r.which);
        const auto found = r.roots.simple_roots();
        bool ok = found.size() == expected.size();
        double worst = 0.0;
        for (std::size_t k = 0; ok && k < expected.size(); ++k) {
            worst = std::max(worst, std::abs(found[k] - expected[k]));
            ok = worst <= 1e-8;
        }
        os.str("");
        os << found.size() << " simple roots, max deviation " << format_number(worst);
        out.push_back({"roots", ok, os.str()});
    }
    {
        const int expected = int(example_expected_roots(r.which).size());
        const int got = r.h.is_zero() ? 0 : descartes_bound(r.h);
        out.push_back({"sign-variation bound", got == expected, std::to_string(got)});
    }
    if (r.which == Example::Thm12 && !r.audit.empty()) {
        double worst = 0.0;
        for (const auto& e : r.audit) worst = std::max(worst, std::abs(e.value));
        out.push_back({"even-i integrals below 1e-8", worst < 1e-8, "max " + format_number(worst)});
    }
    if (r.cycles) {
        const int expected = int(example_expected_roots(r.which).size());
        const int got = r.cycles->count_verified;
        out.push_back({"verified cycles", got == expected, std::to_string(got) + " of " + std::to_string(expected)});
    }
    return out;
}

}  // namespace avgcycles

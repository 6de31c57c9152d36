#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "avgcycles/error.hpp"
#include "avgcycles/pipeline.hpp"

namespace fs = std::filesystem;
using namespace avgcycles;

namespace {

// Exit codes. Validation problems always map to kExitValidation.
constexpr int kExitCriteria = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCoefficients = 3;
constexpr int kExitRoots = 4;
constexpr int kExitVerify = 5;
constexpr int kExitOrbit = 6;
constexpr int kExitIo = 7;

struct StageError : std::runtime_error {
    int code;
    StageError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

bool is_validation(ErrorKind k)
{
    switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::CenterConditionViolated:
    case ErrorKind::DegreeExceeded:
    case ErrorKind::GNearZero:
        return true;
    default:
        return false;
    }
}

template <class F>
auto stage(int code, const char* name, F&& body) -> decltype(body())
{
    try {
        return body();
    } catch (const Error& e) {
        throw StageError(is_validation(e.kind()) ? kExitValidation : code, std::string(name) + ": " + e.what());
    }
}

struct Flags {
    std::string config;
    double tol = 1e-9;
    std::vector<double> eps;
    std::optional<double> zmax;
    std::string out;
    bool skip_verify = false;
    bool fast_symmetry = false;
    std::string flow_factor_dump;
    std::string step_log;
    double integrator_tol = 1e-11;
    double window = 50.0;
};

class Clock {
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

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StageError(kExitValidation, "cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Output {
public:
    Output(const Flags& f, std::string subcommand) : flags_(f)
    {
        manifest_.config_path = f.config;
        manifest_.subcommand = std::move(subcommand);
        manifest_.tolerances = {{"quadrature", f.tol}, {"integrator", f.integrator_tol}};
        if (!f.out.empty()) {
            std::error_code ec;
            fs::create_directories(f.out, ec);
            if (ec) throw StageError(kExitIo, "cannot create output directory '" + f.out + "'");
        }
    }

    // Writes to <out>/<name> when --out is set, else to stdout.
    void emit(const std::string& name, const std::string& content)
    {
        if (flags_.out.empty()) {
            std::cout << content;
            return;
        }
        write(fs::path(flags_.out) / name, content);
    }

    void write(const fs::path& path, const std::string& content)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw StageError(kExitIo, "cannot write '" + path.string() + "'");
        os << content;
        manifest_.outputs.push_back(path.string());
    }

    void timing(std::string name, double s) { manifest_.timings_s.emplace_back(std::move(name), s); }

    void finish()
    {
        if (!flags_.out.empty()) {
            const auto path = fs::path(flags_.out) / "manifest.json";
            manifest_.outputs.push_back(path.string());
            std::ofstream os(path, std::ios::binary);
            os << manifest_.to_json();
        }
    }

private:
    const Flags& flags_;
    RunManifest manifest_;
};

VerificationConfig verification_config(const Flags& f)
{
    VerificationConfig cfg;
    if (!f.eps.empty()) cfg.epsilons = f.eps;
    cfg.integrator_tol = f.integrator_tol;
    cfg.capture_window = f.window;
    return cfg;
}

SymmetryMode symmetry_mode(const Flags& f) { return f.fast_symmetry ? SymmetryMode::Skip : SymmetryMode::Check; }

Problem load_problem(const Flags& f)
{
    if (f.config.empty()) throw StageError(kExitValidation, "--config is required");
    const auto text = read_file(f.config);
    return stage(kExitValidation, "validate", [&] { return parse_problem(text); });
}

FlowFactor load_flow_factor(const Problem& pr, const Flags& f, Output& out)
{
    auto ff = stage(kExitValidation, "flow factor", [&] { return build_flow_factor(pr.params, base_angle(pr.line)); });
    if (!f.flow_factor_dump.empty()) out.write(f.flow_factor_dump, flow_factor_csv(ff));
    return ff;
}

int cmd_validate(const Flags& f)
{
    const auto pr = load_problem(f);
    const auto gm = stage(kExitValidation, "validate", [&] { return check_g_nonvanishing(pr.params); });
    std::cout << "OK\n"
              << "switching_line " << to_string(pr.line) << "\n"
              << "discriminant " << format_number(pr.params.discriminant()) << "\n"
              << "min_abs_g " << format_number(gm.min_abs_g) << " at theta " << format_number(gm.theta) << "\n";
    return 0;
}

int cmd_stages(const Flags& f, const std::string& name)
{
    Output out(f, name);
    Clock clock;
    const auto pr = load_problem(f);
    const auto ff = load_flow_factor(pr, f, out);
    out.timing("flow_factor", clock.lap());

    const auto table = stage(kExitCoefficients, "coefficients",
                             [&] { return compute_coefficient_table(pr, ff, f.tol, symmetry_mode(f)); });
    const auto h = stage(kExitCoefficients, "averaged", [&] { return assemble_h(table); });
    out.timing("coefficients", clock.lap());
    if (name == "coeffs" || name == "pipeline") out.emit("coefficients.csv", coefficients_csv(table));
    if (name == "averaged" || name == "pipeline") out.emit("averaged.csv", averaged_csv(h));
    if (name == "coeffs" || name == "averaged") {
        out.finish();
        return 0;
    }

    const auto roots = stage(kExitRoots, "roots", [&] { return isolate_positive_roots(h, f.zmax); });
    out.timing("roots", clock.lap());
    if (name == "roots" || name == "pipeline") {
        out.emit("roots.csv", roots_csv(roots));
        std::cerr << "descartes_bound " << (h.is_zero() ? 0 : descartes_bound(h)) << "\n";
    }
    if (name == "roots" || (name == "pipeline" && f.skip_verify)) {
        out.finish();
        return 0;
    }

    const auto cfg = verification_config(f);
    const auto report = stage(kExitVerify, "verify", [&] {
        cfg.validate();
        return find_fixed_points(pr, ff, roots, cfg);
    });
    out.timing("verify", clock.lap());
    out.emit("cycles.json", cycle_report_json(report));

    if (!f.step_log.empty()) {
        const double z = roots.roots.empty() ? 1.0 : roots.roots.front().z_star;
        PeriodOptions po;
        po.tol = f.integrator_tol;
        po.log_steps = true;
        const auto res = stage(kExitVerify, "step log",
                               [&] { return integrate_period_detailed(pr, ff, z, cfg.epsilons.back(), po); });
        out.write(f.step_log, step_log_csv(res.step_log));
    }
    out.finish();
    return 0;
}

int cmd_orbit(const Flags& f, double x0, double y0, double t_max)
{
    Output out(f, "orbit");
    Clock clock;
    const auto pr = load_problem(f);
    const double eps = f.eps.empty() ? 0.0 : f.eps.front();
    const auto samples =
        stage(kExitOrbit, "orbit", [&] { return cartesian_orbit(pr, x0, y0, eps, t_max, f.integrator_tol); });
    out.timing("orbit", clock.lap());
    out.emit("orbit.csv", orbit_csv(samples));
    out.finish();
    return 0;
}

int cmd_reproduce(const Flags& f, const std::string& which_name)
{
    const Example which = stage(kExitValidation, "reproduce", [&] { return parse_example(which_name); });
    Flags g = f;
    g.config = "<embedded " + which_name + ">";
    Output out(g, "reproduce " + which_name);

    ReproduceOptions opt;
    opt.tol = f.tol;
    opt.z_max = f.zmax;
    opt.skip_verify = f.skip_verify;
    opt.symmetry = symmetry_mode(f);
    opt.verify = verification_config(f);
    const auto result = stage(kExitCoefficients, "reproduce", [&] {
        opt.verify.validate();
        return reproduce(which, opt);
    });
    for (const auto& [k, v] : result.timings_s) out.timing(k, v);

    if (!f.out.empty()) {
        out.write(fs::path(f.out) / "problem.json", serialize_problem(result.problem));
        out.write(fs::path(f.out) / "coefficients.csv", coefficients_csv(result.table));
        out.write(fs::path(f.out) / "averaged.csv", averaged_csv(result.h));
        out.write(fs::path(f.out) / "roots.csv", roots_csv(result.roots));
        if (result.cycles) out.write(fs::path(f.out) / "cycles.json", cycle_report_json(*result.cycles));
    }

    std::cout << "solved perturbation (" << which_name << ")\n";
    for (const auto& s : result.solved)
        std::cout << "  " << (s.term.comp == Component::P ? "p" : "q") << to_string(s.term.side) << "[" << s.term.i
                  << "," << s.term.j << "]  weight " << format_number(s.weight.weight) << "  value "
                  << format_number(s.value) << "\n";
    std::cout << "h(z) =";
    for (const auto& [n, c] : result.h.coeffs()) std::cout << " " << format_number(c) << "*z^" << n;
    std::cout << "\n";

    bool all = true;
    for (const auto& c : evaluate_reproduction(result)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        all = all && c.passed;
    }
    out.finish();
    return all ? 0 : kExitCriteria;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Averaged limit-cycle prediction and verification for piecewise perturbed quasi-homogeneous centers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(AVGCYCLES_VERSION));

    Flags f;
    auto add_config = [&](CLI::App* c) { c->add_option("--config", f.config, "problem JSON document")->required(); };
    auto add_tol = [&](CLI::App* c) {
        c->add_option("--tol", f.tol, "absolute quadrature tolerance per integral")->check(CLI::PositiveNumber);
        c->add_flag("--fast-symmetry", f.fast_symmetry, "skip even-i integrals on the y=0 line");
        c->add_option("--dump-flow-factor", f.flow_factor_dump, "write flow factor checkpoints as CSV");
    };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", f.out, "output directory (default: stdout)"); };
    auto add_zmax = [&](CLI::App* c) {
        c->add_option("--zmax", f.zmax, "root search bound (default: Cauchy bound)")->check(CLI::PositiveNumber);
    };
    auto add_verify = [&](CLI::App* c) {
        c->add_option("--eps", f.eps, "comma separated, decreasing epsilon ladder")->delimiter(',');
        c->add_option("--integrator-tol", f.integrator_tol, "period integration tolerance")
            ->check(CLI::PositiveNumber);
        c->add_option("--window", f.window, "capture window in multiples of eps")->check(CLI::PositiveNumber);
        c->add_option("--step-log", f.step_log, "debug: write the step log of one period to this CSV");
    };

    auto* validate = app.add_subcommand("validate", "parse the problem and check the center and g != 0");
    add_config(validate);

    std::vector<std::pair<CLI::App*, std::string>> staged;
    for (const char* name : {"coeffs", "averaged", "roots", "verify", "pipeline"}) {
        auto* c = app.add_subcommand(name, "");
        add_config(c);
        add_tol(c);
        add_out(c);
        staged.emplace_back(c, name);
    }
    staged[0].first->description("averaging coefficients k_ij as CSV i,j,value,err");
    staged[1].first->description("averaged polynomial h(z) as CSV n,coefficient");
    staged[2].first->description("positive roots of h as CSV z_star,h_deriv,simple");
    staged[3].first->description("return-map fixed points near the predicted roots (JSON)");
    staged[4].first->description("all stages; writes every output into --out");
    for (int k = 2; k < 5; ++k) add_zmax(staged[k].first);
    for (int k = 3; k < 5; ++k) add_verify(staged[k].first);
    staged[4].first->add_flag("--skip-verify", f.skip_verify, "stop after the roots stage");

    auto* orbit = app.add_subcommand("orbit", "planar trajectory as CSV t,x,y");
    double x0 = 1.0, y0 = 0.0, t_max = 10.0;
    add_config(orbit);
    add_out(orbit);
    orbit->add_option("--x0", x0, "initial x");
    orbit->add_option("--y0", y0, "initial y");
    orbit->add_option("--tmax", t_max, "final time (negative integrates backwards)");
    orbit->add_option("--eps", f.eps, "perturbation size")->delimiter(',')->expected(1);
    orbit->add_option("--integrator-tol", f.integrator_tol, "integrator tolerance")->check(CLI::PositiveNumber);

    auto* repro = app.add_subcommand("reproduce", "run a worked example end to end and check its criteria");
    std::string which;
    repro->add_option("example", which, "thm11 or thm12")->required()->check(CLI::IsMember({"thm11", "thm12"}));
    add_tol(repro);
    add_out(repro);
    add_zmax(repro);
    add_verify(repro);
    repro->add_flag("--skip-verify", f.skip_verify, "skip the return-map stage");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(f);
        for (const auto& [c, name] : staged)
            if (c->parsed()) return cmd_stages(f, name);
        if (orbit->parsed()) return cmd_orbit(f, x0, y0, t_max);
        if (repro->parsed()) return cmd_reproduce(f, which);
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}

// Command-line driver: linear, semilinear, sweep, bounds, exponents, identity.

#include "mgt/config.hpp"
#include "mgt/errors.hpp"
#include "mgt/fit.hpp"
#include "mgt/functionals.hpp"
#include "mgt/iteration.hpp"
#include "mgt/report.hpp"
#include "mgt/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace mgt;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string config;
    std::string out;
    std::string format = "csv";
    int threads = 0;
};

void add_common(CLI::App* sub, CommonOptions& o, bool config_required = true) {
    auto* c = sub->add_option("--config", o.config, "JSON configuration file");
    if (config_required) c->required();
    c->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory (overrides output_dir)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", o.threads, "Worker threads (overrides threads)")->check(CLI::PositiveNumber);
}

SweepConfig load(const CommonOptions& o) {
    SweepConfig cfg = parse_config(o.config);
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.threads > 0) cfg.threads = o.threads;
    return cfg;
}

std::filesystem::path prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
    return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::string fmt(double v) { return format_double(v); }

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ReportContext context(const SweepConfig& cfg) {
    return ReportContext{cfg.n, cfg.solver.p, cfg.solver.beta, cfg.R};
}

// Writes rows either as CSV with a header or as a JSON array of objects.
void write_table(const std::filesystem::path& stem, OutputFormat format,
                 const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    if (format == OutputFormat::csv) {
        std::string text;
        for (std::size_t c = 0; c < header.size(); ++c) text += (c ? "," : "") + header[c];
        text += '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) text += (c ? "," : "") + fmt(row[c]);
            text += '\n';
        }
        write_text(stem.string() + ".csv", text);
    } else {
        json arr = json::array();
        for (const auto& row : rows) {
            json obj;
            for (std::size_t c = 0; c < row.size(); ++c) obj[header[c]] = nullable(row[c]);
            arr.push_back(obj);
        }
        write_text(stem.string() + ".json", arr.dump(2) + "\n");
    }
}

double first_eps(const SweepConfig& cfg) { return cfg.eps_list.front(); }

int cmd_linear(const CommonOptions& o) {
    SweepConfig cfg = load(o);
    const auto dir = prepare_dir(cfg.output_dir);
    const SpatialGrid grid = cfg.make_grid();
    const EvolutionState data = make_data(cfg.profile, cfg.R, grid, first_eps(cfg), data_options(cfg));
    const double beta = cfg.solver.beta;
    const double horizon = std::min(cfg.solver.t_max, grid.half_width() - cfg.R - 2.0 * grid.spacing());
    const double interval = cfg.solver.output_interval > 0 ? cfg.solver.output_interval : horizon / 100.0;
    const double E0 = energy_mgt(data, beta);

    std::vector<std::vector<double>> rows;
    double worst_energy = 0.0, worst_mass = 0.0;
    const int steps = static_cast<int>(std::ceil(horizon / interval - 1e-9));
    for (int k = 0; k <= steps; ++k) {
        const double t = std::min(k * interval, horizon);
        const EvolutionState s = propagate_linear(data, t, beta);
        const double E = energy_mgt(s, beta);
        const double mass = mass_outside_ball(s.u, cfg.R + t + 2.0 * grid.spacing());
        worst_energy = std::max(worst_energy, std::abs(E - E0) / std::max(E0, 1.0));
        worst_mass = std::max(worst_mass, mass);
        rows.push_back({t, E, support_radius(s.u), mass, s.u.max_abs()});
    }
    const auto format = output_format_from_string(o.format);
    write_table(dir / "linear", format, {"t", "energy", "support_radius", "exterior_mass", "max_abs_u"}, rows);
    std::cout << "linear: " << rows.size() << " samples to t = " << fmt(horizon)
              << ", max relative energy drift " << fmt(worst_energy)
              << ", max exterior mass fraction " << fmt(worst_mass) << '\n';
    return kExitOk;
}

int cmd_semilinear(const CommonOptions& o) {
    SweepConfig cfg = load(o);
    const auto dir = prepare_dir(cfg.output_dir);
    FunctionalTrace trace;
    Trajectory traj;
    const LifespanRecord rec = run_single(cfg, first_eps(cfg), &trace, &traj);
    if (rec.reason.rfind("error:", 0) == 0) throw NumericalFailure(rec.reason.substr(7));
    save_trajectory(traj, dir / "trajectory");
    emit_report({rec}, {}, {trace}, dir, output_format_from_string(o.format), context(cfg));
    std::cout << "semilinear: eps = " << fmt(rec.eps) << ", "
              << (rec.T_num ? "blow-up at t = " + fmt(*rec.T_num) + " (" + rec.reason + ")"
                            : std::string("no blow-up before t_max"))
              << ", " << traj.size() << " stored states\n";
    return kExitOk;
}

int cmd_sweep(const CommonOptions& o) {
    SweepConfig cfg = load(o);
    prepare_dir(cfg.output_dir);
    const SweepOutput out = run_sweep(cfg);

    std::vector<FitResult> fits;
    const std::size_t usable = fit_eligible(out.records).size();
    // n = 2 with p <= 2 follows a different, implicit lifespan law: no model is fitted.
    const bool no_model = cfg.mode == RunMode::subcritical && cfg.n == 2 && cfg.solver.p <= 2.0;
    if (usable >= 3 && !no_model) {
        if (cfg.mode == RunMode::critical)
            fits.push_back(fit_exp_law(out.records, cfg.solver.p));
        else
            fits.push_back(fit_power_law(out.records));
    }
    emit_report(out.records, fits, out.traces, cfg.output_dir, output_format_from_string(o.format),
                context(cfg));

    std::size_t errors = 0;
    for (const auto& r : out.records) {
        std::cout << "eps " << fmt(r.eps) << ": "
                  << (r.T_num ? "T = " + fmt(*r.T_num) : std::string("no blow-up")) << " [" << r.reason
                  << "]";
        if (r.gate_passed) std::cout << (*r.gate_passed ? " gate ok" : " gate failed");
        std::cout << '\n';
        if (r.reason.rfind("error:", 0) == 0) ++errors;
    }
    for (const auto& f : fits)
        std::cout << to_string(f.model) << ": exponent " << fmt(f.exponent) << ", r^2 " << fmt(f.r_squared)
                  << ", points " << f.n_points << '\n';
    if (errors) {
        std::cerr << errors << " run(s) failed; see lifespan.csv\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int cmd_bounds(const CommonOptions& o) {
    SweepConfig cfg = load(o);
    const auto dir = prepare_dir(cfg.output_dir);
    const double p = cfg.solver.p, beta = cfg.solver.beta;
    json summary;
    json per_eps = json::array();
    if (cfg.mode == RunMode::subcritical) {
        SubcriticalParams prm;
        prm.p = p;
        prm.n = cfg.n;
        prm.eps = first_eps(cfg);
        prm.R = cfg.R;
        prm.beta = beta;
        const auto seq = build_subcritical(prm);
        write_subcritical_csv(seq, dir / "subcritical.csv");
        summary = {{"mode", "subcritical"}, {"M", seq.M}, {"D", seq.D}, {"E0", seq.E0}, {"E1", seq.E1},
                   {"E2", nullable(seq.E2)}, {"j0", seq.j0}, {"eps0", nullable(seq.eps0)},
                   {"L_inf", seq.L_inf}};
        for (double e : cfg.eps_list) {
            const bool ok = std::isfinite(seq.eps0) && e <= seq.eps0;
            per_eps.push_back({{"eps", e}, {"lifespan_bound", ok ? json(subcritical_lifespan_bound(e, seq)) : json(nullptr)}});
        }
    } else {
        CriticalParams prm;
        prm.p = p;
        prm.n = cfg.n;
        prm.eps = first_eps(cfg);
        prm.beta = beta;
        const auto seq = build_critical(prm);
        write_critical_csv(seq, dir / "critical.csv");
        summary = {{"mode", "critical"}, {"D_hat", seq.D_hat}, {"N0", seq.N0}, {"N1", seq.N1},
                   {"t0", seq.t0}, {"j1", seq.j1}, {"eps0", seq.eps0}, {"Omega_inf", seq.Omega_inf},
                   {"at_strauss", seq.at_strauss}};
        for (double e : cfg.eps_list) {
            const bool ok = e <= seq.eps0;
            per_eps.push_back({{"eps", e}, {"log_lifespan_bound", ok ? json(critical_lifespan_bound_log(e, seq)) : json(nullptr)}});
        }
    }
    summary["eps"] = per_eps;
    write_text(dir / "bounds.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << '\n';
    return kExitOk;
}

int cmd_exponents(const CommonOptions& o) {
    std::optional<SweepConfig> cfg;
    if (!o.config.empty()) cfg = load(o);
    const std::filesystem::path dir = prepare_dir(cfg ? cfg->output_dir : std::filesystem::path(o.out.empty() ? "out" : o.out));
    const double p = cfg ? cfg->solver.p : 2.0;
    std::vector<std::vector<double>> rows;
    for (int n = 1; n <= 10; ++n) {
        const double th = theta(p, n);
        const double kappa = th > 0 ? subcritical_lifespan_exponent(p, n) : std::numeric_limits<double>::quiet_NaN();
        rows.push_back({double(n), strauss_exponent(n), glassey_exponent(n), p, th, kappa});
        std::cout << "n=" << n << "  p_Str=" << fmt(strauss_exponent(n)) << "  p_Gla=" << fmt(glassey_exponent(n))
                  << "  theta(" << fmt(p) << ")=" << fmt(th) << '\n';
    }
    write_table(dir / "exponents", output_format_from_string(o.format),
                {"n", "p_strauss", "p_glassey", "p", "theta", "lifespan_exponent"}, rows);
    return kExitOk;
}

int cmd_identity(const CommonOptions& o) {
    SweepConfig cfg = load(o);
    const auto dir = prepare_dir(cfg.output_dir);
    const SpatialGrid grid = cfg.make_grid();
    const double eps = first_eps(cfg);
    const EvolutionState profile = make_profile(cfg.profile, cfg.R, grid, data_options(cfg));
    EvolutionState data = profile;
    data.u *= eps;
    data.ut *= eps;
    data.utt *= eps;

    SolverConfig solver = cfg.solver;
    solver.output_interval = 0.0; // the memory term needs every step
    const Trajectory traj = step_solve(data, solver);

    AuxKernelParams kp;
    kp.r = (cfg.n - 1) / 2.0 - 1.0 / solver.p;
    kp.lambda0 = cfg.lambda0;
    kp.R = cfg.R;
    kp.quad_nodes = cfg.quad_nodes;

    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    const std::size_t samples = 10, last = traj.size() - 1;
    for (std::size_t k = 1; k <= samples && last > 0; ++k) {
        const std::size_t i = std::max<std::size_t>(1, k * last / samples);
        const double t = traj.times[i];
        const IdentitySides sides = critical_identity(traj, t, kp, profile, eps, solver.beta);
        const double rel = std::abs(sides.lhs - sides.rhs) / std::max(std::abs(sides.lhs), std::abs(sides.rhs));
        worst = std::max(worst, rel);
        rows.push_back({t, sides.lhs, sides.rhs, rel});
    }
    write_table(dir / "identity", output_format_from_string(o.format), {"t", "lhs", "rhs", "rel_diff"}, rows);
    std::cout << "identity: " << rows.size() << " times, max relative mismatch " << fmt(worst) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moore-Gibson-Thompson semilinear solver and lifespan experiments"};
    app.require_subcommand(1);

    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const CommonOptions&);
        bool config_required;
    };
    const Cmd cmds[] = {
        {"linear", "Exact linear propagation with energy and support report", cmd_linear, true},
        {"semilinear", "Single semilinear run with functional traces", cmd_semilinear, true},
        {"sweep", "Lifespan sweep over eps_list with fits and envelopes", cmd_sweep, true},
        {"bounds", "Lower-bound iteration tables", cmd_bounds, true},
        {"exponents", "Strauss, Glassey and theta table for n = 1..10", cmd_exponents, false},
        {"identity", "Integral identity check for the weighted functional", cmd_identity, true},
    };
    std::vector<CommonOptions> opts(std::size(cmds));
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(cmds); ++i) {
        subs.push_back(app.add_subcommand(cmds[i].name, cmds[i].help));
        add_common(subs.back(), opts[i], cmds[i].config_required);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return cmds[i].run(opts[i]);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const SpectralSymmetryError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const PicardDivergence& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

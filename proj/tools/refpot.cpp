// Command-line front end: one subcommand per pipeline stage, deterministic
// CSV outputs, machine-readable errors. Exit codes: 0 ok, 1 validation
// failure, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "refpot/csvio.hpp"
#include "refpot/report.hpp"

namespace fs = std::filesystem;
using namespace refpot;

namespace {

struct Cli {
    std::string config;
    std::string out_dir = ".";
    double tol_abs = 1e-12, tol_rel = 1e-10;
    double k_min = 1e-5, k_max = 75000.0;
    int points = 1100;
    double ka = 75000.0;
    std::string kernel_grid = "0.5:10:50";
    std::vector<double> check_direct;
    unsigned threads = 0;
};

io::RunManifest manifest_for(const Cli& cli, const std::string& sub,
                             const ReferencePotential& pot) {
    io::RunManifest m;
    m.subcommand = sub;
    m.config_path = cli.config;
    m.config_fingerprint = pot.fingerprint();
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "tol_abs=%.3e;tol_rel=%.3e;k_min=%.12e;k_max=%.12e;points=%d;ka=%.12e;grid=%s",
                  cli.tol_abs, cli.tol_rel, cli.k_min, cli.k_max, cli.points, cli.ka,
                  cli.kernel_grid.c_str());
    m.options = buf;
    return m;
}

spectral::KernelGridSpec parse_grid(const std::string& s) {
    spectral::KernelGridSpec g;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d", &g.r_min, &g.r_max, &g.n) != 3)
        throw PotentialError("bad --kernel-grid, expected r_min:r_max:n");
    return g;
}

report::PipelineOptions pipeline_options(const Cli& cli) {
    report::PipelineOptions o;
    o.k_min = cli.k_min;
    o.k_max = cli.k_max;
    o.curve_points = cli.points;
    o.k_a = cli.ka;
    o.threads = cli.threads;
    return o;
}

void write_potential_csv(const Cli& cli, const ReferencePotential& pot, const std::string& name) {
    io::Csv csv(name, manifest_for(cli, "potential", pot),
                {"r(angstrom)", "V(meV)", "dV(meV/angstrom)", "d2V(meV/angstrom^2)"});
    for (int i = 0; i <= 2400; ++i) {
        double r = 12.0 * double(i) / 2400.0;
        csv.row({io::fmt(r), io::fmt(pot.eval(r, 0)), io::fmt(pot.eval(r, 1)),
                 io::fmt(pot.eval(r, 2))});
    }
}

void write_bound_csv(const Cli& cli, const ReferencePotential& pot,
                     const boundstates::BoundSpectrum& sp, const std::string& name) {
    io::Csv csv(name, manifest_for(cli, "bound-states", pot),
                {"n", "E_n(meV)", "gamma(1/angstrom)", "C_n(1/angstrom^3)"});
    for (const auto& st : sp.states)
        csv.row({std::to_string(st.n), io::fmt(st.energy), io::fmt(st.gamma),
                 st.has_norming ? io::fmt_log(st.log_norming) : "nan"});
}

void write_phase_csv(const Cli& cli, const ReferencePotential& pot,
                     const phaseshift::PhaseShiftCurve& curve, const std::string& name) {
    io::Csv csv(name, manifest_for(cli, "phase-shift", pot),
                {"k(1/angstrom)", "E(meV)", "delta(rad)", "method"});
    for (std::size_t i = 0; i < curve.k.size(); ++i)
        csv.row({io::fmt(curve.k[i]), io::fmt(curve.energy_of(i, pot.c_const())),
                 io::fmt(curve.delta[i]),
                 curve.method[i] == phaseshift::Method::ode_tail ? "ode_tail" : "asymptotic"});
}

void write_jost_csv(const Cli& cli, const ReferencePotential& pot, const jost::JostCurve& jc,
                    const std::string& name) {
    io::Csv csv(name, manifest_for(cli, "jost", pot),
                {"E(meV)", "F_abs", "ln_F", "g", "route"});
    for (std::size_t i = 0; i < jc.energy.size(); ++i)
        csv.row({io::fmt(jc.energy[i]), io::fmt_log(jc.ln_f[i]), io::fmt(jc.ln_f[i]),
                 io::fmt(jc.g[i]), jc.route[i] == 'd' ? "dispersion" : "asymptotic"});
}

void write_g_csv(const Cli& cli, const ReferencePotential& pot, const jost::JostCurve& jc,
                 const std::string& name) {
    io::Csv csv(name, manifest_for(cli, "g-function", pot), {"k(1/angstrom)", "E(meV)", "g"});
    for (std::size_t i = 0; i < jc.energy.size(); ++i)
        csv.row({io::fmt(std::sqrt(jc.energy[i] / pot.c_const())), io::fmt(jc.energy[i]),
                 io::fmt(jc.g[i])});
}

int run_subcommand(const Cli& cli, const std::string& sub) {
    auto pot = load_config(cli.config);
    fs::create_directories(cli.out_dir);
    auto path = [&](const std::string& f) { return (fs::path(cli.out_dir) / f).string(); };

    if (sub == "potential") {
        write_potential_csv(cli, pot, path("potential.csv"));
        std::cout << "wrote " << path("potential.csv") << "\n";
        return 0;
    }
    if (sub == "bound-states") {
        auto sp = boundstates::find_eigenvalues(pot);
        boundstates::fill_norming_constants(pot, sp);
        write_bound_csv(cli, pot, sp, path("bound_states.csv"));
        std::cout << "wrote " << path("bound_states.csv") << " (" << sp.states.size()
                  << " states)\n";
        return 0;
    }

    auto opts = pipeline_options(cli);
    if (sub == "phase-shift") {
        phaseshift::CurveOptions copts;
        copts.threads = cli.threads;
        auto curve = phaseshift::build_curve(pot, cli.k_min, cli.k_max, cli.points, copts);
        write_phase_csv(cli, pot, curve, path("phase_shift.csv"));
        std::cout << "wrote " << path("phase_shift.csv") << " (k_switch = " << curve.k_switch
                  << ")\n";
        return 0;
    }
    if (sub == "levinson") {
        auto sp = boundstates::find_eigenvalues(pot);
        phaseshift::CurveOptions copts;
        copts.threads = cli.threads;
        auto curve = phaseshift::build_curve(pot, cli.k_min, std::min(cli.k_max, 100.0),
                                             std::max(cli.points / 4, 64), copts);
        double res = phaseshift::levinson_residual(curve, int(sp.states.size()));
        io::Csv csv(path("levinson.csv"), manifest_for(cli, "levinson", pot),
                    {"n_bound", "delta_kmin(rad)", "residual(rad)"});
        csv.row({std::to_string(sp.states.size()), io::fmt(curve.delta.front()), io::fmt(res)});
        std::cout << "n = " << sp.states.size() << ", residual = " << io::fmt(res) << " rad\n";
        return 0;
    }

    // the remaining subcommands need the full pipeline
    auto pipe = report::run_pipeline(pot, opts);
    if (sub == "jost" || sub == "g-function") {
        write_jost_csv(cli, pot, pipe.jcurve, path("jost.csv"));
        if (sub == "g-function") write_g_csv(cli, pot, pipe.jcurve, path("g_function.csv"));
        for (double k : cli.check_direct) {
            auto d = jost::jost_direct(pot, k);
            std::cout << "k = " << io::fmt(k) << ": ln|F| = " << io::fmt(d.log_modulus)
                      << ", arg F = " << io::fmt(d.arg) << "\n";
        }
        std::cout << "wrote " << path("jost.csv") << "\n";
        return 0;
    }
    if (sub == "gl-kernel") {
        spectral::GFunction g(pipe.jcurve, pot);
        auto cont = spectral::continuum_for(g, pot, cli.ka);
        auto grid = spectral::build_kernel_grid(parse_grid(cli.kernel_grid), cont, pipe.spectrum,
                                                {cli.tol_abs, cli.tol_rel}, cli.threads);
        spectral::export_kernel(grid, path("gl_kernel.txt"));
        std::cout << "wrote " << path("gl_kernel.txt") << "\n";
        return 0;
    }
    if (sub == "report") {
        write_potential_csv(cli, pot, path("fig1_potential.csv"));
        write_bound_csv(cli, pot, pipe.spectrum, path("bound_states.csv"));
        write_phase_csv(cli, pot, pipe.curve, path("fig2_phase_shift.csv"));
        {
            io::Csv csv(path("fig3_asymptotics.csv"), manifest_for(cli, "report", pot),
                        {"k(1/angstrom)", "delta_ode_tail(rad)", "delta_series(rad)"});
            for (std::size_t i = 0; i < pipe.curve.band_k.size(); ++i)
                csv.row({io::fmt(pipe.curve.band_k[i]), io::fmt(pipe.curve.band_ode[i]),
                         io::fmt(pipe.curve.band_asym[i])});
        }
        write_jost_csv(cli, pot, pipe.jcurve, path("fig4_jost.csv"));
        write_g_csv(cli, pot, pipe.jcurve, path("fig5_g_function.csv"));
        spectral::GFunction g(pipe.jcurve, pot);
        auto cont = spectral::continuum_for(g, pot, cli.ka);
        auto grid = spectral::build_kernel_grid(parse_grid(cli.kernel_grid), cont, pipe.spectrum,
                                                {cli.tol_abs, cli.tol_rel}, cli.threads);
        spectral::export_kernel(grid, path("gl_kernel.txt"));

        auto checks = report::acceptance_checks(pipe);
        std::ofstream summary(path("summary.txt"));
        bool all = true;
        for (const auto& c : checks) {
            char line[256];
            std::snprintf(line, sizeof line, "%s %-42s value=%.6g target=%.6g %s",
                          c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.target,
                          c.detail.c_str());
            std::cout << line << "\n";
            summary << line << "\n";
            all = all && c.pass;
        }
        std::cout << (all ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << "\n";
        return all ? 0 : 1;
    }
    throw PotentialError("unknown subcommand " + sub);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reference-potential scattering toolkit"};
    app.require_subcommand(1);
    Cli cli;
    std::vector<CLI::App*> subs;
    for (const char* name : {"potential", "bound-states", "phase-shift", "jost", "g-function",
                             "gl-kernel", "levinson", "report"}) {
        auto* s = app.add_subcommand(name);
        s->add_option("--config", cli.config)->required();
        s->add_option("--out-dir", cli.out_dir);
        s->add_option("--tol-abs", cli.tol_abs);
        s->add_option("--tol-rel", cli.tol_rel);
        s->add_option("--k-min", cli.k_min);
        s->add_option("--k-max", cli.k_max);
        s->add_option("--points", cli.points);
        s->add_option("--ka", cli.ka);
        s->add_option("--kernel-grid", cli.kernel_grid);
        s->add_option("--check-direct", cli.check_direct)->delimiter(',');
        s->add_option("--threads", cli.threads);
        subs.push_back(s);
    }
    CLI11_PARSE(app, argc, argv);
    std::string sub = app.get_subcommands().front()->get_name();
    try {
        return run_subcommand(cli, sub);
    } catch (const PotentialError& e) {
        std::cerr << "{\"error\": \"validation\", \"message\": \"" << e.what() << "\"}\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": \"numerical\", \"message\": \"" << e.what() << "\"}\n";
        return 2;
    }
}

#include "refpot/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace refpot::report {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

const std::vector<double>& xe2_reference_levels() {
    static const std::vector<double> levels = {
        -23.043278, -20.618294, -18.347033, -16.229494, -14.266840, -12.457771,
        -10.802778, -9.301735,  -7.954433,  -6.760559,  -5.718592,  -4.817731,
        -4.028060,  -3.328990,  -2.712825,  -2.171217,  -1.698210,  -1.289229,
        -0.940193,  -0.647734,  -0.409167,  -0.222466,  -0.086525,  -0.002574};
    return levels;
}

Pipeline::Pipeline(ReferencePotential p, PipelineOptions o) : pot(std::move(p)), opts(o) {}

Pipeline run_pipeline(const ReferencePotential& pot, const PipelineOptions& opts) {
    Pipeline pipe(pot, opts);

    auto t0 = std::chrono::steady_clock::now();
    pipe.spectrum = boundstates::find_eigenvalues(pot);
    boundstates::fill_norming_constants(pot, pipe.spectrum);
    pipe.eigen_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    phaseshift::CurveOptions copts;
    copts.threads = opts.threads;
    copts.ode_tol = opts.ode_tol;
    copts.k_switch = opts.k_switch;
    pipe.curve = phaseshift::build_curve(pot, opts.k_min, opts.k_max, opts.curve_points, copts);

    pipe.interp_ = std::make_shared<jost::PhaseInterpolant>(pipe.curve, pot.c_const());

    jost::JostCurveOptions jopts;
    jopts.k_a = opts.k_a;
    jopts.points = opts.jost_points;
    jopts.threads = opts.threads;
    pipe.jcurve = jost::build_jost_curve(pot, pipe.spectrum, pipe.interp(), jopts);
    return pipe;
}

namespace {

CheckResult check(const std::string& name, double value, double target, bool pass,
                  const std::string& detail = "") {
    return {name, pass, value, target, detail};
}

// ---- criterion 1: eigenvalue regression --------------------------------
void eigenvalue_checks(const Pipeline& pipe, std::vector<CheckResult>& out) {
    const auto& ref = xe2_reference_levels();
    const auto& st = pipe.spectrum.states;
    bool count_ok = st.size() == ref.size();
    out.push_back(check("eigenvalue count = 24", double(st.size()), double(ref.size()), count_ok));
    double worst = 0, worst23 = 0;
    if (count_ok) {
        for (std::size_t n = 0; n < ref.size(); ++n) {
            double d = std::abs(st[n].energy - ref[n]);
            if (n == 23)
                worst23 = d;
            else
                worst = std::max(worst, d);
        }
    }
    out.push_back(check("eigenvalues |dE| (n <= 22)", worst, 5e-3, count_ok && worst <= 5e-3,
                        "max deviation from the reference table, meV"));
    out.push_back(check("eigenvalue |dE| (n = 23)", worst23, 5e-4, count_ok && worst23 <= 5e-4,
                        "near-threshold level, meV"));
    out.push_back(check("eigenvalue runtime (s)", pipe.eigen_seconds, 60.0,
                        pipe.eigen_seconds < 60.0));
}

// ---- criterion 2: pseudo-Morse piece alone binds nothing ----------------
void pseudo_morse_check(const Pipeline& pipe, std::vector<CheckResult>& out) {
    const auto& c0 = pipe.pot.components().front();
    // same shape shifted so the threshold sits at zero
    MorseComponent shifted{-c0.d, c0.d, c0.alpha, c0.r0, 0};
    ReferencePotential alone({shifted}, {}, pipe.pot.c_const(), true);
    auto sp = boundstates::find_eigenvalues(alone);
    out.push_back(check("pseudo-Morse piece alone: bound states", double(sp.states.size()), 0.0,
                        sp.states.empty()));
}

// ---- criteria 3-5: Levinson, zero crossing, low-energy law --------------
void phase_checks(const Pipeline& pipe, std::vector<CheckResult>& out) {
    const int nb = static_cast<int>(pipe.spectrum.states.size());
    double lev = phaseshift::levinson_residual(pipe.curve, nb);
    out.push_back(check("Levinson: |delta(k_min) - 24 pi|", std::abs(lev), 1e-3,
                        std::abs(lev) <= 1e-3, "rad"));
    double closure = 1e300;
    for (std::size_t i = 0; i < pipe.curve.band_k.size(); ++i) {
        if (pipe.curve.band_k[i] >= pipe.curve.k_switch)
            closure = std::min(closure,
                               std::abs(pipe.curve.band_ode[i] - pipe.curve.band_asym[i]));
    }
    out.push_back(check("Levinson: asymptotic-closure residual", closure, 1e-3, closure <= 1e-3,
                        "route agreement at the hand-over, rad"));

    const auto& interp = pipe.interp();
    double e_zero = numerics::find_root([&](double e) { return interp(e); }, 2.2, 4.2,
                                        {1e-10, 1e-12});
    out.push_back(check("phase zero crossing E (meV)", e_zero, 3.146294,
                        std::abs(e_zero - 3.146294) <= 0.05, "target 3.146294 +- 0.05"));

    auto fit = phaseshift::scattering_length_window(pipe.curve, nb, pipe.curve.k.front(),
                                                    10.0 * pipe.curve.k.front());
    out.push_back(check("low-energy law max residual", fit.max_residual, 1e-3,
                        fit.max_residual <= 1e-3,
                        "R0 = " + num(fit.R0) + " A over the smallest-k decade"));
}

// ---- criterion 6: high-energy asymptotics -------------------------------
void asymptotics_checks(const Pipeline& pipe, std::vector<CheckResult>& out) {
    double band_max = 0;
    int band_n = 0;
    for (std::size_t i = 0; i < pipe.curve.band_k.size(); ++i) {
        double k = pipe.curve.band_k[i];
        if (k >= pipe.curve.k_switch && k <= pipe.opts.k_a + 1e-9) {
            band_max = std::max(band_max,
                                std::abs(pipe.curve.band_ode[i] - pipe.curve.band_asym[i]));
            ++band_n;
        }
    }
    out.push_back(check("overlap band |ode+tail - series|", band_max, 1e-4,
                        band_n > 0 && band_max <= 1e-4,
                        num(band_n) + " band points up to k_a"));

    // odd-power structure: fit delta*k on {1, x, x^2, sqrt(x)}, x = 1/k^2,
    // over [k_a, 10 k_a]; the sqrt(x) column is the even-power intruder.
    const int m = 7;
    std::vector<double> ks(m), dk(m);
    phaseshift::TailClosure closure(pipe.pot);
    closure.prepare(pipe.opts.k_a, 10.0 * pipe.opts.k_a);
    for (int i = 0; i < m; ++i) {
        ks[std::size_t(i)] = pipe.opts.k_a * std::pow(10.0, double(i) / double(m - 1));
        double kk = ks[std::size_t(i)];
        double d = phaseshift::delta_at(pipe.pot, kk, pipe.opts.ode_tol, &closure);
        dk[std::size_t(i)] = d * kk;
    }
    // normal equations for [c0, c1, c2, e]
    double A[4][4] = {}, b[4] = {};
    for (int i = 0; i < m; ++i) {
        double x = 1.0 / (ks[std::size_t(i)] * ks[std::size_t(i)]);
        double phi[4] = {1.0, x, x * x, std::sqrt(x)};
        for (int a = 0; a < 4; ++a) {
            b[a] += phi[a] * dk[std::size_t(i)];
            for (int c = 0; c < 4; ++c) A[a][c] += phi[a] * phi[c];
        }
    }
    // Gaussian elimination
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < 4; ++r) {
            double f = A[r][col] / A[col][col];
            for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    double sol[4];
    for (int r = 3; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 4; ++c) s -= A[r][c] * sol[c];
        sol[r] = s / A[r][r];
    }
    double even_share = 0;
    for (int i = 0; i < m; ++i) {
        double x = 1.0 / (ks[std::size_t(i)] * ks[std::size_t(i)]);
        even_share = std::max(even_share,
                              std::abs(sol[3] * std::sqrt(x)) / std::abs(dk[std::size_t(i)]));
    }
    out.push_back(check("odd-power structure: even-term share", even_share, 1e-6,
                        even_share <= 1e-6, "relative, fit over [k_a, 10 k_a]"));
}

// ---- criterion 7: unit convention ---------------------------------------
void unit_check(const Pipeline& pipe, std::vector<CheckResult>& out) {
    double e_a_eV = pipe.pot.c_const() * pipe.opts.k_a * pipe.opts.k_a * 1e-3;
    double rel = std::abs(e_a_eV / 1.8e5 - 1.0);
    out.push_back(check("E_a = C k_a^2 vs 1.8e5 eV", rel, 0.02, rel <= 0.02,
                        "E_a = " + num(e_a_eV) + " eV"));
}

// ---- criterion 8: dual-route Jost asymptotics ---------------------------
void dual_route_checks(const Pipeline& pipe, std::vector<CheckResult>& out) {
    auto pr = jost::asymptotics_from_potential(pipe.pot);
    double e_a = pipe.pot.c_const() * pipe.opts.k_a * pipe.opts.k_a;
    auto ph = jost::asymptotics_from_phase(pipe.interp(), pipe.spectrum, e_a, pipe.curve.coeffs);
    auto ph2 = jost::asymptotics_from_phase(pipe.interp(), pipe.spectrum, 2.0 * e_a,
                                            pipe.curve.coeffs);
    double d2 = std::abs(ph.a2 / pr.a2 - 1.0);
    double d4 = std::abs(ph.a4 / pr.a4 - 1.0);
    double inv = std::abs(ph2.a2 / ph.a2 - 1.0);
    out.push_back(check("dual-route a2 agreement", d2, 5e-3, d2 <= 5e-3,
                        "phase route vs potential route, relative"));
    out.push_back(check("dual-route a4 agreement", d4, 2e-2, d4 <= 2e-2, "relative"));
    out.push_back(check("a2 invariance under E_a -> 2 E_a", inv, 1e-3, inv <= 1e-3, "relative"));
}

// ---- criterion 9: Jost triangle ------------------------------------------
void triangle_checks(const Pipeline& pipe, std::vector<CheckResult>& out) {
    phaseshift::TailClosure closure(pipe.pot);
    closure.prepare(0.5, 5.0);
    double e_a = pipe.pot.c_const() * pipe.opts.k_a * pipe.opts.k_a;
    double worst_arg = 0, worst_mod = 0;
    for (double k : {0.5, 1.0, 2.0, 5.0}) {
        auto direct = jost::jost_direct(pipe.pot, k);
        double delta = phaseshift::delta_at(pipe.pot, k, pipe.opts.ode_tol, &closure);
        double darg = std::remainder(direct.arg + delta, 2.0 * M_PI);
        worst_arg = std::max(worst_arg, std::abs(darg));
        double ln27 = jost::ln_jost_modulus(pipe.pot.c_const() * k * k, pipe.spectrum,
                                            pipe.interp(), e_a);
        worst_mod = std::max(worst_mod, std::abs(direct.log_modulus - ln27));
    }
    out.push_back(check("triangle: |arg F_direct + delta| mod 2pi", worst_arg, 5e-3,
                        worst_arg <= 5e-3, "rad, k in {0.5, 1, 2, 5}"));
    out.push_back(check("triangle: |ln F_direct - ln F_dispersion|", worst_mod,
                        std::log(1.005), worst_mod <= std::log(1.005),
                        "modulus agreement within 0.5%"));
}

// ---- criterion 10: g-function tail and identity --------------------------
void g_checks(const Pipeline& pipe, std::vector<CheckResult>& out) {
    double worst_id = 0;
    for (std::size_t i = 0; i < pipe.jcurve.energy.size(); ++i) {
        double want = std::expm1(-2.0 * pipe.jcurve.ln_f[i]);
        double den = std::max(std::abs(want), 1e-30);
        worst_id = std::max(worst_id, std::abs(pipe.jcurve.g[i] - want) / den);
    }
    out.push_back(check("identity g = |F|^-2 - 1", worst_id, 1e-14, worst_id <= 1e-14,
                        "pointwise on the emitted grid"));

    const double C = pipe.pot.c_const();
    double v0 = pipe.pot.moments().V0 / C;
    double k_top = std::sqrt(pipe.jcurve.energy.back() / C);
    double g_top = pipe.jcurve.g.back();
    double rel = std::abs((-k_top * k_top * g_top) / (v0 / 2.0) - 1.0);
    bool monotone = true;
    double prev = 1e300;
    for (std::size_t i = 0; i < pipe.jcurve.energy.size(); ++i) {
        double k = std::sqrt(pipe.jcurve.energy[i] / C);
        if (k < pipe.opts.k_a) continue;
        double dev = std::abs((-k * k * pipe.jcurve.g[i]) / (v0 / 2.0) - 1.0);
        if (dev > prev * (1 + 1e-9)) monotone = false;
        prev = dev;
    }
    out.push_back(check("k^2 g -> -V(0)/(2C) limit", rel, 1e-3, rel <= 1e-3 && monotone,
                        "relative at the grid top; approach monotone for k >= k_a"));
}

// ---- criterion 11: GL kernel properties -----------------------------------
void kernel_checks(const Pipeline& pipe, std::vector<CheckResult>& out) {
    spectral::GFunction g(pipe.jcurve, pipe.pot);
    auto cont = spectral::continuum_for(g, pipe.pot, pipe.opts.k_a);
    numerics::Tolerance ktol{1e-10, 1e-8};

    spectral::KernelGridSpec spec;
    spec.r_min = 0.5;
    spec.r_max = 10.0;
    spec.n = 50;
    auto grid = spectral::build_kernel_grid(spec, cont, pipe.spectrum, ktol, pipe.opts.threads);
    // independent symmetry probes
    double worst_sym = 0;
    for (int t = 0; t < 24; ++t) {
        double r = 0.5 + 9.5 * double(t % 5) / 4.0;
        double rp = 0.5 + 9.5 * double((t * 7 + 3) % 11) / 10.0;
        double a = spectral::gl_kernel(r, rp, cont, pipe.spectrum, ktol);
        double b = spectral::gl_kernel(rp, r, cont, pipe.spectrum, ktol);
        worst_sym = std::max(worst_sym, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30}));
    }
    out.push_back(check("kernel symmetry", worst_sym, 1e-8, worst_sym <= 1e-8,
                        "relative, independent (r, r') probes"));

    double g1 = spectral::gl_kernel(4.0, 4.5, cont, pipe.spectrum, ktol);
    auto cont2 = cont;
    cont2.k_cut = 2.0 * cont.k_cut;
    double g2 = spectral::gl_kernel(4.0, 4.5, cont2, pipe.spectrum, ktol);
    double stab = std::abs(g2 - g1) / std::max(std::abs(g1), 1e-30);
    out.push_back(check("kernel k_cut-doubling stability", stab, 1e-6, stab <= 1e-6,
                        "relative at (4.0, 4.5) A; G = " + num(g1)));

    // free-particle annihilation
    boundstates::BoundSpectrum empty;
    spectral::ContinuumSpec zero;
    zero.g = [](double) { return 0.0; };
    zero.k_cut = cont.k_cut;
    zero.g_analytic_tail = [](double) { return 0.0; };
    zero.tail_k2 = 0.0;
    double gfree = spectral::gl_kernel(3.0, 7.0, zero, empty, ktol);
    out.push_back(check("free-particle kernel", std::abs(gfree), 0.0, gfree == 0.0, "exact zero"));

    // single artificial bound state against the closed form
    boundstates::BoundSpectrum one;
    boundstates::BoundState st;
    st.gamma = 0.8;
    st.log_norming = std::log(0.37);
    st.has_norming = true;
    one.states.push_back(st);
    double gb = spectral::gl_kernel(1.2, 2.3, zero, one, ktol);
    double want = 0.37 / (4 * 0.8 * 0.8) * std::sinh(0.8 * 1.2) * std::sinh(0.8 * 2.3);
    double derr = std::abs(gb / want - 1.0);
    out.push_back(check("single-bound-state kernel closed form", derr, 1e-14, derr <= 1e-14,
                        "relative"));
}

// ---- criterion 12: numerics oracles ---------------------------------------
void numerics_checks(const Pipeline& pipe, std::vector<CheckResult>& out) {
    // moment closed forms vs adaptive quadrature
    auto mo = pipe.pot.moments();
    auto& pot = pipe.pot;
    numerics::Tolerance qt{1e-13, 1e-13};
    double W = numerics::adaptive_quadrature_log([&](double r) { return pot.eval(r, 0); }, 0.0,
                                                 200.0, qt);
    double U = numerics::adaptive_quadrature_log(
        [&](double r) { double v = pot.eval(r, 0); return v * v; }, 0.0, 200.0, qt);
    double rel = std::max(std::abs(W / mo.W - 1.0), std::abs(U / mo.U - 1.0));
    out.push_back(check("moments: closed form vs quadrature", rel, 1e-10, rel <= 1e-10,
                        "relative on W and U"));

    // Numerov order of convergence on the free particle
    auto order = [&](double h) {
        double k = 1.3, L = 10.0;
        std::size_t n = std::size_t(L / h) + 1;
        std::vector<double> q(n, -k * k);
        auto res = numerics::numerov_propagate(q, h, std::sin(0.0), std::sin(k * h));
        double r_end = h * double(n - 1);
        return std::abs(res.u[n - 1] * std::exp(res.log_scale) - std::sin(k * r_end));
    };
    double e1 = order(4e-2), e2 = order(2e-2);
    double slope = std::log2(e1 / e2);
    out.push_back(check("Numerov convergence order", slope, 4.0, slope >= 3.7,
                        "error slope under h-halving"));

    // adaptive ODE engine order (fixed comparison against exp)
    numerics::Tolerance loose{1e-6, 1e-6}, tight{1e-12, 1e-12};
    double yl = numerics::integrate_ode([](double, double y) { return -y; }, 1.0, 0.0, 1.0, loose);
    double yt = numerics::integrate_ode([](double, double y) { return -y; }, 1.0, 0.0, 1.0, tight);
    double el = std::abs(yl - std::exp(-1.0)), et = std::abs(yt - std::exp(-1.0));
    out.push_back(check("ODE tolerance scaling", et, 1e-12, et < 1e-12 && el < 1e-5,
                        "exp decay: tight tol 1e-12 met"));
}

}  // namespace

std::vector<CheckResult> acceptance_checks(const Pipeline& pipe) {
    std::vector<CheckResult> out;
    if (pipe.pot.is_free()) {
        // zero-potential identities only
        bool dz = true;
        for (double d : pipe.curve.delta) dz = dz && d == 0.0;
        out.push_back(check("free: phase identically zero", 0.0, 0.0, dz));
        out.push_back(check("free: bound states", double(pipe.spectrum.states.size()), 0.0,
                            pipe.spectrum.states.empty()));
        double lev = phaseshift::levinson_residual(pipe.curve, 0);
        out.push_back(check("free: Levinson residual", std::abs(lev), 0.0, lev == 0.0));
        bool f1 = true;
        for (double l : pipe.jcurve.ln_f) f1 = f1 && std::abs(l) < 1e-12;
        out.push_back(check("free: |F| = 1 on the grid", 0.0, 0.0, f1));
        return out;
    }
    eigenvalue_checks(pipe, out);
    pseudo_morse_check(pipe, out);
    phase_checks(pipe, out);
    asymptotics_checks(pipe, out);
    unit_check(pipe, out);
    dual_route_checks(pipe, out);
    triangle_checks(pipe, out);
    g_checks(pipe, out);
    kernel_checks(pipe, out);
    numerics_checks(pipe, out);
    return out;
}

}  // namespace refpot::report

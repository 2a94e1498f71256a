#include "refpot/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace refpot::spectral {

namespace {

double log_sinh(double x) {
    if (x < 1e-4) return std::log(x) + x * x / 6.0;
    return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
}

}  // namespace

GFunction::GFunction(const jost::JostCurve& curve, const ReferencePotential& pot) {
    if (curve.energy.size() < 3) throw SpectralError("GFunction: curve too sparse");
    const double C = pot.c_const();
    std::vector<double> x(curve.energy.size()), y = curve.g;
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = 0.5 * std::log(curve.energy[i] / C);  // ln k
    spline_ = numerics::SteffenSpline(std::move(x), std::move(y));
    k_min_ = std::sqrt(curve.energy.front() / C);
    k_max_ = std::sqrt(curve.energy.back() / C);
    g_front_ = curve.g.front();
    auto mo = pot.moments();
    v0_ = mo.V0 / C;
    vpp0_ = mo.Vpp0 / C;
    tail_k2_ = -v0_ / 2.0;
}

double GFunction::operator()(double k) const {
    if (k <= 0) return g_front_;
    if (k <= k_min_) return g_front_;
    if (k >= k_max_) return tail()(k);
    return spline_(std::log(k));
}

std::function<double(double)> GFunction::tail() const {
    double v0 = v0_, vpp0 = vpp0_;
    return [v0, vpp0](double k) {
        double k2 = k * k;
        return -(v0 / (2 * k2) + (v0 * v0 - vpp0) / (8 * k2 * k2));
    };
}

SpectralDensity::SpectralDensity(const jost::JostCurve& curve,
                                 const boundstates::BoundSpectrum& spectrum,
                                 const ReferencePotential& pot)
    : spectrum_(&spectrum) {
    if (curve.energy.size() < 3) throw SpectralError("SpectralDensity: curve too sparse");
    std::vector<double> x(curve.energy.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::log(curve.energy[i]);
    ln_f_ = numerics::SteffenSpline(x, curve.ln_f);
    g_ = numerics::SteffenSpline(x, curve.g);
    e_min_ = curve.energy.front();
    e_max_ = curve.energy.back();
    lnf_front_ = curve.ln_f.front();
    g_front_ = curve.g.front();
    tail_ = jost::asymptotics_from_potential(pot);
}

double SpectralDensity::log_continuous(double energy) const {
    if (!(energy > 0)) return -1e300;
    double lnf;
    if (energy <= e_min_)
        lnf = lnf_front_;
    else if (energy >= e_max_)
        lnf = tail_.ln_f(std::sqrt(energy / tail_.c));
    else
        lnf = ln_f_(std::log(energy));
    return 0.5 * std::log(energy) - std::log(M_PI) - 2.0 * lnf;
}

double SpectralDensity::continuous(double energy) const {
    if (energy == 0.0) return 0.0;
    return std::exp(log_continuous(energy));
}

double SpectralDensity::dsigma_dE(double energy) const {
    if (!(energy >= 0)) throw SpectralError("dsigma_dE: continuous branch needs E >= 0");
    if (energy == 0.0) return 0.0;
    double g;
    if (energy <= e_min_)
        g = g_front_;
    else if (energy >= e_max_)
        g = std::expm1(-2.0 * tail_.ln_f(std::sqrt(energy / tail_.c)));
    else
        g = g_(std::log(energy));
    return std::sqrt(energy) * g / M_PI;
}

double gl_kernel(double r, double rp, const ContinuumSpec& cont,
                 const boundstates::BoundSpectrum& spectrum, const numerics::Tolerance& tol) {
    if (!(r > 0) || !(rp > 0)) throw SpectralError("gl_kernel: need r, r' > 0");
    double continuous = 0.0;
    if (cont.k_cut > 0) {
        numerics::OscillatoryTail tail;
        tail.analytic_envelope = cont.g_analytic_tail;
        tail.tail_k2 = cont.tail_k2;
        tail.k_far = cont.k_far;
        double wm = std::abs(r - rp), wp = r + rp;
        double im = numerics::oscillatory_cos_integral(cont.g, wm, cont.k_cut, tail, tol);
        double ip = numerics::oscillatory_cos_integral(cont.g, wp, cont.k_cut, tail, tol);
        continuous = (im - ip) / M_PI;
    }
    numerics::LogSum bound;
    for (const auto& st : spectrum.states) {
        if (!st.has_norming) throw SpectralError("gl_kernel: norming constants not filled");
        double lt = st.log_norming - std::log(4.0 * st.gamma * st.gamma) +
                    log_sinh(st.gamma * r) + log_sinh(st.gamma * rp);
        bound.add(lt, 1);
    }
    double bound_val = (bound.sign == 0) ? 0.0 : bound.sign * std::exp(bound.log_abs);
    return continuous + bound_val;
}

GLKernelGrid build_kernel_grid(const KernelGridSpec& spec, const ContinuumSpec& cont,
                               const boundstates::BoundSpectrum& spectrum,
                               const numerics::Tolerance& tol, unsigned threads) {
    if (spec.n < 1 || !(spec.r_min > 0) || !(spec.r_max >= spec.r_min))
        throw SpectralError("build_kernel_grid: bad grid spec");
    GLKernelGrid grid;
    grid.k_cut = cont.k_cut;
    grid.abs_tol = tol.abs_tol;
    grid.rel_tol = tol.rel_tol;
    grid.spectrum_fingerprint = spectrum.potential_fingerprint;
    grid.norming_convention = "C_n = 1 / int_0^inf phi_n(r)^2 dr with lim_{r->0} phi_n(r)/r = 1";
    grid.r.resize(static_cast<std::size_t>(spec.n));
    for (int i = 0; i < spec.n; ++i)
        grid.r[static_cast<std::size_t>(i)] =
            (spec.n == 1) ? spec.r_min
                          : spec.r_min + (spec.r_max - spec.r_min) * double(i) / double(spec.n - 1);
    const std::size_t n = grid.r.size();
    grid.values.assign(n * n, 0.0);
    // upper triangle as a flat list of (i, j) tasks
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) tasks.emplace_back(i, j);
    numerics::parallel_for(tasks.size(), numerics::thread_count(threads), [&](std::size_t t) {
        auto [i, j] = tasks[t];
        grid.values[i * n + j] = gl_kernel(grid.r[i], grid.r[j], cont, spectrum, tol);
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) grid.values[i * n + j] = grid.values[j * n + i];
    return grid;
}

void export_kernel(const GLKernelGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SpectralError("export_kernel: cannot open " + path);
    char buf[64];
    out << "# gl-kernel {\"n\": " << grid.r.size() << ", \"k_cut\": ";
    std::snprintf(buf, sizeof buf, "%.11e", grid.k_cut);
    out << buf << ", \"abs_tol\": ";
    std::snprintf(buf, sizeof buf, "%.3e", grid.abs_tol);
    out << buf << ", \"rel_tol\": ";
    std::snprintf(buf, sizeof buf, "%.3e", grid.rel_tol);
    out << buf << ", \"spectrum_fingerprint\": \"" << grid.spectrum_fingerprint
        << "\", \"norming_convention\": \"" << grid.norming_convention << "\"}\n";
    auto put_row = [&](const double* row, std::size_t n) {
        for (std::size_t j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.11e", row[j]);
            out << buf << (j + 1 == n ? "\n" : " ");
        }
    };
    if (!grid.r.empty()) put_row(grid.r.data(), grid.r.size());
    for (std::size_t i = 0; i < grid.r.size(); ++i)
        put_row(grid.values.data() + i * grid.r.size(), grid.r.size());
}

ContinuumSpec continuum_for(const GFunction& g, const ReferencePotential& pot, double k_cut) {
    ContinuumSpec spec;
    spec.g = [&g](double k) { return g(k); };
    spec.g_analytic_tail = g.tail();
    spec.tail_k2 = g.tail_k2();
    spec.k_cut = k_cut;
    (void)pot;
    return spec;
}

}  // namespace refpot::spectral

#include "refpot/jost.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace refpot::jost {

PhaseInterpolant::PhaseInterpolant(const phaseshift::PhaseShiftCurve& curve, double c_const)
    : coeffs_(curve.coeffs), c_(c_const) {
    if (curve.k.size() < 3) throw JostError("PhaseInterpolant: curve too sparse");
    std::vector<double> x(curve.k.size()), y = curve.delta;
    for (std::size_t i = 0; i < curve.k.size(); ++i)
        x[i] = std::log(c_ * curve.k[i] * curve.k[i]);
    spline_ = numerics::SteffenSpline(std::move(x), std::move(y));
    e_min_ = c_ * curve.k.front() * curve.k.front();
    e_max_ = c_ * curve.k.back() * curve.k.back();
    delta_front_ = curve.delta.front();
}

double PhaseInterpolant::operator()(double energy) const {
    if (energy <= e_min_) return delta_front_;
    if (energy >= e_max_) return coeffs_(std::sqrt(energy / c_));
    return spline_(std::log(energy));
}

namespace {

// P int_{E_a}^inf E'^{-j-1/2} / (E' - E) dE' for 0 < E < E_a, j = 0..4.
void tail_kernels(double e, double e_a, double out[5]) {
    double se = std::sqrt(e), sea = std::sqrt(e_a);
    out[0] = std::log((sea + se) / (sea - se)) / se;
    for (int j = 1; j < 5; ++j)
        out[j] = (out[j - 1] - 2.0 / ((2 * j - 1) * std::pow(sea, 2 * j - 1))) / e;
}

}  // namespace

double ln_jost_modulus(double energy, const boundstates::BoundSpectrum& spectrum,
                       const PhaseInterpolant& delta, double e_a, const numerics::Tolerance& tol) {
    if (!(energy > 0) || !(energy < e_a))
        throw JostError("ln_jost_modulus: need 0 < E < E_a for the dispersion route");
    double ln_prod = 0.0;
    for (const auto& st : spectrum.states) ln_prod += std::log1p(-st.energy / energy);

    double pv = numerics::principal_value([&delta](double ep) { return delta(ep); }, energy, 0.0,
                                          e_a, tol);
    double kern[5];
    tail_kernels(energy, e_a, kern);
    const auto& c = delta.coeffs();
    const double C = delta.c_const();
    const double sc = std::sqrt(C);
    double tail = c.a1 * sc * kern[0] + c.a3 * sc * C * kern[1] + c.a5 * sc * C * C * kern[2] +
                  c.a7 * sc * C * C * C * kern[3] + c.a9 * sc * C * C * C * C * kern[4];
    return ln_prod - (pv + tail) / M_PI;
}

JostCurve build_jost_curve(const ReferencePotential& pot,
                           const boundstates::BoundSpectrum& spectrum,
                           const PhaseInterpolant& delta, const JostCurveOptions& opts) {
    JostCurve jc;
    jc.potential_fingerprint = pot.fingerprint();
    jc.k_a = opts.k_a;
    jc.e_a = pot.c_const() * opts.k_a * opts.k_a;
    double e_lo = opts.e_min > 0 ? opts.e_min : delta.e_grid_min();
    double e_hi = opts.e_max > 0 ? opts.e_max : 400.0 * jc.e_a;
    if (!(e_lo < jc.e_a)) throw JostError("build_jost_curve: grid must start below E_a");
    int n = std::max(opts.points, 8);
    jc.energy.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        jc.energy[static_cast<std::size_t>(i)] =
            std::exp(std::log(e_lo) + (std::log(e_hi) - std::log(e_lo)) * double(i) / double(n - 1));
    jc.ln_f.assign(jc.energy.size(), 0.0);
    jc.g.assign(jc.energy.size(), 0.0);
    jc.route.assign(jc.energy.size(), 'd');

    auto pr = asymptotics_from_potential(pot);
    unsigned threads = numerics::thread_count(opts.threads);
    numerics::parallel_for(jc.energy.size(), threads, [&](std::size_t i) {
        double e = jc.energy[i];
        if (e < jc.e_a) {
            jc.ln_f[i] = ln_jost_modulus(e, spectrum, delta, jc.e_a, opts.pv_tol);
            jc.route[i] = 'd';
        } else {
            jc.ln_f[i] = pr.ln_f(std::sqrt(e / pot.c_const()));
            jc.route[i] = 'a';
        }
        jc.g[i] = std::expm1(-2.0 * jc.ln_f[i]);
    });
    return jc;
}

double PotentialRouteAsym::ln_f(double k) const {
    double k2 = k * k;
    return (a2 + (a4 + (a6 + a8 / k2) / k2) / k2) / k2;
}

double PotentialRouteAsym::re_f(double k) const {
    double k2 = k * k;
    double t2 = mom.V0 / (4 * c * k2) - mom.W * mom.W / (8 * c * c * k2);
    double t4 = -mom.Vpp0 / (16 * c * k2 * k2) +
                (5 * mom.V0 * mom.V0 - 2 * mom.Vp0 * mom.W) / (32 * c * c * k2 * k2) -
                (mom.V0 * mom.W * mom.W + 2 * mom.U * mom.W) / (32 * c * c * c * k2 * k2) +
                std::pow(mom.W, 4) / (384 * std::pow(c, 4) * k2 * k2);
    return 1.0 + t2 + t4;
}

double PotentialRouteAsym::im_f(double k) const {
    double k2 = k * k;
    return mom.W / (2 * c * k) + mom.Vp0 / (8 * c * k * k2) +
           (mom.V0 * mom.W + mom.U) / (8 * c * c * k * k2) -
           std::pow(mom.W, 3) / (48 * c * c * c * k * k2);
}

double PotentialRouteAsym::f_squared(double k) const {
    double k2 = k * k;
    return 1.0 + mom.V0 / (2 * c * k2) + 3 * mom.V0 * mom.V0 / (8 * c * c * k2 * k2) -
           mom.Vpp0 / (8 * c * k2 * k2);
}

PotentialRouteAsym asymptotics_from_potential(const ReferencePotential& pot) {
    auto I = pot.chain_integrals();
    PotentialRouteAsym out;
    out.a2 = I[2] / 4.0;
    out.a4 = -I[4] / 16.0;
    out.a6 = I[6] / 64.0;
    out.a8 = -I[8] / 256.0;
    out.mom = pot.moments();
    out.c = pot.c_const();
    return out;
}

PhaseRouteAsym asymptotics_from_phase(const PhaseInterpolant& delta,
                                      const boundstates::BoundSpectrum& spectrum, double e_a,
                                      const phaseshift::AsymptoticCoeffs& c,
                                      const numerics::Tolerance& tol) {
    const double C = delta.c_const();
    const double k_a = std::sqrt(e_a / C);
    double m0 = numerics::adaptive_quadrature_log([&](double e) { return delta(e); }, 0.0, e_a, tol);
    double m1 =
        numerics::adaptive_quadrature_log([&](double e) { return delta(e) * e; }, 0.0, e_a, tol);
    double m2 = numerics::adaptive_quadrature_log([&](double e) { return delta(e) * e * e; }, 0.0,
                                                  e_a, tol);
    double s1 = 0, s2 = 0, s3 = 0;
    for (const auto& st : spectrum.states) {
        s1 += st.energy;
        s2 += st.energy * st.energy;
        s3 += std::pow(st.energy, 3);
    }
    PhaseRouteAsym out;
    const double ka2 = k_a * k_a, ka3 = ka2 * k_a, ka5 = ka3 * ka2, ka7 = ka5 * ka2;
    out.a2 = -(2.0 / M_PI) * (c.a1 * k_a - c.a3 / k_a - c.a5 / (3 * ka3) - c.a7 / (5 * ka5) -
                              c.a9 / (7 * ka7)) +
             (m0 / M_PI - s1) / C;
    out.a4 = -(2.0 / M_PI) * (c.a1 * ka3 / 3 + c.a3 * k_a - c.a5 / k_a - c.a7 / (3 * ka3) -
                              c.a9 / (5 * ka5)) +
             (m1 / M_PI - s2 / 2) / (C * C);
    out.a6 = -(2.0 / M_PI) * (c.a1 * ka5 / 5 + c.a3 * ka3 / 3 + c.a5 * k_a - c.a7 / k_a -
                              c.a9 / (3 * ka3)) +
             (m2 / M_PI - s3 / 3) / (C * C * C);
    return out;
}

double g_tail(const ReferencePotential& pot, double k) {
    auto mo = pot.moments();
    const double C = pot.c_const();
    double e = C * k * k;
    return -(mo.V0 / (2 * e) + (mo.V0 * mo.V0 - C * mo.Vpp0) / (8 * e * e));
}

namespace {

double bisect_on(const std::function<double(double)>& f, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
        double mid = 0.5 * (lo + hi);
        if ((f(lo) > 0) == (f(mid) > 0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

DirectJost jost_direct(const ReferencePotential& pot, double k, const DirectOptions& opts) {
    if (!(k > 0)) throw JostError("jost_direct: k must be positive");
    DirectJost out;
    if (pot.is_free()) {
        out.log_modulus = 0;
        out.arg = 0;
        return out;
    }
    const double C = pot.c_const();
    const double E = C * k * k;
    auto q = [&](double r) { return (pot.eval(r, 0) - E) / C; };

    // integration stops where |V| stays below the floor
    double r_end = 1.0;
    while (std::abs(pot.eval(r_end, 0)) > opts.v_floor && r_end < 2e3) r_end *= 1.1;

    // hand-over from the smooth log integration to the oscillatory grid
    const double kappa_cap = std::max(170.0, 1.3 * k);
    double r_w, log_u0, omega0;
    const double r_floor = 1e-5;
    if (q(r_floor) > kappa_cap * kappa_cap) {
        double r_allowed = r_floor;
        while (q(r_allowed) > kappa_cap * kappa_cap && r_allowed < r_end) r_allowed *= 1.2;
        r_w = bisect_on([&](double r) { return q(r) - kappa_cap * kappa_cap; }, r_floor, r_allowed);
        auto launch = numerics::regular_launch(q, r_floor, r_w, {1e-14, 1e-13});
        log_u0 = launch.log_u;
        omega0 = launch.omega;
    } else {
        r_w = r_floor;
        log_u0 = std::log(r_floor);
        omega0 = 1.0 / r_floor;
    }

    // uniform Numerov grid on [r_w, r_end]
    double qmax = std::max({std::abs(q(r_w)), k * k, 1.0});
    double h = std::min(0.12 / std::sqrt(qmax), (r_end - r_w) / 64.0);
    std::size_t n = static_cast<std::size_t>(std::ceil((r_end - r_w) / h)) + 1;
    if (n % 2 == 0) ++n;  // odd count -> even Simpson panel number
    h = (r_end - r_w) / double(n - 1);
    std::vector<double> qs(n);
    for (std::size_t i = 0; i < n; ++i) qs[i] = q(r_w + h * double(i));
    // seed consistent with the launched log-derivative
    auto launch_step = numerics::regular_launch(q, r_floor, r_w + h, {1e-14, 1e-13});
    double u0 = 1.0, u1 = std::exp(launch_step.log_u - log_u0);
    (void)omega0;
    auto prop = numerics::numerov_propagate(qs, h, u0, u1);

    // Simpson quadrature of e^{ikr} V(r) u(r)
    std::complex<long double> acc = 0.0L;
    auto f = [&](std::size_t i) -> std::complex<long double> {
        double r = r_w + h * double(i);
        double w = pot.eval(r, 0) * prop.u[i];
        return std::complex<long double>(w * std::cos(k * r), w * std::sin(k * r));
    };
    for (std::size_t i = 0; i + 2 < n; i += 2)
        acc += (f(i) + 4.0L * f(i + 1) + f(i + 2)) * (long double)(h / 3.0);
    // total integral carries exp(L) with L = log_u0 + prop.log_scale
    const double L = log_u0 + prop.log_scale;
    std::complex<double> flat(double(acc.real()), double(acc.imag()));
    flat /= C;
    // F = 1 + e^{L} * flat
    std::complex<double> f_scaled = flat + std::polar(std::exp(-std::min(L, 700.0)), 0.0) *
                                               ((L > 700.0) ? 0.0 : 1.0);
    out.log_modulus = L + std::log(std::abs(f_scaled));
    out.arg = std::arg(f_scaled);
    // truncation estimate: remaining tail of the integrand
    double v_end = std::abs(pot.eval(r_end, 0));
    double alpha_tail = pot.components().back().alpha;
    double u_end = std::abs(prop.u[n - 1]);
    double tail_bound = v_end * u_end / (C * alpha_tail);
    out.truncation_estimate = tail_bound / std::max(std::abs(f_scaled), 1e-300);
    if (out.truncation_estimate > opts.accuracy)
        throw JostError("jost_direct: truncation tail exceeds the accuracy target");
    return out;
}

}  // namespace refpot::jost

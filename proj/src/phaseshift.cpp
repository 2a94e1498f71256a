#include "refpot/phaseshift.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "refpot/specfun.hpp"

namespace refpot::phaseshift {

double AsymptoticCoeffs::operator()(double k) const {
    double k2 = k * k;
    return (a1 + (a3 + (a5 + (a7 + a9 / k2) / k2) / k2) / k2) / k;
}

AsymptoticCoeffs asymptotic_coeffs(const ReferencePotential& pot) {
    auto I = pot.chain_integrals();
    AsymptoticCoeffs c;
    c.a1 = -I[1] / 2.0;
    c.a3 = I[3] / 8.0;
    c.a5 = -I[5] / 32.0;
    c.a7 = I[7] / 128.0;
    c.a9 = -I[9] / 512.0;
    return c;
}

double integrate_phase(const std::function<double(double)>& V, double c_const, double k,
                       double r_end, const numerics::Tolerance& tol) {
    if (!(k > 0)) throw PhaseShiftError("integrate_phase: k must be positive");
    const double ck = c_const * k;
    try {
        return numerics::integrate_ode(
            [&](double r, double d) {
                double s = std::sin(k * r + d);
                return -V(r) / ck * s * s;
            },
            0.0, 0.0, r_end, tol);
    } catch (const numerics::NumericsError& e) {
        throw PhaseShiftError("phase ODE failed at k = " + std::to_string(k) + ": " + e.what());
    }
}

double tail_boundary(const ReferencePotential& pot) {
    if (pot.is_free()) return 0.0;
    if (!pot.boundaries().empty()) return pot.boundaries().back();
    return pot.components().back().r0;
}

double integrate_phase(const ReferencePotential& pot, double k, const numerics::Tolerance& tol) {
    if (pot.is_free()) return 0.0;
    return integrate_phase([&pot](double r) { return pot.eval(r, 0); }, pot.c_const(), k,
                           tail_boundary(pot), tol);
}

TailClosure::TailClosure(const ReferencePotential& pot) {
    if (pot.is_free()) return;
    const auto& tail = pot.components().back();
    X_ = tail_boundary(pot);
    alpha_ = tail.alpha;
    r0_ = tail.r0;
    if (tail.d == 0.0) return;  // constant tail adds no phase
    std::complex<double> d_over_c(tail.d / pot.c_const(), 0.0);
    abar_ = std::sqrt(d_over_c) / alpha_;
    trivial_ = false;
}

TailClosure::TailWave TailClosure::wave(double k) const {
    using cplx = std::complex<double>;
    const cplx i(0.0, 1.0);
    cplx ybar = 2.0 * abar_ * std::exp(-alpha_ * (X_ - r0_));
    cplx a = 0.5 + i * (k / alpha_) - abar_;
    cplx c = 1.0 + 2.0 * i * (k / alpha_);
    auto kp = specfun::kummer_phi_hp(a, c, ybar);
    cplx F = std::exp(-ybar / 2.0) * kp.phi;
    cplx dF_dy = std::exp(-ybar / 2.0) * (kp.dphi - 0.5 * kp.phi);
    cplx Fp = (-alpha_ * ybar) * dF_dy;
    cplx carrier = std::polar(1.0, -k * X_);
    TailWave w;
    w.h = F * carrier;
    w.hp = (Fp - i * k * F) * carrier;
    return w;
}

double TailClosure::principal_increment(double k, double delta2) const {
    TailWave w = wave(k);
    const double psi2 = k * X_ + delta2;
    // solve Re[beta h] = sin psi2, Re[beta h'] = k cos psi2
    double a11 = w.h.real(), a12 = -w.h.imag();
    double a21 = w.hp.real(), a22 = -w.hp.imag();
    double det = a11 * a22 - a12 * a21;
    if (det == 0.0) throw PhaseShiftError("tail closure: singular matching system");
    double b1 = std::sin(psi2), b2 = k * std::cos(psi2);
    double x1 = (b1 * a22 - b2 * a12) / det;
    double x2 = (a11 * b2 - a21 * b1) / det;
    double delta_full = M_PI / 2 - std::atan2(x2, x1);
    return std::remainder(delta_full - delta2, 2.0 * M_PI);
}

double TailClosure::reference(double k) const {
    auto hi = ladder_.lower_bound(k);
    if (hi == ladder_.end()) return principal_increment(k, 0.0);
    if (hi->first == k) return hi->second;
    if (hi == ladder_.begin()) return hi->second;
    auto lo = std::prev(hi);
    double t = (std::log(k) - std::log(lo->first)) /
               (std::log(hi->first) - std::log(lo->first));
    return lo->second + t * (hi->second - lo->second);
}

void TailClosure::prepare(double k_lo, double k_hi) {
    if (trivial_) return;
    ladder_.clear();
    double k_top = std::max(400.0, 1.3 * k_hi);
    ladder_[k_top] = principal_increment(k_top, 0.0);  // small at high k: principal == true
    // extend downward, keeping adjacent rungs within ~1 rad
    double k = k_top;
    while (k > 0.8 * k_lo) {
        double k_next = k / 1.25;
        double step = 1.25;
        for (;;) {
            double princ = principal_increment(k_next, 0.0);
            double prev = ladder_.begin()->second;  // smallest resolved k so far
            double cand = princ + 2.0 * M_PI * std::round((prev - princ) / (2.0 * M_PI));
            if (std::abs(cand - prev) <= 1.2 || step < 1.0009) {
                ladder_[k_next] = cand;
                break;
            }
            step = std::sqrt(step);
            k_next = k / step;
        }
        k = k_next;
    }
}

double TailClosure::increment(double k, double delta_at_boundary) const {
    if (trivial_) return 0.0;
    double princ = principal_increment(k, delta_at_boundary);
    double ref = reference(k);
    return princ + 2.0 * M_PI * std::round((ref - princ) / (2.0 * M_PI));
}

double delta_at(const ReferencePotential& pot, double k, const numerics::Tolerance& tol,
                const TailClosure* closure) {
    if (pot.is_free()) return 0.0;
    double d2 = integrate_phase(pot, k, tol);
    TailClosure local{pot};
    const TailClosure* cl = closure;
    if (!cl) {
        local.prepare(k, k);
        cl = &local;
    }
    return d2 + cl->increment(k, d2);
}

PhaseShiftCurve build_curve(const ReferencePotential& pot, double k_min, double k_max,
                            int n_points, const CurveOptions& opts) {
    if (!(k_min > 0) || !(k_max > k_min) || n_points < 2)
        throw PhaseShiftError("build_curve: need 0 < k_min < k_max and n_points >= 2");
    PhaseShiftCurve curve;
    curve.potential_fingerprint = pot.fingerprint();
    curve.coeffs = asymptotic_coeffs(pot);
    curve.k.resize(static_cast<std::size_t>(n_points));
    const double lmin = std::log(k_min), lmax = std::log(k_max);
    for (int i = 0; i < n_points; ++i)
        curve.k[static_cast<std::size_t>(i)] =
            std::exp(lmin + (lmax - lmin) * double(i) / double(n_points - 1));
    curve.delta.assign(curve.k.size(), 0.0);
    curve.method.assign(curve.k.size(), Method::ode_tail);

    if (pot.is_free()) {
        curve.k_switch = k_max;
        return curve;
    }

    TailClosure closure{pot};
    closure.prepare(k_min, k_max);

    // locate the hand-over point from ODE+tail to the series
    double k_switch = opts.k_switch;
    if (k_switch <= 0) {
        double k_probe_lo = std::min(0.25 * k_max, k_max);
        std::vector<double> probes;
        for (int i = 0; i < 9; ++i)
            probes.push_back(k_probe_lo * std::pow(k_max / k_probe_lo, double(i) / 8.0));
        k_switch = k_max;
        for (double kp : probes) {
            double full = delta_at(pot, kp, opts.ode_tol, &closure);
            double asym = curve.coeffs(kp);
            curve.band_k.push_back(kp);
            curve.band_ode.push_back(full);
            curve.band_asym.push_back(asym);
            if (std::abs(full - asym) < opts.switch_target && k_switch == k_max) k_switch = kp;
        }
    }
    curve.k_switch = k_switch;

    unsigned threads = numerics::thread_count(opts.threads);
    numerics::parallel_for(curve.k.size(), threads, [&](std::size_t i) {
        double k = curve.k[i];
        if (k >= k_switch) {
            curve.delta[i] = curve.coeffs(k);
            curve.method[i] = Method::asymptotic;
        } else {
            double d2 = integrate_phase(pot, k, opts.ode_tol);
            curve.delta[i] = d2 + closure.increment(k, d2);
            curve.method[i] = Method::ode_tail;
        }
    });
    return curve;
}

double levinson_residual(const PhaseShiftCurve& curve, int n_bound) {
    if (curve.delta.empty()) throw PhaseShiftError("levinson_residual: empty curve");
    return curve.delta.front() - n_bound * M_PI;
}

ScatteringLengthFit scattering_length_window(const PhaseShiftCurve& curve, int n_bound,
                                             double k_lo, double k_hi) {
    std::vector<double> ks, ds;
    for (std::size_t i = 0; i < curve.k.size(); ++i) {
        if (curve.k[i] >= k_lo && curve.k[i] <= k_hi) {
            ks.push_back(curve.k[i]);
            ds.push_back(curve.delta[i]);
        }
    }
    if (ks.size() < 5) throw PhaseShiftError("scattering_length: fit window has < 5 points");
    const double npi = n_bound * M_PI;
    // initial linear estimate, then Newton on the least-squares slope
    double R0 = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) R0 += std::tan(npi - ds[i]) / ks[i];
    R0 /= double(ks.size());
    for (int it = 0; it < 60; ++it) {
        double g = 0, gp = 0;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            double m = npi - std::atan(ks[i] * R0);
            double dm = -ks[i] / (1 + ks[i] * ks[i] * R0 * R0);
            g += (m - ds[i]) * dm;
            gp += dm * dm;
        }
        double step = g / gp;
        R0 -= step;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(R0))) break;
    }
    ScatteringLengthFit fit;
    fit.R0 = R0;
    fit.points_used = static_cast<int>(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i)
        fit.max_residual = std::max(fit.max_residual,
                                    std::abs(npi - std::atan(ks[i] * R0) - ds[i]));
    return fit;
}

ScatteringLengthFit scattering_length(const PhaseShiftCurve& curve, int n_bound) {
    // window selection: k R0 < 0.1 using a low-k pilot estimate
    const double npi = n_bound * M_PI;
    double k0 = curve.k.front();
    double pilot = std::tan(npi - curve.delta.front()) / k0;
    double k_hi = (pilot > 0) ? 0.1 / pilot : curve.k.back();
    return scattering_length_window(curve, n_bound, curve.k.front(), k_hi);
}

}  // namespace refpot::phaseshift

#include <doctest.h>

#include <cmath>
#include <memory>

#include "refpot/jost.hpp"

using namespace refpot;

namespace {
const std::string cfg_dir = REFPOT_CONFIG_DIR;
const double kC = 0.0318400000055789;
ReferencePotential xe2() { return load_config(cfg_dir + "/xe2.cfg"); }

// small shared fixture: a reduced-resolution curve is plenty for the unit
// checks here (the acceptance suite runs the full-resolution pipeline)
struct Fixture {
    ReferencePotential pot = xe2();
    boundstates::BoundSpectrum spectrum;
    phaseshift::PhaseShiftCurve curve;
    std::unique_ptr<jost::PhaseInterpolant> interp;
    Fixture() {
        spectrum = boundstates::find_eigenvalues(pot);
        phaseshift::CurveOptions copts;
        copts.ode_tol = {1e-12, 1e-11};
        curve = phaseshift::build_curve(pot, 1e-5, 75000.0, 500, copts);
        interp = std::make_unique<jost::PhaseInterpolant>(curve, pot.c_const());
    }
};
Fixture& fixture() {
    static Fixture f;
    return f;
}
}  // namespace

TEST_CASE("free particle: |F| = 1 everywhere") {
    auto pot = ReferencePotential::free_particle(kC);
    auto curve = phaseshift::build_curve(pot, 1e-4, 100.0, 32);
    jost::PhaseInterpolant interp(curve, kC);
    boundstates::BoundSpectrum none;
    double lnf = jost::ln_jost_modulus(1.0, none, interp, 1e6);
    CHECK(std::abs(lnf) < 1e-12);
    auto d = jost::jost_direct(pot, 1.0);
    CHECK(d.log_modulus == 0.0);
    CHECK(d.arg == 0.0);
}

TEST_CASE("potential-route asymptotics match the closed-form coefficients") {
    auto pot = xe2();
    auto pr = jost::asymptotics_from_potential(pot);
    auto mo = pot.moments();
    const double C = pot.c_const();
    CHECK(std::abs(pr.a2 - mo.V0 / (4 * C)) < 1e-10 * std::abs(pr.a2));
    double a4_expect = (2 * mo.V0 * mo.V0 - C * mo.Vpp0) / (16 * C * C);
    CHECK(std::abs(pr.a4 - a4_expect) < 1e-9 * std::abs(a4_expect));
    CHECK(pr.a2 == doctest::Approx(9.2e7).epsilon(0.02));  // ~V(0)/(4C)
}

TEST_CASE("real/imaginary parts collapse to the cancellation-free |F|^2") {
    auto pot = xe2();
    auto pr = jost::asymptotics_from_potential(pot);
    double ka = 75000.0;
    auto diff_at = [&](double k) {
        double lhs = pr.re_f(k) * pr.re_f(k) + pr.im_f(k) * pr.im_f(k);
        return std::abs(lhs - pr.f_squared(k));
    };
    double d1 = diff_at(10 * ka), d2 = diff_at(20 * ka);
    CHECK(d1 / std::abs(pr.f_squared(10 * ka) - 1.0) < 1e-4);
    double order = std::log2(d1 / d2);
    CHECK(order > 5.0);  // residual falls off like k^{-6}
    CHECK(order < 7.0);
}

TEST_CASE("g tail closed form is consistent with the even-power expansion") {
    auto pot = xe2();
    auto pr = jost::asymptotics_from_potential(pot);
    double k = 3.0 * 75000.0;
    double g_from_lnf = std::expm1(-2.0 * pr.ln_f(k));
    double g_closed = jost::g_tail(pot, k);
    CHECK(std::abs(g_from_lnf / g_closed - 1.0) < 3e-3);
}

TEST_CASE("dispersion modulus: bound-state poles dominate at small energy") {
    auto& f = fixture();
    double e_a = f.pot.c_const() * 75000.0 * 75000.0;
    double lnf = jost::ln_jost_modulus(0.03184, f.spectrum, *f.interp, e_a);
    CHECK(lnf > 100.0);  // |F| astronomically large at low energy
    double lnf_mid = jost::ln_jost_modulus(0.8 * e_a, f.spectrum, *f.interp, e_a);
    CHECK(std::abs(lnf_mid) < 0.1);  // approaching |F| -> 1
}

TEST_CASE("dispersion route matches the series route at the closure energy") {
    auto& f = fixture();
    auto pr = jost::asymptotics_from_potential(f.pot);
    double e_a = f.pot.c_const() * 75000.0 * 75000.0;
    for (double frac : {0.35, 0.7}) {
        double e = frac * e_a;
        double k = std::sqrt(e / f.pot.c_const());
        double disp = jost::ln_jost_modulus(e, f.spectrum, *f.interp, e_a);
        double ser = pr.ln_f(k);
        CHECK(std::abs(disp - ser) < 1e-4 * std::max(std::abs(ser), 1e-3));
    }
}

TEST_CASE("jost curve: identity, monotone approach to 1, route tags") {
    auto& f = fixture();
    jost::JostCurveOptions jopts;
    jopts.points = 160;
    auto jc = jost::build_jost_curve(f.pot, f.spectrum, *f.interp, jopts);
    for (std::size_t i = 0; i < jc.energy.size(); ++i) {
        double want = std::expm1(-2.0 * jc.ln_f[i]);
        CHECK(std::abs(jc.g[i] - want) <= 1e-14 * std::max(1.0, std::abs(want)));
        CHECK(std::isfinite(jc.ln_f[i]));
    }
    CHECK(jc.route.front() == 'd');
    CHECK(jc.route.back() == 'a');
    // |F| decreasing toward 1 well above the wall energy
    double v0 = f.pot.eval(0.0, 0);
    double prev = 1e300;
    for (std::size_t i = 0; i < jc.energy.size(); ++i) {
        if (jc.energy[i] < 3.0 * v0) continue;
        CHECK(jc.ln_f[i] > 0.0);
        CHECK(jc.ln_f[i] < prev * (1 + 1e-12));
        prev = jc.ln_f[i];
    }
}

TEST_CASE("dual routes for a2, a4 and the E_a invariance") {
    auto& f = fixture();
    auto pr = jost::asymptotics_from_potential(f.pot);
    double e_a = f.pot.c_const() * 75000.0 * 75000.0;
    auto ph = jost::asymptotics_from_phase(*f.interp, f.spectrum, e_a, f.curve.coeffs);
    CHECK(std::abs(ph.a2 / pr.a2 - 1.0) < 5e-3);
    CHECK(std::abs(ph.a4 / pr.a4 - 1.0) < 2e-2);
    auto ph2 = jost::asymptotics_from_phase(*f.interp, f.spectrum, 2 * e_a, f.curve.coeffs);
    CHECK(std::abs(ph2.a2 / ph.a2 - 1.0) < 1e-3);
}

TEST_CASE("direct integral representation closes the triangle at k = 1") {
    auto& f = fixture();
    auto d = jost::jost_direct(f.pot, 1.0);
    CHECK(d.truncation_estimate < 1e-5);
    phaseshift::TailClosure closure(f.pot);
    closure.prepare(1.0, 1.0);
    double delta = phaseshift::delta_at(f.pot, 1.0, {1e-13, 1e-12}, &closure);
    CHECK(std::abs(std::remainder(d.arg + delta, 2 * M_PI)) < 5e-3);
    double e_a = f.pot.c_const() * 75000.0 * 75000.0;
    double ln27 = jost::ln_jost_modulus(f.pot.c_const(), f.spectrum, *f.interp, e_a);
    CHECK(std::abs(d.log_modulus - ln27) < std::log(1.005));
    CHECK(d.log_modulus > 1e4);  // the modulus itself is ~e^{11850}
}

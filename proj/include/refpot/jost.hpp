#pragma once

#include <complex>
#include <string>
#include <vector>

#include "refpot/boundstates.hpp"
#include "refpot/numerics.hpp"
#include "refpot/phaseshift.hpp"
#include "refpot/potential.hpp"

namespace refpot::jost {

struct JostError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Phase shift as a function of energy: monotone-cubic in ln E on the curve
/// grid, asymptotic series beyond it. Overshoot-free by construction.
class PhaseInterpolant {
public:
    PhaseInterpolant(const phaseshift::PhaseShiftCurve& curve, double c_const);
    double operator()(double energy) const;
    double e_grid_min() const { return e_min_; }
    double e_grid_max() const { return e_max_; }
    double c_const() const { return c_; }
    const phaseshift::AsymptoticCoeffs& coeffs() const { return coeffs_; }

private:
    numerics::SteffenSpline spline_;  // delta vs ln E
    phaseshift::AsymptoticCoeffs coeffs_;
    double e_min_, e_max_, c_, delta_front_;
};

/// ln|F(E)| from the bound states and the phase shift (dispersion integral,
/// 0 < E < E_a), with the analytic closed-form tail beyond E_a.
double ln_jost_modulus(double energy, const boundstates::BoundSpectrum& spectrum,
                       const PhaseInterpolant& delta, double e_a,
                       const numerics::Tolerance& tol = {1e-11, 1e-9});

struct JostCurve {
    std::vector<double> energy;  // meV, ascending (log grid)
    std::vector<double> ln_f;    // ln |F(E)|
    std::vector<double> g;       // |F|^{-2} - 1, identically expm1(-2 ln_f)
    std::vector<char> route;     // 'd' dispersion, 'a' asymptotic closure
    double e_a = 0;              // closure threshold (meV)
    double k_a = 0;              // sqrt(e_a / C)
    std::string potential_fingerprint;
};

struct JostCurveOptions {
    double k_a = 75000.0;  // 1/A; e_a = C k_a^2
    int points = 420;
    double e_min = 0, e_max = 0;  // 0: from the phase curve and 400 e_a
    numerics::Tolerance pv_tol{1e-11, 1e-9};
    unsigned threads = 0;
};

JostCurve build_jost_curve(const ReferencePotential& pot,
                           const boundstates::BoundSpectrum& spectrum,
                           const PhaseInterpolant& delta, const JostCurveOptions& opts = {});

/// Even-power expansion of ln|F(k)| from potential moments alone, plus the
/// explicit large-k real/imaginary parts and |F|^2 from the iterated integral
/// representation.
struct PotentialRouteAsym {
    double a2 = 0, a4 = 0, a6 = 0, a8 = 0;
    Moments mom;
    double c = 0;
    double ln_f(double k) const;
    double re_f(double k) const;
    double im_f(double k) const;
    double f_squared(double k) const;  // the cancellation-free closed form
};
PotentialRouteAsym asymptotics_from_potential(const ReferencePotential& pot);

/// The same leading coefficients recovered from the phase curve and spectrum.
struct PhaseRouteAsym {
    double a2 = 0, a4 = 0, a6 = 0;
};
PhaseRouteAsym asymptotics_from_phase(const PhaseInterpolant& delta,
                                      const boundstates::BoundSpectrum& spectrum, double e_a,
                                      const phaseshift::AsymptoticCoeffs& coeffs,
                                      const numerics::Tolerance& tol = {1e-12, 1e-10});

/// g(k) beyond the dispersion range: the closed-form tail consistent with
/// g = |F|^{-2} - 1 (leading terms -V(0)/(2E) - (V(0)^2 - C V''(0))/(8 E^2)).
double g_tail(const ReferencePotential& pot, double k);

/// Direct evaluation of F(k) = 1 + (1/C) int e^{ikr} V(r) phi(k, r) dr with a
/// Numerov regular solution; returned in log-polar form because |F| spans
/// thousands of decades.
struct DirectJost {
    double log_modulus = 0;
    double arg = 0;  // principal value
    double truncation_estimate = 0;  // relative
};
struct DirectOptions {
    double accuracy = 1e-5;   // target on ln|F| and arg
    double v_floor = 1e-14;   // meV; integration stops where |V| stays below
};
DirectJost jost_direct(const ReferencePotential& pot, double k, const DirectOptions& opts = {});

}  // namespace refpot::jost

#pragma once

#include <complex>
#include <stdexcept>

namespace refpot::specfun {

struct SpecfunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using cplx = std::complex<double>;

/// Kummer's confluent hypergeometric Phi(a, c; x) by the power series.
/// Converged when three consecutive terms fall below 1e-16 |sum|.
cplx kummer_phi(cplx a, cplx c, cplx x, int term_cap = 20000);

/// Phi and dPhi/dx evaluated together in 100-digit arithmetic. Needed where
/// the series cancels catastrophically (imaginary arguments of size ~100).
struct KummerPair {
    cplx phi;
    cplx dphi;
};
KummerPair kummer_phi_hp(cplx a, cplx c, cplx x, int term_cap = 60000);

/// Inner-wall (pseudo-Morse) solution parameters at energy E:
/// mu0 = sqrt((E - v)/d - 1)/2, y0(r) = exp(-alpha (r - r0)).
struct PseudoMorseParams {
    double mu0;
    double alpha0;
    double r0;
    PseudoMorseParams(double E, double v, double d, double alpha, double r0);
    double y0_at(double r) const;
};

/// Optimally truncated asymptotic value with the first omitted term as the
/// error estimate.
struct AsymptoticSum {
    double value;
    double error_estimate;
    int terms;
};

enum class Parity { plus, minus };

/// The bracketed asymptotic series of the two inner-wall solutions:
/// sum_n (sign)^n prod_{j<n}(mu0^2 + j^2) / (n! y0^n), sign = -1 for the
/// decaying solution, +1 for the growing one. Valid for mu0^2/y0 < 0.1.
AsymptoticSum tricomi_psi_asymptotic(double mu0, double y0, Parity parity);

/// Same bracket differentiated with respect to y0 (for Wronskian checks).
AsymptoticSum tricomi_bracket_dy(double mu0, double y0, Parity parity);

/// The growing solution's bracket that actually satisfies the radial
/// equation termwise: (1/y0) sum_n prod_{j=1..n}(mu0^2 + j^2)/(n! y0^n).
/// The plus-parity series above reproduces the form quoted alongside the
/// decaying one in the source material but leaves an O(y) defect when
/// substituted into the equation; Wronskian checks need this one.
AsymptoticSum growing_bracket_corrected(double mu0, double y0, int dorder = 0);

/// Mixture coefficient ratio N2/N1 that kills the growing solution at r = 0,
/// in log form: ratio = sign * exp(log_abs).
struct LogRatio {
    double log_abs;
    int sign;
};
LogRatio regular_mixture(double mu0, double y0_at_zero);

/// I(mu0) = int_0^inf (coth t - 1/t) e^{-t} sin(2 mu0 t) dt/t by the folded
/// finite-interval quadrature.
double integral_I_quadrature(double mu0);

/// The same quantity from the Bernoulli-number series (asymptotic in mu0;
/// trustworthy only when the returned error estimate is small).
AsymptoticSum integral_I_bernoulli(double mu0);

/// arg[Gamma(2 i mu0)/Gamma(i mu0)] via the duplication formula. The
/// Bernoulli route cross-checks the quadrature wherever it converges.
double arg_gamma_ratio(double mu0);

/// Exact phase parameter of the inner-wall solution:
/// phi0 = mu0 (alpha0 r0 + 1 - ln 2 - ln(1+4 mu0^2)/2) + I/2.
double phi0(double mu0, double alpha0, double r0);

/// Amplitude/phase of the grouped small-y0 series for the oscillating
/// solution factor; equals exp(-y0/2) Phi(i mu0, 2 i mu0 + 1; y0).
struct AmpPhase {
    double amplitude;
    double phase;
};
AmpPhase amplitude_phase_A0B0(double mu0, double y0);

/// Bernoulli numbers in the all-positive convention: B1 = 1/6, B2 = 1/30, ...
/// Exact rational recurrence, n <= 60.
double bernoulli_number(int n);

}  // namespace refpot::specfun

#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "refpot/numerics.hpp"
#include "refpot/potential.hpp"

namespace refpot::phaseshift {

struct PhaseShiftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Method { ode_tail, asymptotic };

/// High-energy expansion delta(k) = a1/k + a3/k^3 + ... + a9/k^9, built from
/// the closed-form chain integrals of the potential.
struct AsymptoticCoeffs {
    double a1 = 0, a3 = 0, a5 = 0, a7 = 0, a9 = 0;
    double operator()(double k) const;
};
AsymptoticCoeffs asymptotic_coeffs(const ReferencePotential& pot);

/// Variable-phase equation delta' = -V/(C k) sin^2(k r + delta), delta(0) = 0,
/// integrated to r_end.
double integrate_phase(const std::function<double(double)>& V, double c_const, double k,
                       double r_end, const numerics::Tolerance& tol = {1e-13, 1e-12});

/// Same for a reference potential, stopping at the analytic-tail boundary.
double integrate_phase(const ReferencePotential& pot, double k,
                       const numerics::Tolerance& tol = {1e-13, 1e-12});

/// Radius where the ODE hands over to the analytic tail form (the last join
/// boundary; the component center for a single-piece potential).
double tail_boundary(const ReferencePotential& pot);

/// Analytic continuation of the phase through the last Morse piece.
/// The tail solution is matched to (u, u') implied by the incoming phase and
/// the asymptotic phase of the matched combination is extracted; the 2*pi
/// winding is resolved against a reference ladder that is continuous in k.
class TailClosure {
public:
    explicit TailClosure(const ReferencePotential& pot);

    /// Pre-resolve the winding ladder for queries in [k_lo, k_hi].
    void prepare(double k_lo, double k_hi);

    /// delta(k) - delta(X, k): the full tail contribution, winding included.
    double increment(double k, double delta_at_boundary) const;

    bool trivial() const { return trivial_; }
    double boundary() const { return X_; }

private:
    struct TailWave {
        std::complex<double> h, hp;  // tail solution and derivative at X
    };
    TailWave wave(double k) const;
    double principal_increment(double k, double delta2) const;
    double reference(double k) const;  // laddered increment at delta2 = 0

    bool trivial_ = true;
    double X_ = 0, alpha_ = 0, r0_ = 0;
    std::complex<double> abar_;  // sqrt(d/C)/alpha, principal branch
    std::map<double, double> ladder_;  // k -> resolved increment at delta2 = 0
};

/// delta(k) by ODE plus tail closure (one-shot; builds its own closure unless
/// one is supplied).
double delta_at(const ReferencePotential& pot, double k,
                const numerics::Tolerance& tol = {1e-13, 1e-12},
                const TailClosure* closure = nullptr);

struct PhaseShiftCurve {
    std::vector<double> k;       // 1/A, ascending
    std::vector<double> delta;   // rad, continuous branch
    std::vector<Method> method;
    AsymptoticCoeffs coeffs;
    double k_switch = 0;
    // validation band where both routes were evaluated
    std::vector<double> band_k, band_ode, band_asym;
    std::string potential_fingerprint;

    double energy_of(std::size_t i, double c_const) const { return c_const * k[i] * k[i]; }
};

struct CurveOptions {
    double k_switch = 0;             // 0: found automatically
    double switch_target = 1e-5;     // rad, route agreement defining k_switch
    numerics::Tolerance ode_tol{1e-13, 1e-12};
    unsigned threads = 0;            // 0: REFPOT_THREADS or hardware
};

PhaseShiftCurve build_curve(const ReferencePotential& pot, double k_min, double k_max,
                            int n_points, const CurveOptions& opts = {});

/// delta(0+) - delta(inf) - n pi with delta(inf) = 0 by the asymptotic series.
double levinson_residual(const PhaseShiftCurve& curve, int n_bound);

struct ScatteringLengthFit {
    double R0 = 0;          // A
    double max_residual = 0;  // rad over the fit window
    int points_used = 0;
};
/// Fit delta = n pi - arctan(k R0) on the low-k window (k R0 < 0.1).
ScatteringLengthFit scattering_length(const PhaseShiftCurve& curve, int n_bound);
/// Same fit restricted to [k_lo, k_hi].
ScatteringLengthFit scattering_length_window(const PhaseShiftCurve& curve, int n_bound,
                                             double k_lo, double k_hi);

}  // namespace refpot::phaseshift

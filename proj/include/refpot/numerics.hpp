#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace refpot::numerics {

/// Shared accuracy budget. Defaults are tight enough for the 8-digit targets
/// used throughout; callers loosen them explicitly where speed matters.
struct Tolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_evals = 50'000'000;
};

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ScalarField = std::function<double(double, double)>;
using Fn = std::function<double(double)>;

/// Adaptive embedded-pair integration of y' = f(r, y) from r0 to r1.
double integrate_ode(const ScalarField& f, double y0, double r0, double r1,
                     const Tolerance& tol = {});

/// Same, sampling the dense solution at the given (monotone) points.
std::vector<double> integrate_ode_sampled(const ScalarField& f, double y0,
                                          double r0, double r1,
                                          const std::vector<double>& at,
                                          const Tolerance& tol = {});

/// Two-component variant, used for log-amplitude/Riccati systems.
std::array<double, 2> integrate_ode2(
    const std::function<std::array<double, 2>(double, const std::array<double, 2>&)>& f,
    std::array<double, 2> y0, double r0, double r1, const Tolerance& tol = {});

/// Adaptive Gauss-Kronrod quadrature on [a, b].
double adaptive_quadrature(const Fn& f, double a, double b,
                           const Tolerance& tol = {});

/// Quadrature on [a, b] split into geometric panels; robust when the
/// integrand lives on a logarithmic scale (b/a spanning many decades).
double adaptive_quadrature_log(const Fn& f, double a, double b,
                               const Tolerance& tol = {});

/// Cauchy principal value  P int_a^b f(x)/(x - pole) dx  with pole in (a, b).
/// Symmetric-window subtraction around the pole, adaptive panels outside.
double principal_value(const Fn& f, double pole, double a, double b,
                       const Tolerance& tol = {});

/// int_0^inf g(k) cos(w k) dk for a decaying envelope.
/// Filon-type product panels (exact for quadratic envelope x cosine per panel)
/// on [0, k_cut] for the numeric envelope, on [k_cut, k_far] for the caller's
/// analytic tail model, and the leading tail_k2/k^2 closed form beyond k_far.
struct OscillatoryTail {
    Fn analytic_envelope;  // valid for k >= k_cut
    double tail_k2 = 0.0;  // analytic_envelope(k) -> tail_k2 / k^2
    double k_far = 0.0;    // closed form beyond this point (0: 64*k_cut)
};
double oscillatory_cos_integral(const Fn& g, double omega, double k_cut,
                                const OscillatoryTail& tail,
                                const Tolerance& tol = {});

/// Filon quadrature of int_a^b g(k) cos(w k) dk with panel doubling until
/// the result is stable to tol.
double filon_cos(const Fn& g, double a, double b, double omega,
                 const Tolerance& tol = {});

/// Bracketed root refinement (superlinear with bisection fallback).
double find_root(const Fn& f, double x1, double x2, const Tolerance& tol = {});

/// Sine integral Si(x) = int_0^x sin t / t dt.
double sin_integral(double x);

// ---------------------------------------------------------------------------
// Numerov propagation (fourth order), with rescaling so that solutions
// growing by thousands of decades stay representable.  Only ratios and the
// accumulated log-scale are meaningful.

struct NumerovResult {
    std::vector<double> u;   // rescaled samples, aligned with the caller grid
    double log_scale;        // ln of the factor divided out of u
    int nodes;               // sign changes
};

/// Propagate u'' = q(r) u over a uniform grid r_i = r0 + i h given the first
/// two values. q is sampled once per grid point.
NumerovResult numerov_propagate(const std::vector<double>& q, double h,
                                double u0, double u1);

/// Node count of a sampled solution (strict sign changes).
int count_nodes(const std::vector<double>& u);

// ---------------------------------------------------------------------------
// Regular-solution launcher.  For u'' = q(r) u with lim_{r->0} u/r = 1 the
// amplitude through a steep inner barrier overflows any float; this carries
// ln u and the log-derivative from a series start at r0 out to rs.

struct RegularLaunch {
    double log_u;   // ln u(rs) under the u ~ r normalization
    double omega;   // u'(rs)/u(rs)
};
RegularLaunch regular_launch(const Fn& q, double r0, double rs,
                             const Tolerance& tol = {});

// ---------------------------------------------------------------------------
// Monotone cubic interpolation (Steffen). Overshoot-free, C^1.

class SteffenSpline {
public:
    SteffenSpline() = default;
    SteffenSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, c1_, c2_, c3_;
};

/// log-sum-exp accumulator for sums of signed terms given as (log|t|, sign).
struct LogSum {
    double log_abs = -1e300;
    int sign = 0;
    void add(double log_term, int term_sign);
};

/// Worker count: explicit request, else REFPOT_THREADS, else hardware.
unsigned thread_count(unsigned requested = 0);

/// Index-parallel map with deterministic per-index writes.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace refpot::numerics

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "refpot/boundstates.hpp"
#include "refpot/jost.hpp"
#include "refpot/numerics.hpp"
#include "refpot/potential.hpp"

namespace refpot::spectral {

struct SpectralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// g(k) = |F(k)|^{-2} - 1 as a smooth function of k: interpolated on the Jost
/// curve, closed-form tail beyond it.
class GFunction {
public:
    GFunction(const jost::JostCurve& curve, const ReferencePotential& pot);
    double operator()(double k) const;
    double k_grid_max() const { return k_max_; }
    double tail_k2() const { return tail_k2_; }  // g -> tail_k2 / k^2
    std::function<double(double)> tail() const;

private:
    numerics::SteffenSpline spline_;  // g vs ln k
    double k_min_ = 0, k_max_ = 0, g_front_ = 0;
    double v0_ = 0, vpp0_ = 0, tail_k2_ = 0;  // v-units moments for the tail
};

/// Spectral density and the measure difference against the free particle.
class SpectralDensity {
public:
    SpectralDensity(const jost::JostCurve& curve, const boundstates::BoundSpectrum& spectrum,
                    const ReferencePotential& pot);
    /// continuous part sqrt(E) |F|^{-2} / pi, E >= 0 (0 at E = 0).
    double continuous(double energy) const;
    double log_continuous(double energy) const;
    /// d sigma / dE = sqrt(E) g(E) / pi  (deviation from the free density).
    double dsigma_dE(double energy) const;
    const boundstates::BoundSpectrum& discrete() const { return *spectrum_; }

private:
    numerics::SteffenSpline ln_f_;  // ln|F| vs ln E
    numerics::SteffenSpline g_;     // g vs ln E
    double e_min_, e_max_, lnf_front_, g_front_;
    jost::PotentialRouteAsym tail_;
    const boundstates::BoundSpectrum* spectrum_;
};

/// Continuum input of the kernel quadrature.
struct ContinuumSpec {
    std::function<double(double)> g;               // numeric envelope on [0, k_cut]
    double k_cut = 0;                              // 0: no continuum part
    std::function<double(double)> g_analytic_tail; // k >= k_cut
    double tail_k2 = 0;                            // leading tail_k2 / k^2
    double k_far = 0;                              // 0: 64 k_cut
};

/// G(r, r') = (2/pi) int_0^inf sin(kr) sin(kr') g(k) dk
///          + sum_n C_n/(4 gamma_n^2) sinh(gamma_n r) sinh(gamma_n r').
/// Product-to-sum split, Filon quadrature, bound sum in log space.
double gl_kernel(double r, double rp, const ContinuumSpec& cont,
                 const boundstates::BoundSpectrum& spectrum,
                 const numerics::Tolerance& tol = {1e-11, 1e-9});

struct KernelGridSpec {
    double r_min = 0.5, r_max = 10.0;
    int n = 50;
};

struct GLKernelGrid {
    std::vector<double> r;
    std::vector<double> values;  // row-major, symmetric
    double k_cut = 0;
    double abs_tol = 0, rel_tol = 0;
    std::string spectrum_fingerprint;
    std::string norming_convention;
    double at(std::size_t i, std::size_t j) const { return values[i * r.size() + j]; }
};

GLKernelGrid build_kernel_grid(const KernelGridSpec& spec, const ContinuumSpec& cont,
                               const boundstates::BoundSpectrum& spectrum,
                               const numerics::Tolerance& tol = {1e-11, 1e-9},
                               unsigned threads = 0);

/// Plain-text matrix with a JSON metadata header line. Byte-stable.
void export_kernel(const GLKernelGrid& grid, const std::string& path);

/// ContinuumSpec for the physical g of a potential (tail from the closed
/// form; k_cut defaults to the curve's k_a).
ContinuumSpec continuum_for(const GFunction& g, const ReferencePotential& pot, double k_cut = 0);

}  // namespace refpot::spectral

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "refpot/potential.hpp"

namespace refpot::boundstates {

struct BoundStatesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BoundState {
    int n = 0;
    double energy = 0.0;        // meV, < 0
    double gamma = 0.0;         // sqrt(-E/C), 1/A
    double log_norming = 0.0;   // ln C_n under the regular-solution convention
    bool has_norming = false;
    /// C_n = 1 / int phi_n^2 dr with lim phi/r = 1. Underflows to 0 for steep
    /// inner walls; log_norming is the faithful value.
    double norming() const;
};

struct BoundSpectrum {
    std::vector<BoundState> states;
    std::string potential_fingerprint;
};

struct SolverOptions {
    double grid_h = 1.0e-3;        // Numerov step (A)
    double barrier_action = 55.0;  // WKB suppression budget for the inner start
    double tail_action = 30.0;     // gamma * (R_out - outer turning point)
    double r_floor = 1.0e-5;       // innermost start when there is no wall
    double energy_tol = 1.0e-9;    // bracket width target (meV)
    bool richardson = true;        // h -> h/2 extrapolation of eigenvalues
    // fixed-geometry overrides (0: automatic); used for common-grid overlaps
    double force_r_in = 0, force_r_out = 0, force_h = 0;
};

/// Generic radial problem u'' = ((V - E)/C) u on (0, inf).
struct RadialProblem {
    std::function<double(double)> V;
    double c_const;
};

/// Discrete spectrum in (e_lo, 0); e_lo defaults to just below the potential
/// minimum. Two-sided shooting, node-count bracketing; an unsplittable node
/// staircase jump aborts with diagnostics.
BoundSpectrum find_eigenvalues(const RadialProblem& prob, double v_min,
                               std::optional<double> e_lo = std::nullopt,
                               const SolverOptions& opts = {});
BoundSpectrum find_eigenvalues(const ReferencePotential& pot,
                               std::optional<double> e_lo = std::nullopt,
                               const SolverOptions& opts = {});

/// Fill ln C_n = -ln int_0^inf phi_n(r)^2 dr for every state.
void fill_norming_constants(const RadialProblem& prob, BoundSpectrum& spectrum,
                            const SolverOptions& opts = {});
void fill_norming_constants(const ReferencePotential& pot, BoundSpectrum& spectrum,
                            const SolverOptions& opts = {});

/// Unit-norm eigenfunction on the solver grid (for node/overlap checks).
struct Eigenfunction {
    double r_first = 0.0, h = 0.0;
    std::vector<double> u;
    int nodes = 0;
};
Eigenfunction eigenfunction(const RadialProblem& prob, double energy,
                            const SolverOptions& opts = {});
Eigenfunction eigenfunction(const ReferencePotential& pot, double energy,
                            const SolverOptions& opts = {});

}  // namespace refpot::boundstates

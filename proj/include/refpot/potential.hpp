#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace refpot {

struct PotentialError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One analytic piece V(r) = v + d (exp(-alpha (r - r0)) - 1)^2.
/// Energies in meV, lengths in Angstrom; d may be negative (reversed piece).
struct MorseComponent {
    double v = 0.0;      // energy offset (meV)
    double d = 0.0;      // well parameter (meV)
    double alpha = 1.0;  // inverse width (1/A), > 0
    double r0 = 0.0;     // center (A)
    int index = 0;

    double y(double r) const;
    /// V and its first three derivatives, analytically.
    double eval(double r, int order = 0) const;
};

struct Moments {
    double W = 0.0;    // int V dr        (meV*A)
    double U = 0.0;    // int V^2 dr      (meV^2*A)
    double T3 = 0.0;   // int V^3 dr      (meV^3*A)
    double DW = 0.0;   // int (V')^2 dr   (meV^2/A)
    double V0 = 0.0;   // V(0)
    double Vp0 = 0.0;  // V'(0)
    double Vpp0 = 0.0;
    double Vppp0 = 0.0;
};

/// Smoothly joined multi-component Morse potential on (0, inf).
/// Immutable after construction; all evaluation is pure.
class ReferencePotential {
public:
    /// components k = 0..K-1 living on (0,X_1], (X_1,X_2], ..., (X_{K-1},inf).
    /// Validates smooth joins, the pseudo-Morse constraint on component 0
    /// when `pseudo_first` is set, and the vanishing tail of the last piece.
    ReferencePotential(std::vector<MorseComponent> components,
                       std::vector<double> boundaries, double c_const,
                       bool pseudo_first = false, std::string fingerprint = "");

    static ReferencePotential free_particle(double c_const);

    double eval(double r, int order = 0) const;
    double operator()(double r) const { return eval(r, 0); }

    double c_const() const { return c_;  }
    bool is_free() const { return comps_.empty(); }
    const std::vector<MorseComponent>& components() const { return comps_; }
    const std::vector<double>& boundaries() const { return bounds_; }
    const std::string& fingerprint() const { return fingerprint_; }

    /// Global minimum of V (meV).
    double min_energy() const;

    /// Closed-form moments and origin derivatives.
    Moments moments() const;

    /// Closed-form integrals I_n = int_0^inf e_n dr of the high-energy
    /// log-derivative expansion chain, in v = V/C units; index 1..9.
    /// e_1 = v, e_2 = -v', e_3 = v'' - v^2, ... (see phaseshift docs).
    std::array<double, 10> chain_integrals() const;

    /// Largest residuals |dV|, |dV'| across the joins (diagnostics).
    std::array<double, 2> join_residuals() const;

private:
    std::size_t segment_of(double r) const;
    std::vector<MorseComponent> comps_;
    std::vector<double> bounds_;
    double c_;
    std::string fingerprint_;
};

/// Solve the two continuity equations V(X)=value, V'(X)=slope for a new
/// component. The anchor supplies the fixed parameters.
enum class JoinMode {
    solve_v_r0,            // d and alpha fixed (e.g. pseudo-Morse inner wall)
    solve_v_r0_tail_zero,  // alpha fixed, d tied to -v (vanishing tail piece)
};
MorseComponent smooth_join(const MorseComponent& anchor, double boundary,
                           double value, double slope, JoinMode mode);

/// Parse and validate a potential config file (JSON, // comments allowed).
/// Derived parameters are recomputed from the joins and compared against the
/// values in the file; disagreement beyond 1e-3 relative is an error.
ReferencePotential load_config(const std::string& path);
ReferencePotential parse_config(const std::string& text, const std::string& origin = "<memory>");

}  // namespace refpot

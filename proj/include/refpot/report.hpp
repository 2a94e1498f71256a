#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "refpot/boundstates.hpp"
#include "refpot/jost.hpp"
#include "refpot/phaseshift.hpp"
#include "refpot/potential.hpp"
#include "refpot/spectral.hpp"

namespace refpot::report {

struct PipelineOptions {
    double k_min = 1e-5;
    double k_max = 75000.0;
    int curve_points = 1100;
    double k_a = 75000.0;
    int jost_points = 420;
    unsigned threads = 0;
    numerics::Tolerance ode_tol{1e-13, 1e-12};
    double k_switch = 0;  // 0: automatic
};

/// Everything the downstream stages and checks share, computed once.
struct Pipeline {
    ReferencePotential pot;
    boundstates::BoundSpectrum spectrum;
    phaseshift::PhaseShiftCurve curve;
    jost::JostCurve jcurve;
    PipelineOptions opts;
    double eigen_seconds = 0;

    const jost::PhaseInterpolant& interp() const { return *interp_; }
    Pipeline(ReferencePotential p, PipelineOptions o);

private:
    std::shared_ptr<jost::PhaseInterpolant> interp_;
    friend Pipeline run_pipeline(const ReferencePotential&, const PipelineOptions&);
};

Pipeline run_pipeline(const ReferencePotential& pot, const PipelineOptions& opts = {});

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0;
    double target = 0;
    std::string detail;
};

/// The full acceptance battery for the bundled xe2 configuration.
std::vector<CheckResult> acceptance_checks(const Pipeline& pipe);

/// Reference eigenvalues of the bundled xe2 configuration (regression data).
const std::vector<double>& xe2_reference_levels();

}  // namespace refpot::report

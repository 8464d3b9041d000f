#pragma once

// Pump-parameter sweeps, phase-offset calibration and simplex tuning.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "nonrecip/cmt.hpp"
#include "nonrecip/metrics.hpp"

namespace nonrecip {

using Channel = std::pair<std::size_t, std::size_t>;  // (out, in)

/// |S_{out,in}| over a (φ_tot, δ) grid, one plane per channel.
struct PhaseMap {
    std::vector<double> phis;
    std::vector<double> deltas;
    std::vector<Channel> channels;
    std::vector<double> magnitude;  // [channel][phi][delta], row-major

    double at(std::size_t channel, std::size_t phi, std::size_t delta) const {
        return magnitude[(channel * phis.size() + phi) * deltas.size() + delta];
    }
};

PhaseMap phase_sweep(const ValidatedDevice& device, std::span<const double> phi_grid,
                     std::span<const double> delta_grid, std::span<const Channel> channels);
PhaseMap phase_sweep_serial(const ValidatedDevice& device, std::span<const double> phi_grid,
                            std::span<const double> delta_grid, std::span<const Channel> channels);

struct ConversionPoint {
    double conversion = 0.0;
    double rho = 0.0;
    double input_match = 0.0;   // |S_{S,S}(0)|
    double forward_gain = 0.0;  // |S_{I,S}(0)|
    bool stable = true;
};

struct ConversionSweep {
    PortRole roles;
    double pair_gain = 1.0;   // power gain of the S-I process
    double threshold = 0.0;   // 1 - 1/pair_gain
    std::vector<ConversionPoint> points;
};

/// Re-solves the directional amplifier on resonance for each conversion
/// coefficient (under-coupled branch). Roles come from the template phase.
ConversionSweep conversion_sweep(const ValidatedDevice& device_template, std::span<const double> c_grid);

/// A device whose physical phase knob is offset from the true total phase:
/// φ_tot = knob + offset.
struct PhaseOffsetDevice {
    ValidatedDevice device;
    double offset = 0.0;

    ValidatedDevice at_knob(double knob) const { return with_total_phase(device, knob + offset); }
};

struct PhaseCalibration {
    double knob_plus = 0.0;   // knob setting for φ_tot = +π/2, in [0, 2π)
    double knob_minus = 0.0;  // knob setting for φ_tot = -π/2, in [0, 2π)

    /// Offset implied by the + branch, wrapped to [0, 2π).
    double offset() const;
};

/// Circulators: the two knob values minimising |S_bb(0)| (b = middle mode).
/// Directional amplifiers: the two extrema of |S_II(0)| at the working
/// points. Coarse scan plus golden-section refinement.
PhaseCalibration calibrate_phase_offset(const PhaseOffsetDevice& device, std::size_t coarse_points = 360);

enum class ObjectiveKind { CirculatorCW, CirculatorCCW, DirectionalAmp };

struct Objective {
    ObjectiveKind kind = ObjectiveKind::CirculatorCW;
    double target_gain_db = 0.0;
    double match_weight = 1.0;
    double isolation_weight = 1.0;
};

struct TuneParams {
    std::vector<double> rhos;  // one per coupling, device order
    double phi_tot = 0.0;
};

struct TuneResult {
    TuneParams params;
    ValidatedDevice device;
    std::vector<double> trace;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

inline constexpr double kObjectivePenalty = 200.0;

/// Applies params to the template. Throws the validation error when the
/// parameters break a coupling invariant.
ValidatedDevice apply_params(const ValidatedDevice& device_template, const TuneParams& params);

TuneParams params_of(const ValidatedDevice& device);

/// Objective in dB; kObjectivePenalty for invalid, unstable or singular
/// parameter sets. roles is only read for DirectionalAmp.
double objective_value(const ValidatedDevice& device_template, const Objective& objective, const TuneParams& params,
                       const PortRole& roles);

TuneResult tune(const ValidatedDevice& device_template, const Objective& objective, const TuneParams& initial,
                int budget = 2000);

}  // namespace nonrecip

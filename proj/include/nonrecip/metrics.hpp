#pragma once

// Figures of merit derived from scattering matrices and sweeps.
//
// Index convention: mode k is the k-th mode in alphabetical order (the
// validated device order). For three modes m0 < m1 < m2 the clockwise
// cycle is m0 -> m1 -> m2 -> m0.

#include <array>
#include <cstddef>

#include "nonrecip/cmt.hpp"

namespace nonrecip {

double to_db(double power_ratio);
double amp_db(double amplitude);

enum class Circulation { CW, CCW, None };

std::string_view to_string(Circulation c);

Circulation circulation_sense(const ScatteringMatrix& s, double isolation_margin_db = 10.0);

/// Width (Hz) of the contiguous band around δ = 0 where every port is
/// matched below match_db and every forward transmission loses at most
/// loss_db. Band edges are linearly interpolated between grid points.
double circulator_bandwidth(const SweepResult& sweep, double match_db = -10.0, double loss_db = 1.0);

/// Full width (Hz) around δ = 0 where |S_{to,from}|^2 stays above half its
/// center value. Returns the grid span when it never drops that far.
double gain_bandwidth_3db(const SweepResult& sweep, std::size_t from_mode, std::size_t to_mode);

/// Output noise per port in dB, vacuum at every input, relative to pumps off.
std::array<double, 3> nvr(const ScatteringMatrix& s);

/// Added noise in photons referred to the input: vacuum from every other
/// input at the output port, divided by the signal power gain.
double added_noise(const ScatteringMatrix& s, std::size_t signal_port, std::size_t output_port);

/// max |S Σ S^† - Σ| with Σ = diag(±1) from the conjugation frame.
double symplectic_defect(const ScatteringMatrix& s);

enum class Role { Signal, Idler, Vacuum };

struct PortRole {
    std::size_t signal = 0;
    std::size_t idler = 0;
    std::size_t vacuum = 0;

    Role role_of(std::size_t mode) const {
        return mode == signal ? Role::Signal : mode == idler ? Role::Idler : Role::Vacuum;
    }
};

/// Port roles of a directional amplifier at the given total phase. The idler
/// is the mode shared by both gain processes. For sin φ < 0 the signal is the
/// leading mode of the conversion term: m0 for pairs (m0,m1) and (m0,m2),
/// m2 for (m1,m2).
PortRole role_map(const ValidatedDevice& device, double phi_tot);

struct CirculatorFigures {
    Circulation sense = Circulation::None;
    double worst_match_db = 0.0;           // max_m |S_mm|^2 in dB
    double worst_insertion_loss_db = 0.0;  // max over forward paths of -|S|^2 dB
    double worst_isolation_db = 0.0;       // min over reverse paths of -|S|^2 dB
};

/// Evaluated in the sense found by circulation_sense; CW when None.
CirculatorFigures circulator_figures(const ScatteringMatrix& s);

struct AmplifierFigures {
    PortRole roles;
    double forward_gain_db = 0.0;   // S -> I
    double signal_to_vacuum_db = 0.0;
    double vacuum_to_signal_db = 0.0;
    double reverse_isolation_db = 0.0;  // -(I -> S)
    double signal_match_db = 0.0;
    double vacuum_match_db = 0.0;
    std::array<double, 3> nvr_db{};
    double added_noise_photons = 0.0;  // S -> I
};

AmplifierFigures amplifier_figures(const ScatteringMatrix& s, const PortRole& roles);

}  // namespace nonrecip

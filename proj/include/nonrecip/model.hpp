#pragma once

// Domain types for a three-mode parametrically pumped circuit: resonant modes,
// pairwise pump couplings, and the validated device the solver consumes.
//
// Frequencies and decay rates are ordinary frequencies in Hz (ω/2π, κ/2π).
// Coupling strengths are the dimensionless ratio rho = |g|^2 / (κ_i κ_j).

#include <array>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nonrecip {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ModeSpec {
    std::string name;
    double resonance_freq = 0.0;  // Hz
    double kappa = 0.0;           // Hz
};

enum class ProcessKind { Gain, Conversion };

std::string_view to_string(ProcessKind kind);

/// Unordered pair of mode names; stored so that first() <= second().
class ModePair {
public:
    ModePair() = default;
    ModePair(std::string x, std::string y);

    const std::string& first() const noexcept { return first_; }
    const std::string& second() const noexcept { return second_; }
    bool contains(std::string_view name) const noexcept { return first_ == name || second_ == name; }

    friend bool operator==(const ModePair&, const ModePair&) = default;
    friend auto operator<=>(const ModePair&, const ModePair&) = default;

private:
    std::string first_;
    std::string second_;
};

struct PumpedCoupling {
    ModePair pair;
    ProcessKind kind = ProcessKind::Conversion;
    double rho = 0.0;
    double phase = 0.0;  // radians

    friend bool operator==(const PumpedCoupling&, const PumpedCoupling&) = default;
};

struct DeviceConfig {
    std::array<ModeSpec, 3> modes;
    std::vector<PumpedCoupling> couplings;
    double pump_detuning_tolerance = 10e6;  // Hz
};

/// Per-channel bookkeeping. A conjugated channel carries the idler envelope:
/// its physical probe frequency is carrier_freq - δ.
struct ChannelInfo {
    bool conjugated = false;
    double carrier_freq = 0.0;
    int detuning_sign = +1;

    friend bool operator==(const ChannelInfo&, const ChannelInfo&) = default;
};

using ChannelFrame = std::array<ChannelInfo, 3>;

enum class Topology {
    Uncoupled,       // no couplings
    Partial,         // one or two couplings, no closed loop
    Circulator,      // three conversions
    DirectionalAmp,  // two gains sharing a mode plus one conversion
};

enum class PhaseConvention { Circulator, DirectionalAmp };

struct TotalPumpPhase {
    double value = 0.0;
    PhaseConvention convention = PhaseConvention::Circulator;
};

class ValidatedDevice;

/// Checks every invariant of a device description and fixes its canonical
/// form: modes sorted by name, couplings sorted by pair, phases wrapped to
/// [0, 2π), and a channel conjugation frame assigned.
ValidatedDevice validate_device(const DeviceConfig& config);

class ValidatedDevice {
public:
    /// Empty placeholder (no couplings); obtain real devices from validate_device.
    ValidatedDevice() = default;

    const std::array<ModeSpec, 3>& modes() const noexcept { return config_.modes; }
    std::span<const PumpedCoupling> couplings() const noexcept { return config_.couplings; }
    const ChannelFrame& frame() const noexcept { return frame_; }
    double pump_detuning_tolerance() const noexcept { return config_.pump_detuning_tolerance; }
    Topology topology() const noexcept { return topology_; }

    /// Canonical configuration; validating it again yields an equal device.
    const DeviceConfig& config() const noexcept { return config_; }

    std::size_t index_of(std::string_view name) const;

    /// Index into couplings() of the process on the given pair, or -1.
    int coupling_index(const ModePair& pair) const noexcept;

private:
    friend ValidatedDevice validate_device(const DeviceConfig& config);

    DeviceConfig config_;
    ChannelFrame frame_{};
    Topology topology_ = Topology::Uncoupled;
};

/// Ideal pump frequency for a process: sum of the two mode frequencies for
/// gain, their absolute difference for conversion.
double pump_frequency_for(const PumpedCoupling& coupling, std::span<const ModeSpec> modes);

/// Name of the mode the pump is applied to: the one not in the coupled pair.
std::string pumped_mode(const PumpedCoupling& coupling, const ValidatedDevice& device);

/// Compares declared pump frequencies (Hz, keyed by pumped mode) against the
/// ideal values and checks the frequency closure of the three pumps.
std::vector<std::string> check_pump_closure(const ValidatedDevice& device,
                                            const std::map<std::string, double>& declared_pumps);

/// Signed coefficients (one per coupling, in couplings() order) whose
/// weighted sum of coupling phases is the gauge-invariant loop phase.
/// Throws TopologyError unless the device is a Circulator or DirectionalAmp.
std::array<int, 3> loop_coefficients(const ValidatedDevice& device);

/// Gauge-invariant loop phase, wrapped to (-pi, pi].
TotalPumpPhase total_pump_phase(const ValidatedDevice& device);

/// Returns a copy of the device whose total pump phase equals phi. Only the
/// coupling driven by the pump on the last mode (alphabetically) changes.
ValidatedDevice with_total_phase(const ValidatedDevice& device, double phi);

/// Wraps an angle into [0, 2π).
double wrap_phase(double phase);

}  // namespace nonrecip

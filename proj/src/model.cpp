#include "nonrecip/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <set>

#include "nonrecip/error.hpp"

namespace nonrecip {

std::string_view to_string(ProcessKind kind) {
    return kind == ProcessKind::Gain ? "gain" : "conversion";
}

ModePair::ModePair(std::string x, std::string y) : first_(std::move(x)), second_(std::move(y)) {
    if (second_ < first_) std::swap(first_, second_);
}

double wrap_phase(double phase) {
    double w = std::fmod(phase, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a value just below a multiple of 2π can round up to 2π itself.
    if (w >= kTwoPi) w = 0.0;
    return w;
}

namespace {

std::string fmt_hz(double hz) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g GHz", hz * 1e-9);
    return buf;
}

void check_modes(const std::array<ModeSpec, 3>& modes) {
    for (const auto& m : modes) {
        if (m.name.empty()) throw Error(ErrorKind::InvalidMode, "mode name must be non-empty");
        if (!(m.resonance_freq > 0.0) || !std::isfinite(m.resonance_freq)) {
            throw Error(ErrorKind::InvalidMode, "mode '" + m.name + "' needs resonance_freq > 0");
        }
        if (!(m.kappa > 0.0) || !std::isfinite(m.kappa)) {
            throw Error(ErrorKind::InvalidMode, "mode '" + m.name + "' needs kappa > 0");
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            if (modes[i].name == modes[j].name) {
                throw Error(ErrorKind::InvalidMode, "duplicate mode name '" + modes[i].name + "'");
            }
            if (modes[i].resonance_freq == modes[j].resonance_freq) {
                throw Error(ErrorKind::InvalidMode,
                            "modes '" + modes[i].name + "' and '" + modes[j].name + "' share a resonance frequency");
            }
        }
    }
}

// Two-colors the coupling graph: conversion edges keep the class, gain edges
// flip it. Each connected component is rooted at its alphabetically first
// mode, which stays un-conjugated.
std::array<bool, 3> assign_conjugation(const std::array<ModeSpec, 3>& modes,
                                       const std::vector<PumpedCoupling>& couplings) {
    auto index = [&](const std::string& n) {
        for (std::size_t i = 0; i < 3; ++i)
            if (modes[i].name == n) return i;
        return std::size_t{3};
    };
    std::array<std::optional<bool>, 3> colour;
    for (std::size_t root = 0; root < 3; ++root) {  // modes are sorted, so roots come in name order
        if (colour[root]) continue;
        colour[root] = false;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& c : couplings) {
                std::size_t i = index(c.pair.first());
                std::size_t j = index(c.pair.second());
                bool flip = c.kind == ProcessKind::Gain;
                for (auto [u, v] : {std::pair{i, j}, std::pair{j, i}}) {
                    if (colour[u] && !colour[v]) {
                        colour[v] = *colour[u] != flip;
                        changed = true;
                    }
                }
            }
        }
    }
    for (const auto& c : couplings) {
        bool ci = *colour[index(c.pair.first())];
        bool cj = *colour[index(c.pair.second())];
        bool want_equal = c.kind == ProcessKind::Conversion;
        if ((ci == cj) != want_equal) {
            throw Error(ErrorKind::FrustratedConjugation,
                        "no consistent conjugation assignment exists for this set of gain/conversion processes");
        }
    }
    return {*colour[0], *colour[1], *colour[2]};
}

Topology classify(const std::vector<PumpedCoupling>& couplings) {
    if (couplings.empty()) return Topology::Uncoupled;
    if (couplings.size() < 3) return Topology::Partial;
    auto gains = std::count_if(couplings.begin(), couplings.end(),
                               [](const PumpedCoupling& c) { return c.kind == ProcessKind::Gain; });
    // Three-coupling configurations that survive conjugation checking are
    // either all-conversion or two gains plus one conversion.
    return gains == 0 ? Topology::Circulator : Topology::DirectionalAmp;
}

}  // namespace

ValidatedDevice validate_device(const DeviceConfig& config) {
    ValidatedDevice dev;
    dev.config_.pump_detuning_tolerance = config.pump_detuning_tolerance;
    if (!(config.pump_detuning_tolerance >= 0.0)) {
        throw Error(ErrorKind::InvalidMode, "pump_detuning_tolerance must be >= 0");
    }

    auto modes = config.modes;
    check_modes(modes);
    std::sort(modes.begin(), modes.end(), [](const ModeSpec& x, const ModeSpec& y) { return x.name < y.name; });
    dev.config_.modes = modes;

    if (config.couplings.size() > 3) {
        throw Error(ErrorKind::DuplicatePair, "at most three couplings (one per mode pair) are allowed");
    }
    std::set<ModePair> seen;
    std::vector<PumpedCoupling> couplings;
    for (const auto& raw : config.couplings) {
        PumpedCoupling c = raw;
        c.pair = ModePair(raw.pair.first(), raw.pair.second());
        if (c.pair.first() == c.pair.second()) {
            throw Error(ErrorKind::InvalidCoupling, "coupling pair must name two distinct modes, got '" +
                                                        c.pair.first() + "' twice");
        }
        for (const auto& n : {c.pair.first(), c.pair.second()}) {
            bool known = std::any_of(modes.begin(), modes.end(), [&](const ModeSpec& m) { return m.name == n; });
            if (!known) throw Error(ErrorKind::InvalidCoupling, "coupling names unknown mode '" + n + "'");
        }
        if (!seen.insert(c.pair).second) {
            throw Error(ErrorKind::DuplicatePair,
                        "more than one process on pair (" + c.pair.first() + "," + c.pair.second() + ")");
        }
        if (!std::isfinite(c.rho) || c.rho < 0.0) {
            throw Error(ErrorKind::InvalidCoupling, "rho must be finite and >= 0");
        }
        if (c.kind == ProcessKind::Gain && c.rho >= 1.0) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "gain rho = %.9g on (%s,%s) is at or above the oscillation threshold 1",
                          c.rho, c.pair.first().c_str(), c.pair.second().c_str());
            throw Error(ErrorKind::GainAboveThreshold, buf);
        }
        if (!std::isfinite(c.phase)) throw Error(ErrorKind::InvalidCoupling, "phase must be finite");
        c.phase = wrap_phase(c.phase);
        couplings.push_back(std::move(c));
    }
    std::sort(couplings.begin(), couplings.end(),
              [](const PumpedCoupling& x, const PumpedCoupling& y) { return x.pair < y.pair; });

    auto conj = assign_conjugation(modes, couplings);
    for (std::size_t m = 0; m < 3; ++m) {
        dev.frame_[m] = ChannelInfo{conj[m], modes[m].resonance_freq, conj[m] ? -1 : +1};
    }
    dev.topology_ = classify(couplings);
    dev.config_.couplings = std::move(couplings);
    return dev;
}

std::size_t ValidatedDevice::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < 3; ++i)
        if (config_.modes[i].name == name) return i;
    throw Error(ErrorKind::InvalidMode, "unknown mode '" + std::string(name) + "'");
}

int ValidatedDevice::coupling_index(const ModePair& pair) const noexcept {
    for (std::size_t k = 0; k < config_.couplings.size(); ++k)
        if (config_.couplings[k].pair == pair) return static_cast<int>(k);
    return -1;
}

double pump_frequency_for(const PumpedCoupling& coupling, std::span<const ModeSpec> modes) {
    auto freq = [&](const std::string& n) {
        for (const auto& m : modes)
            if (m.name == n) return m.resonance_freq;
        throw Error(ErrorKind::InvalidMode, "unknown mode '" + n + "'");
    };
    double fi = freq(coupling.pair.first());
    double fj = freq(coupling.pair.second());
    return coupling.kind == ProcessKind::Gain ? fi + fj : std::abs(fi - fj);
}

std::string pumped_mode(const PumpedCoupling& coupling, const ValidatedDevice& device) {
    for (const auto& m : device.modes())
        if (!coupling.pair.contains(m.name)) return m.name;
    throw Error(ErrorKind::InvalidCoupling, "coupling covers all modes");
}

std::vector<std::string> check_pump_closure(const ValidatedDevice& device,
                                            const std::map<std::string, double>& declared_pumps) {
    std::vector<std::string> warnings;
    const auto couplings = device.couplings();
    const double tol = device.pump_detuning_tolerance();

    // Each pump frequency as an integer combination of the mode frequencies.
    std::vector<std::array<int, 3>> combos;
    std::vector<std::optional<double>> declared;
    for (const auto& c : couplings) {
        std::size_t i = device.index_of(c.pair.first());
        std::size_t j = device.index_of(c.pair.second());
        std::array<int, 3> v{0, 0, 0};
        if (c.kind == ProcessKind::Gain) {
            v[i] = v[j] = 1;
        } else {
            bool i_high = device.modes()[i].resonance_freq > device.modes()[j].resonance_freq;
            v[i] = i_high ? 1 : -1;
            v[j] = i_high ? -1 : 1;
        }
        combos.push_back(v);

        std::string pm = pumped_mode(c, device);
        auto it = declared_pumps.find(pm);
        if (it == declared_pumps.end()) {
            warnings.push_back("no declared pump on mode '" + pm + "' for the " + std::string(to_string(c.kind)) +
                               " process on (" + c.pair.first() + "," + c.pair.second() + ")");
            declared.emplace_back();
            continue;
        }
        declared.emplace_back(it->second);
        double ideal = pump_frequency_for(c, device.modes());
        double dev = it->second - ideal;
        if (std::abs(dev) > tol) {
            warnings.push_back("pump on mode '" + pm + "' at " + fmt_hz(it->second) + " deviates from the matched " +
                               fmt_hz(ideal) + " by " + fmt_hz(dev) + " (tolerance " + fmt_hz(tol) + ")");
        }
    }

    if (couplings.size() == 3 && declared[0] && declared[1] && declared[2]) {
        // Find signs with s0*v0 + s1*v1 + s2*v2 == 0; the same signs must close the declared pumps.
        for (int s1 : {1, -1}) {
            for (int s2 : {1, -1}) {
                bool closes = true;
                for (std::size_t m = 0; m < 3; ++m)
                    closes &= combos[0][m] + s1 * combos[1][m] + s2 * combos[2][m] == 0;
                if (!closes) continue;
                double residual = *declared[0] + s1 * *declared[1] + s2 * *declared[2];
                if (std::abs(residual) > tol) {
                    warnings.push_back("declared pumps violate the frequency closure relation by " +
                                       fmt_hz(residual) + " (tolerance " + fmt_hz(tol) + ")");
                }
                return warnings;
            }
        }
    }
    return warnings;
}

std::array<int, 3> loop_coefficients(const ValidatedDevice& device) {
    const auto topo = device.topology();
    if (topo != Topology::Circulator && topo != Topology::DirectionalAmp) {
        throw Error(ErrorKind::TopologyError, "total pump phase needs a closed loop of three couplings");
    }
    const auto couplings = device.couplings();
    // How each coupling phase shifts under x_m -> e^{iθ_m} x_m, as a vector
    // over θ. Conversions use the orientation e^{iφ} x_p x_q^† with
    // (p,q) = (0,1), (0,2), (2,1); gains use e^{-iφ} x_i^† x_j^†.
    std::array<std::array<int, 3>, 3> shift{};
    for (std::size_t k = 0; k < 3; ++k) {
        std::size_t i = device.index_of(couplings[k].pair.first());
        std::size_t j = device.index_of(couplings[k].pair.second());
        std::array<int, 3> v{0, 0, 0};
        if (couplings[k].kind == ProcessKind::Gain) {
            v[i] = v[j] = 1;
        } else {
            bool reversed = (i == 1 && j == 2);
            v[i] = reversed ? -1 : 1;
            v[j] = reversed ? 1 : -1;
        }
        shift[k] = v;
    }
    for (int s0 : {1, -1}) {
        for (int s1 : {1, -1}) {
            for (int s2 : {1, -1}) {
                std::array<int, 3> s{s0, s1, s2};
                bool invariant = true;
                for (std::size_t m = 0; m < 3; ++m)
                    invariant &= s0 * shift[0][m] + s1 * shift[1][m] + s2 * shift[2][m] == 0;
                if (!invariant) continue;
                // Fix the overall sign: circulator has +1 on the (1,2) pair;
                // directional amp has -1 on its conversion.
                bool keep = false;
                for (std::size_t k = 0; k < 3; ++k) {
                    const auto& c = couplings[k];
                    if (topo == Topology::Circulator) {
                        if (device.index_of(c.pair.first()) == 1) keep = s[k] == 1;
                    } else if (c.kind == ProcessKind::Conversion) {
                        keep = s[k] == -1;
                    }
                }
                if (keep) return s;
            }
        }
    }
    throw Error(ErrorKind::TopologyError, "coupling loop has no gauge-invariant phase");
}

TotalPumpPhase total_pump_phase(const ValidatedDevice& device) {
    auto s = loop_coefficients(device);
    double v = 0.0;
    for (std::size_t k = 0; k < 3; ++k) v += s[k] * device.couplings()[k].phase;
    v = wrap_phase(v);
    if (v > std::numbers::pi) v -= 2.0 * std::numbers::pi;
    return {v, device.topology() == Topology::Circulator ? PhaseConvention::Circulator
                                                         : PhaseConvention::DirectionalAmp};
}

ValidatedDevice with_total_phase(const ValidatedDevice& device, double phi) {
    auto s = loop_coefficients(device);
    const double current = total_pump_phase(device).value;
    DeviceConfig cfg = device.config();
    const ModePair driven(device.modes()[0].name, device.modes()[1].name);
    int k = device.coupling_index(driven);
    cfg.couplings[static_cast<std::size_t>(k)].phase += s[static_cast<std::size_t>(k)] * (phi - current);
    return validate_device(cfg);
}

}  // namespace nonrecip

#pragma once

#include <numbers>
#include <random>

#include "nonrecip/cmt.hpp"
#include "nonrecip/model.hpp"

namespace fixtures {

using namespace nonrecip;

inline constexpr double kPi = std::numbers::pi;

inline std::array<ModeSpec, 3> reference_modes() {
    return {ModeSpec{"a", 9.167e9, 44e6}, ModeSpec{"b", 5.241e9, 19e6}, ModeSpec{"c", 7.174e9, 50e6}};
}

inline ValidatedDevice make(std::vector<PumpedCoupling> couplings) {
    DeviceConfig cfg;
    cfg.modes = reference_modes();
    cfg.couplings = std::move(couplings);
    return validate_device(cfg);
}

inline ValidatedDevice circulator(double c_ab, double c_bc, double c_ac, double phi) {
    auto dev = make({{ModePair("a", "b"), ProcessKind::Conversion, rho_for_conversion(c_ab), 0.0},
                     {ModePair("b", "c"), ProcessKind::Conversion, rho_for_conversion(c_bc), 0.0},
                     {ModePair("a", "c"), ProcessKind::Conversion, rho_for_conversion(c_ac), 0.0}});
    return with_total_phase(dev, phi);
}

inline ValidatedDevice reference_circulator(double phi = kPi / 2) { return circulator(0.97, 0.98, 0.99, phi); }

inline ValidatedDevice diramp_rho(double rho_ab, double rho_bc, double rho_ac, double phi) {
    auto dev = make({{ModePair("a", "b"), ProcessKind::Conversion, rho_ab, 0.0},
                     {ModePair("b", "c"), ProcessKind::Gain, rho_bc, 0.0},
                     {ModePair("a", "c"), ProcessKind::Gain, rho_ac, 0.0}});
    return with_total_phase(dev, phi);
}

inline ValidatedDevice reference_diramp(double phi = -kPi / 2) {
    return diramp_rho(rho_for_conversion(0.998), rho_for_gain(std::pow(10.0, 1.2)), rho_for_gain(std::pow(10.0, 1.3)),
                      phi);
}

inline ValidatedDevice two_mode(ProcessKind kind, double rho, const char* x = "a", const char* y = "c") {
    return make({{ModePair(x, y), kind, rho, 0.0}});
}

/// Random stable device: circulator, directional amplifier or a partial
/// configuration, with random rates and phases.
inline ValidatedDevice random_device(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (true) {
        DeviceConfig cfg;
        cfg.modes = {ModeSpec{"a", 4e9 + 6e9 * u(rng), 5e6 + 80e6 * u(rng)},
                     ModeSpec{"b", 4e9 + 6e9 * u(rng), 5e6 + 80e6 * u(rng)},
                     ModeSpec{"c", 4e9 + 6e9 * u(rng), 5e6 + 80e6 * u(rng)}};
        const int shape = static_cast<int>(u(rng) * 4.0);
        auto conv = [&](const char* x, const char* y) {
            return PumpedCoupling{ModePair(x, y), ProcessKind::Conversion, 2.0 * u(rng), 2.0 * kPi * u(rng)};
        };
        auto gain = [&](const char* x, const char* y) {
            return PumpedCoupling{ModePair(x, y), ProcessKind::Gain, 0.6 * u(rng), 2.0 * kPi * u(rng)};
        };
        if (shape == 0) {
            cfg.couplings = {conv("a", "b"), conv("b", "c"), conv("a", "c")};
        } else if (shape == 1) {
            cfg.couplings = {conv("a", "b"), gain("b", "c"), gain("a", "c")};
        } else if (shape == 2) {
            cfg.couplings = {gain("a", "b"), conv("b", "c"), gain("a", "c")};
        } else {
            cfg.couplings = {conv("a", "b"), gain("b", "c")};
        }
        try {
            auto dev = validate_device(cfg);
            if (is_stable(dev)) return dev;
        } catch (const std::exception&) {
        }
    }
}

inline double max_abs_diff(const Matrix3c& x, const Matrix3c& y) { return (x - y).cwiseAbs().maxCoeff(); }

}  // namespace fixtures

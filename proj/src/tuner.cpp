#include "nonrecip/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nonrecip/error.hpp"
#include "nonrecip/nelder_mead.hpp"
#include "nonrecip/parallel.hpp"

namespace nonrecip {

namespace {

std::vector<ValidatedDevice> devices_over_phase(const ValidatedDevice& device, std::span<const double> phi_grid) {
    if (phi_grid.empty()) throw Error(ErrorKind::DomainError, "phase grid must be non-empty");
    std::vector<ValidatedDevice> out;
    out.reserve(phi_grid.size());
    for (double phi : phi_grid) out.push_back(with_total_phase(device, phi));
    return out;
}

PhaseMap empty_map(std::span<const double> phi_grid, std::span<const double> delta_grid,
                   std::span<const Channel> channels) {
    if (delta_grid.empty()) throw Error(ErrorKind::DomainError, "detuning grid must be non-empty");
    for (auto [o, i] : channels)
        if (o > 2 || i > 2) throw Error(ErrorKind::DomainError, "channel index out of range");
    PhaseMap map{{phi_grid.begin(), phi_grid.end()}, {delta_grid.begin(), delta_grid.end()},
                 {channels.begin(), channels.end()}, {}};
    map.magnitude.assign(channels.size() * phi_grid.size() * delta_grid.size(), 0.0);
    return map;
}

void store(PhaseMap& map, std::size_t p, std::size_t d, const ScatteringMatrix& s) {
    const std::size_t np = map.phis.size(), nd = map.deltas.size();
    for (std::size_t c = 0; c < map.channels.size(); ++c) {
        map.magnitude[(c * np + p) * nd + d] = std::abs(s(map.channels[c].first, map.channels[c].second));
    }
}

double db_eps(double power) { return 10.0 * std::log10(power + 1e-12); }

// Golden-section minimisation on [lo, hi].
template <class F>
double golden_section(F&& f, double lo, double hi, double tol = 1e-11) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

PhaseMap phase_sweep_serial(const ValidatedDevice& device, std::span<const double> phi_grid,
                            std::span<const double> delta_grid, std::span<const Channel> channels) {
    auto devices = devices_over_phase(device, phi_grid);
    PhaseMap map = empty_map(phi_grid, delta_grid, channels);
    for (std::size_t p = 0; p < phi_grid.size(); ++p)
        for (std::size_t d = 0; d < delta_grid.size(); ++d) store(map, p, d, scattering_at(devices[p], delta_grid[d]));
    return map;
}

PhaseMap phase_sweep(const ValidatedDevice& device, std::span<const double> phi_grid,
                     std::span<const double> delta_grid, std::span<const Channel> channels) {
    auto devices = devices_over_phase(device, phi_grid);
    PhaseMap map = empty_map(phi_grid, delta_grid, channels);
    const std::size_t nd = delta_grid.size();
    const auto total = static_cast<std::ptrdiff_t>(phi_grid.size() * nd);
    std::vector<char> failed(static_cast<std::size_t>(total), 0);

#pragma omp parallel for schedule(static) num_threads(sweep_threads())
    for (std::ptrdiff_t k = 0; k < total; ++k) {
        const auto p = static_cast<std::size_t>(k) / nd;
        const auto d = static_cast<std::size_t>(k) % nd;
        try {
            store(map, p, d, scattering_at(devices[p], delta_grid[d]));
        } catch (const SingularMatrixError&) {
            failed[static_cast<std::size_t>(k)] = 1;
        }
    }
    auto bad = std::find(failed.begin(), failed.end(), 1);
    if (bad != failed.end()) throw SingularMatrixError(delta_grid[static_cast<std::size_t>(bad - failed.begin()) % nd]);
    return map;
}

ConversionSweep conversion_sweep(const ValidatedDevice& device_template, std::span<const double> c_grid) {
    if (device_template.topology() != Topology::DirectionalAmp) {
        throw Error(ErrorKind::TopologyError, "conversion_sweep needs two gain processes and one conversion");
    }
    ConversionSweep out;
    out.roles = role_map(device_template, total_pump_phase(device_template).value);
    const int gain_k = device_template.coupling_index(
        ModePair(device_template.modes()[out.roles.signal].name, device_template.modes()[out.roles.idler].name));
    out.pair_gain = gain_coefficient(device_template.couplings()[static_cast<std::size_t>(gain_k)].rho);
    out.threshold = directionality_threshold(out.pair_gain);

    std::size_t conv_k = 0;
    for (std::size_t k = 0; k < 3; ++k)
        if (device_template.couplings()[k].kind == ProcessKind::Conversion) conv_k = k;

    for (double c : c_grid) {
        DeviceConfig cfg = device_template.config();
        cfg.couplings[conv_k].rho = rho_for_conversion(c);
        auto dev = validate_device(cfg);
        auto s = scattering_at(dev, 0.0);
        out.points.push_back({c, cfg.couplings[conv_k].rho, std::abs(s(out.roles.signal, out.roles.signal)),
                              std::abs(s(out.roles.idler, out.roles.signal)), is_stable(dev)});
    }
    return out;
}

double PhaseCalibration::offset() const { return wrap_phase(std::numbers::pi / 2.0 - knob_plus); }

PhaseCalibration calibrate_phase_offset(const PhaseOffsetDevice& pod, std::size_t coarse_points) {
    const auto& dev = pod.device;
    const auto topo = dev.topology();
    if (topo != Topology::Circulator && topo != Topology::DirectionalAmp) {
        throw Error(ErrorKind::AmbiguousMinimum, "response does not depend on the total pump phase");
    }
    if (coarse_points < 8) throw Error(ErrorKind::DomainError, "calibration needs at least 8 coarse points");

    std::size_t probe = 1;
    PortRole plus_roles;
    if (topo == Topology::DirectionalAmp) {
        plus_roles = role_map(dev, std::numbers::pi / 2.0);
        probe = plus_roles.idler;
    }
    // Circulators minimise the reflection; amplifiers sit at the extrema of
    // the idler reflection, which are maxima in this linear model.
    const double sign = topo == Topology::Circulator ? 1.0 : -1.0;
    auto cost = [&](double knob) { return sign * std::abs(scattering_at(pod.at_knob(knob), 0.0)(probe, probe)); };

    const double step = kTwoPi / static_cast<double>(coarse_points);
    std::vector<double> scan(coarse_points);
    for (std::size_t k = 0; k < coarse_points; ++k) scan[k] = cost(step * static_cast<double>(k));
    const auto [lo_it, hi_it] = std::minmax_element(scan.begin(), scan.end());
    if (*hi_it - *lo_it < 1e-9 * (1.0 + std::abs(*hi_it))) {
        throw Error(ErrorKind::AmbiguousMinimum, "objective is flat in the total pump phase");
    }

    std::vector<std::size_t> minima;
    for (std::size_t k = 0; k < coarse_points; ++k) {
        double prev = scan[(k + coarse_points - 1) % coarse_points];
        double next = scan[(k + 1) % coarse_points];
        if (scan[k] <= prev && scan[k] < next) minima.push_back(k);
    }
    std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return scan[a] < scan[b]; });
    if (minima.size() < 2) throw Error(ErrorKind::AmbiguousMinimum, "fewer than two phase minima found");

    std::array<double, 2> knobs{};
    for (std::size_t m = 0; m < 2; ++m) {
        double centre = step * static_cast<double>(minima[m]);
        knobs[m] = wrap_phase(golden_section(cost, centre - step, centre + step));
    }

    // + branch: clockwise for circulators; for amplifiers, the +π/2 signal port
    // amplifies into the vacuum port rather than receiving from it.
    auto is_plus = [&](double knob) {
        auto s = scattering_at(pod.at_knob(knob), 0.0);
        if (topo == Topology::Circulator) return s.power(1, 0) > s.power(0, 1);
        return s.power(plus_roles.vacuum, plus_roles.signal) > s.power(plus_roles.signal, plus_roles.vacuum);
    };
    bool p0 = is_plus(knobs[0]), p1 = is_plus(knobs[1]);
    if (p0 == p1) throw Error(ErrorKind::AmbiguousMinimum, "both phase minima show the same direction");
    return p0 ? PhaseCalibration{knobs[0], knobs[1]} : PhaseCalibration{knobs[1], knobs[0]};
}

ValidatedDevice apply_params(const ValidatedDevice& device_template, const TuneParams& params) {
    DeviceConfig cfg = device_template.config();
    if (params.rhos.size() != cfg.couplings.size()) {
        throw Error(ErrorKind::DomainError, "parameter count does not match coupling count");
    }
    for (std::size_t k = 0; k < cfg.couplings.size(); ++k) cfg.couplings[k].rho = params.rhos[k];
    auto dev = validate_device(cfg);
    const auto topo = dev.topology();
    if (topo == Topology::Circulator || topo == Topology::DirectionalAmp) return with_total_phase(dev, params.phi_tot);
    return dev;
}

TuneParams params_of(const ValidatedDevice& device) {
    TuneParams p;
    for (const auto& c : device.couplings()) p.rhos.push_back(c.rho);
    const auto topo = device.topology();
    if (topo == Topology::Circulator || topo == Topology::DirectionalAmp) p.phi_tot = total_pump_phase(device).value;
    return p;
}

double objective_value(const ValidatedDevice& device_template, const Objective& objective, const TuneParams& params,
                       const PortRole& roles) {
    try {
        auto dev = apply_params(device_template, params);
        if (!is_stable(dev)) return kObjectivePenalty;
        auto s = scattering_at(dev, 0.0);
        if (objective.kind == ObjectiveKind::DirectionalAmp) {
            double gain = db_eps(s.power(roles.idler, roles.signal));
            double match = std::max(db_eps(s.power(roles.signal, roles.signal)),
                                    db_eps(s.power(roles.vacuum, roles.vacuum)));
            return std::abs(gain - objective.target_gain_db) + objective.match_weight * match;
        }
        double match = -std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < 3; ++m) match = std::max(match, db_eps(s.power(m, m)));
        // reverse leakage is against the requested sense
        const bool cw = objective.kind == ObjectiveKind::CirculatorCW;
        double leak = cw ? std::max({db_eps(s.power(0, 1)), db_eps(s.power(1, 2)), db_eps(s.power(2, 0))})
                         : std::max({db_eps(s.power(1, 0)), db_eps(s.power(2, 1)), db_eps(s.power(0, 2))});
        return match + objective.isolation_weight * leak;
    } catch (const Error&) {
        return kObjectivePenalty;
    }
}

TuneResult tune(const ValidatedDevice& device_template, const Objective& objective, const TuneParams& initial,
                int budget) {
    if (budget < 1) throw Error(ErrorKind::DomainError, "tune budget must be >= 1");
    if (!(objective.match_weight > 0.0) || !(objective.isolation_weight > 0.0)) {
        throw Error(ErrorKind::DomainError, "objective weights must be positive");
    }
    if (objective.kind == ObjectiveKind::DirectionalAmp && !(objective.target_gain_db >= 0.0)) {
        throw Error(ErrorKind::DomainError, "target gain must be >= 0 dB");
    }
    const auto topo = device_template.topology();
    if (topo != Topology::Circulator && topo != Topology::DirectionalAmp) {
        throw Error(ErrorKind::TopologyError, "tune needs a closed loop of three couplings");
    }
    if ((objective.kind == ObjectiveKind::DirectionalAmp) != (topo == Topology::DirectionalAmp)) {
        throw Error(ErrorKind::TopologyError, "objective does not match the device topology");
    }

    PortRole roles;
    if (topo == Topology::DirectionalAmp) roles = role_map(device_template, initial.phi_tot);

    auto to_params = [&](const std::vector<double>& x) {
        TuneParams p;
        p.rhos.assign(x.begin(), x.end() - 1);
        p.phi_tot = x.back();
        return p;
    };
    std::vector<double> x0 = initial.rhos;
    x0.push_back(initial.phi_tot);

    NelderMeadOptions opts;
    opts.max_evaluations = budget;
    opts.initial_step.assign(initial.rhos.size(), 0.05);
    opts.initial_step.push_back(0.1);
    auto f = [&](const std::vector<double>& x) {
        return objective_value(device_template, objective, to_params(x), roles);
    };

    // Restart the simplex from the best point until a restart stops helping;
    // a fresh simplex escapes the narrow valleys carved by the log-scale terms.
    TuneResult res;
    std::vector<double> x = x0;
    while (budget - res.evaluations >= static_cast<int>(x.size()) + 3) {
        opts.max_evaluations = budget - res.evaluations;
        auto nm = nelder_mead(f, x, opts);  // the restart simplex contains x, so nm.value never rises
        const bool improved = res.trace.empty() || nm.value < res.value - 1e-9;
        res.evaluations += nm.evaluations;
        res.iterations += nm.iterations;
        res.trace.insert(res.trace.end(), nm.trace.begin(), nm.trace.end());
        x = nm.x;
        res.value = nm.value;
        res.converged = nm.converged;
        if (!nm.converged || !improved) break;
    }
    res.params = to_params(x);
    try {
        res.device = apply_params(device_template, res.params);
    } catch (const Error&) {
        // best point is itself invalid: only possible when every vertex was penalised
        res.params = initial;
        res.device = apply_params(device_template, initial);
        res.converged = false;
    }
    return res;
}

}  // namespace nonrecip

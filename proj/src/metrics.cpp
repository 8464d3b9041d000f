#include "nonrecip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "nonrecip/error.hpp"

namespace nonrecip {

double to_db(double power_ratio) {
    if (!(power_ratio > 0.0)) throw Error(ErrorKind::DomainError, "to_db needs a positive power ratio");
    return 10.0 * std::log10(power_ratio);
}

double amp_db(double amplitude) {
    if (!(amplitude > 0.0)) throw Error(ErrorKind::DomainError, "amp_db needs a positive amplitude");
    return 20.0 * std::log10(amplitude);
}

std::string_view to_string(Circulation c) {
    switch (c) {
        case Circulation::CW: return "CW";
        case Circulation::CCW: return "CCW";
        case Circulation::None: return "None";
    }
    return "None";
}

namespace {

constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kCwPaths{{{1, 0}, {2, 1}, {0, 2}}};   // (out,in)
constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kCcwPaths{{{0, 1}, {1, 2}, {2, 0}}};

double db_or_floor(double power) { return 10.0 * std::log10(std::max(power, 1e-300)); }

// Walks outward from the center while margin(k) <= 0; edges are linearly
// interpolated where margin changes sign.
double contiguous_width(const std::vector<double>& deltas, const std::function<double(std::size_t)>& margin,
                        std::size_t center) {
    const std::size_t n = deltas.size();
    std::vector<double> mg(n);
    for (std::size_t k = 0; k < n; ++k) mg[k] = margin(k);
    if (!(mg[center] <= 0.0)) throw Error(ErrorKind::EmptyBand, "criteria fail at the band center");

    auto edge = [&](std::size_t inside, std::size_t outside) {
        double a = mg[inside], b = mg[outside];
        double t = (b - a) != 0.0 ? a / (a - b) : 0.0;
        return deltas[inside] + t * (deltas[outside] - deltas[inside]);
    };
    std::size_t lo = center;
    while (lo > 0 && mg[lo - 1] <= 0.0) --lo;
    std::size_t hi = center;
    while (hi + 1 < n && mg[hi + 1] <= 0.0) ++hi;
    double left = lo > 0 ? edge(lo, lo - 1) : deltas.front();
    double right = hi + 1 < n ? edge(hi, hi + 1) : deltas.back();
    return right - left;
}

}  // namespace

Circulation circulation_sense(const ScatteringMatrix& s, double isolation_margin_db) {
    const double margin = std::pow(10.0, isolation_margin_db / 10.0);
    auto min_of = [&](const auto& paths) {
        double v = std::numeric_limits<double>::infinity();
        for (auto [o, i] : paths) v = std::min(v, s.power(o, i));
        return v;
    };
    auto max_of = [&](const auto& paths) {
        double v = 0.0;
        for (auto [o, i] : paths) v = std::max(v, s.power(o, i));
        return v;
    };
    if (min_of(kCwPaths) >= margin * max_of(kCcwPaths) && min_of(kCwPaths) > 0.0) return Circulation::CW;
    if (min_of(kCcwPaths) >= margin * max_of(kCwPaths) && min_of(kCcwPaths) > 0.0) return Circulation::CCW;
    return Circulation::None;
}

double circulator_bandwidth(const SweepResult& sweep, double match_db, double loss_db) {
    if (sweep.device.topology() != Topology::Circulator) {
        throw Error(ErrorKind::TopologyError, "circulator_bandwidth needs an all-conversion device");
    }
    const std::size_t center = sweep.center_index();
    const auto sense = circulation_sense(sweep.matrices[center]);
    if (sense == Circulation::None) throw Error(ErrorKind::EmptyBand, "no circulation at the band center");
    const auto& forward = sense == Circulation::CW ? kCwPaths : kCcwPaths;

    auto margin = [&](std::size_t k) {
        const auto& s = sweep.matrices[k];
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < 3; ++m) worst = std::max(worst, db_or_floor(s.power(m, m)) - match_db);
        for (auto [o, i] : forward) worst = std::max(worst, -db_or_floor(s.power(o, i)) - loss_db);
        return worst;
    };
    return contiguous_width(sweep.deltas, margin, center);
}

double gain_bandwidth_3db(const SweepResult& sweep, std::size_t from_mode, std::size_t to_mode) {
    const std::size_t center = sweep.center_index();
    const double peak = sweep.matrices[center].power(to_mode, from_mode);
    if (!(peak > 1.0 + 1e-12)) throw Error(ErrorKind::EmptyBand, "no gain at the band center");
    const double half_db = db_or_floor(peak) - 10.0 * std::log10(2.0);
    auto margin = [&](std::size_t k) { return half_db - db_or_floor(sweep.matrices[k].power(to_mode, from_mode)); };
    return contiguous_width(sweep.deltas, margin, center);
}

std::array<double, 3> nvr(const ScatteringMatrix& s) {
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < 3; ++j) total += s.power(i, j);
        out[i] = 10.0 * std::log10(total);
    }
    return out;
}

double added_noise(const ScatteringMatrix& s, std::size_t signal_port, std::size_t output_port) {
    const double gain = s.power(output_port, signal_port);
    if (!(gain > 0.0)) throw Error(ErrorKind::DomainError, "added_noise needs nonzero forward gain");
    double noise = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
        if (j != signal_port) noise += 0.5 * s.power(output_port, j);
    return noise / gain;
}

double symplectic_defect(const ScatteringMatrix& s) {
    Eigen::Vector3d sig;
    for (std::size_t k = 0; k < 3; ++k) sig[k] = s.frame[k].conjugated ? -1.0 : 1.0;
    const Matrix3c sigma = sig.cast<Complex>().asDiagonal();
    return (s.entries * sigma * s.entries.adjoint() - sigma).cwiseAbs().maxCoeff();
}

PortRole role_map(const ValidatedDevice& device, double phi_tot) {
    if (device.topology() != Topology::DirectionalAmp) {
        throw Error(ErrorKind::TopologyError, "role_map needs two gain processes and one conversion");
    }
    const double s = std::sin(phi_tot);
    if (s == 0.0) throw Error(ErrorKind::DomainError, "no amplification direction at sin(phi_tot) = 0");
    PortRole roles;
    for (const auto& c : device.couplings()) {
        if (c.kind != ProcessKind::Conversion) continue;
        std::size_t i = device.index_of(c.pair.first());
        std::size_t j = device.index_of(c.pair.second());
        if (i == 1 && j == 2) std::swap(i, j);  // conversion (m1,m2) is oriented m2 -> m1
        roles.idler = 3 - i - j;
        roles.signal = s < 0.0 ? i : j;
        roles.vacuum = s < 0.0 ? j : i;
    }
    return roles;
}

CirculatorFigures circulator_figures(const ScatteringMatrix& s) {
    CirculatorFigures f;
    f.sense = circulation_sense(s);
    const auto& forward = f.sense == Circulation::CCW ? kCcwPaths : kCwPaths;
    const auto& reverse = f.sense == Circulation::CCW ? kCwPaths : kCcwPaths;
    f.worst_match_db = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < 3; ++m) f.worst_match_db = std::max(f.worst_match_db, db_or_floor(s.power(m, m)));
    f.worst_insertion_loss_db = -std::numeric_limits<double>::infinity();
    for (auto [o, i] : forward) f.worst_insertion_loss_db = std::max(f.worst_insertion_loss_db, -db_or_floor(s.power(o, i)));
    f.worst_isolation_db = std::numeric_limits<double>::infinity();
    for (auto [o, i] : reverse) f.worst_isolation_db = std::min(f.worst_isolation_db, -db_or_floor(s.power(o, i)));
    return f;
}

AmplifierFigures amplifier_figures(const ScatteringMatrix& s, const PortRole& r) {
    AmplifierFigures f;
    f.roles = r;
    f.forward_gain_db = db_or_floor(s.power(r.idler, r.signal));
    f.signal_to_vacuum_db = db_or_floor(s.power(r.vacuum, r.signal));
    f.vacuum_to_signal_db = db_or_floor(s.power(r.signal, r.vacuum));
    f.reverse_isolation_db = -db_or_floor(s.power(r.signal, r.idler));
    f.signal_match_db = db_or_floor(s.power(r.signal, r.signal));
    f.vacuum_match_db = db_or_floor(s.power(r.vacuum, r.vacuum));
    f.nvr_db = nvr(s);
    f.added_noise_photons = added_noise(s, r.signal, r.idler);
    return f;
}

}  // namespace nonrecip

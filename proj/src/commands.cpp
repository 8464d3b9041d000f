#include "nonrecip/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "nonrecip/cmt.hpp"
#include "nonrecip/error.hpp"
#include "nonrecip/io.hpp"
#include "nonrecip/metrics.hpp"
#include "nonrecip/tuner.hpp"

namespace nonrecip {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::string num(double v, int digits = 6) {
    if (v == 0.0) v = 0.0;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

struct Common {
    std::string config;
    std::string out;
    std::string format;
};

struct Loaded {
    io::RunConfig run;
    ValidatedDevice device;
    std::string format;
    std::string path;
};

Loaded load(const Common& c, std::ostream& err) {
    if (c.config.empty()) throw Error(ErrorKind::ConfigError, "--config is required");
    Loaded l;
    l.run = io::load_run_config(c.config);
    l.device = validate_device(io::to_device_config(l.run));
    for (const auto& w : check_pump_closure(l.device, io::declared_pumps_hz(l.run))) err << "warning: " << w << "\n";
    l.path = c.out.empty() ? l.run.outputs.path : c.out;
    l.format = c.format;
    if (l.format.empty()) {
        const auto ext = std::filesystem::path(l.path).extension();
        l.format = ext == ".json" ? "json" : ext == ".csv" ? "csv" : l.run.outputs.format;
    }
    if (l.format != "csv" && l.format != "json") throw Error(ErrorKind::ConfigError, "--format must be csv or json");
    return l;
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) throw Error(ErrorKind::ConfigError, "no output path: pass --out or set outputs.path");
    if (path == "-") {
        out << content;
    } else {
        io::write_atomic(path, content);
    }
}

bool has_loop(const ValidatedDevice& d) {
    return d.topology() == Topology::Circulator || d.topology() == Topology::DirectionalAmp;
}

std::string topology_name(Topology t) {
    switch (t) {
        case Topology::Uncoupled: return "uncoupled";
        case Topology::Partial: return "partial";
        case Topology::Circulator: return "circulator";
        case Topology::DirectionalAmp: return "directional-amplifier";
    }
    return "?";
}

void print_matrix(const ValidatedDevice& d, const ScatteringMatrix& s, const std::string& at, std::ostream& out) {
    out << at << " |S|^2 dB, row = out, column = in\n";
    out << "     ";
    for (const auto& m : d.modes()) out << "  " << std::setw(10) << m.name;
    out << "\n";
    for (std::size_t o = 0; o < 3; ++o) {
        out << "  " << std::setw(3) << d.modes()[o].name;
        for (std::size_t i = 0; i < 3; ++i) out << "  " << std::setw(10) << num(to_db(s.power(o, i)), 5);
        out << "\n";
    }
}

void print_summary(const SweepResult& sw, std::ostream& out) {
    const auto& d = sw.device;
    const auto ci = sw.center_index();
    const auto& s0 = sw.matrices[ci];
    std::string at = "[delta_hz=" + num(sw.deltas[ci], 9);
    std::optional<double> phi;
    if (has_loop(d)) {
        phi = total_pump_phase(d).value;
        at += " phi_tot_deg=" + num(*phi * kDeg, 9);
    }
    at += "]";

    out << "topology " << topology_name(d.topology()) << "\n";
    print_matrix(d, s0, at, out);

    if (d.topology() == Topology::Circulator) {
        auto f = circulator_figures(s0);
        out << at << " sense=" << to_string(f.sense) << " worst_match_db=" << num(f.worst_match_db)
            << " worst_insertion_loss_db=" << num(f.worst_insertion_loss_db)
            << " worst_isolation_db=" << num(f.worst_isolation_db) << "\n";
        try {
            out << "[delta_hz=" << num(sw.deltas.front(), 9) << ".." << num(sw.deltas.back(), 9)
                << "] bandwidth_hz=" << num(circulator_bandwidth(sw)) << " (match -10 dB, loss 1 dB)\n";
        } catch (const Error& e) {
            out << "bandwidth unavailable: " << e.what() << "\n";
        }
    } else if (d.topology() == Topology::DirectionalAmp) {
        try {
            auto r = role_map(d, *phi);
            auto f = amplifier_figures(s0, r);
            const auto& m = d.modes();
            out << at << " signal=" << m[r.signal].name << " idler=" << m[r.idler].name
                << " vacuum=" << m[r.vacuum].name << "\n";
            out << at << " forward_gain_db=" << num(f.forward_gain_db)
                << " reverse_isolation_db=" << num(f.reverse_isolation_db)
                << " signal_match_db=" << num(f.signal_match_db) << " vacuum_match_db=" << num(f.vacuum_match_db)
                << " vacuum_to_signal_db=" << num(f.vacuum_to_signal_db)
                << " added_noise_photons=" << num(f.added_noise_photons) << "\n";
            try {
                out << "[delta_hz=" << num(sw.deltas.front(), 9) << ".." << num(sw.deltas.back(), 9)
                    << "] gain_bandwidth_3db_hz=" << num(gain_bandwidth_3db(sw, r.signal, r.idler)) << "\n";
            } catch (const Error& e) {
                out << "gain bandwidth unavailable: " << e.what() << "\n";
            }
        } catch (const Error& e) {
            out << "amplifier roles undefined: " << e.what() << "\n";
        }
    }

    auto n = nvr(s0);
    out << at << " nvr_db";
    for (std::size_t m = 0; m < 3; ++m) out << " " << d.modes()[m].name << "=" << num(n[m]);
    out << "\n";

    double worst = -1.0, worst_delta = 0.0;
    for (std::size_t k = 0; k < sw.size(); ++k) {
        double def = symplectic_defect(sw.matrices[k]);
        if (def > worst) {
            worst = def;
            worst_delta = sw.deltas[k];
        }
    }
    out << "[delta_hz=" << num(worst_delta, 9) << "] max_symplectic_defect=" << num(worst, 3) << "\n";
}

int cmd_sparams(const Common& c, std::ostream& out, std::ostream& err) {
    auto l = load(c, err);
    auto grid = io::delta_grid_hz(l.run.sweep);
    auto sw = sweep(l.device, grid);
    write_output(l.path, io::emit(io::sweep_table(sw), l.format), out);
    print_summary(sw, l.path == "-" ? err : out);
    return kExitOk;
}

std::vector<Channel> parse_channels(const ValidatedDevice& d, const std::string& spec) {
    std::vector<Channel> out;
    if (spec.empty()) {
        for (std::size_t o = 0; o < 3; ++o)
            for (std::size_t i = 0; i < 3; ++i) out.emplace_back(o, i);
        return out;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.rfind("S_", 0) == 0) item = item.substr(2);
        std::string o_name, i_name;
        if (auto colon = item.find(':'); colon != std::string::npos) {
            o_name = item.substr(0, colon);
            i_name = item.substr(colon + 1);
        } else if (item.size() == 2) {
            o_name = item.substr(0, 1);
            i_name = item.substr(1, 1);
        } else {
            throw Error(ErrorKind::ConfigError, "channel '" + item + "' must be 'xy' or 'out:in'");
        }
        out.emplace_back(d.index_of(o_name), d.index_of(i_name));
    }
    return out;
}

struct PhaseOpts {
    double phi_min_deg = -180.0;
    double phi_max_deg = 180.0;
    std::size_t phi_points = 361;
    std::string channels;
};

int cmd_phase_sweep(const Common& c, const PhaseOpts& p, std::ostream& out, std::ostream& err) {
    auto l = load(c, err);
    if (!has_loop(l.device)) throw Error(ErrorKind::TopologyError, "phase sweep needs a closed loop of three couplings");
    if (p.phi_points < 1) throw Error(ErrorKind::ConfigError, "--phi-points must be >= 1");
    if (p.phi_points > 1 && !(p.phi_max_deg > p.phi_min_deg)) {
        throw Error(ErrorKind::ConfigError, "--phi-max-deg must exceed --phi-min-deg");
    }
    auto phis = p.phi_points == 1 ? std::vector<double>{p.phi_min_deg / kDeg}
                                  : linear_grid(p.phi_min_deg / kDeg, p.phi_max_deg / kDeg, p.phi_points);
    auto deltas = io::delta_grid_hz(l.run.sweep);
    auto channels = parse_channels(l.device, p.channels);
    auto map = phase_sweep(l.device, phis, deltas, channels);
    write_output(l.path, io::emit(io::phase_table(map, l.device), l.format), out);
    (l.path == "-" ? err : out) << "phase map: " << phis.size() << " phases x " << deltas.size() << " detunings x "
                                << channels.size() << " channels\n";
    return kExitOk;
}

struct ThresholdOpts {
    double c_min = 0.5;
    double c_max = 0.999;
    std::size_t c_points = 200;
};

int cmd_threshold(const Common& c, const ThresholdOpts& t, std::ostream& out, std::ostream& err) {
    auto l = load(c, err);
    if (t.c_points < 1) throw Error(ErrorKind::ConfigError, "--c-points must be >= 1");
    auto grid = t.c_points == 1 ? std::vector<double>{t.c_min} : linear_grid(t.c_min, t.c_max, t.c_points);
    auto cs = conversion_sweep(l.device, grid);
    write_output(l.path, io::emit(io::threshold_table(cs, l.device), l.format), out);
    const auto& m = l.device.modes();
    (l.path == "-" ? err : out) << "[delta_hz=0] signal=" << m[cs.roles.signal].name << " idler="
                                << m[cs.roles.idler].name << " pair_gain_db=" << num(to_db(cs.pair_gain))
                                << " threshold_conversion=" << num(cs.threshold, 9) << "\n";
    return kExitOk;
}

struct TuneOpts {
    std::string objective;
    double target_gain_db = 14.0;
    int budget = 2000;
    double match_weight = 1.0;
    double isolation_weight = 1.0;
};

int cmd_tune(const Common& c, const TuneOpts& t, std::ostream& out, std::ostream& err) {
    auto l = load(c, err);
    if (c.out.empty()) throw Error(ErrorKind::ConfigError, "tune needs --out for the tuned config");
    Objective obj;
    std::string kind = t.objective;
    if (kind.empty()) kind = l.device.topology() == Topology::DirectionalAmp ? "diramp" : "cw";
    if (kind == "cw") {
        obj.kind = ObjectiveKind::CirculatorCW;
    } else if (kind == "ccw") {
        obj.kind = ObjectiveKind::CirculatorCCW;
    } else if (kind == "diramp") {
        obj.kind = ObjectiveKind::DirectionalAmp;
    } else {
        throw Error(ErrorKind::ConfigError, "--objective must be cw, ccw or diramp");
    }
    obj.target_gain_db = t.target_gain_db;
    obj.match_weight = t.match_weight;
    obj.isolation_weight = t.isolation_weight;

    auto initial = params_of(l.device);
    auto res = tune(l.device, obj, initial, t.budget);
    auto doc = io::tuned_document(l.run, res.device);
    write_output(c.out, doc.dump(2) + "\n", out);

    auto& rep = c.out == "-" ? err : out;
    rep << "objective " << kind << ": " << num(res.trace.empty() ? 0.0 : res.trace.front()) << " -> "
        << num(res.value) << " after " << res.evaluations << " evaluations, " << res.iterations << " iterations"
        << (res.converged ? " (converged)" : " (budget exhausted)") << "\n";
    const std::size_t n = res.trace.size();
    for (std::size_t k : {n / 4, n / 2, 3 * n / 4}) {
        if (k > 0 && k < n) rep << "  trace[" << k << "] = " << num(res.trace[k]) << "\n";
    }
    const auto& cps = res.device.couplings();
    for (std::size_t k = 0; k < cps.size(); ++k) {
        rep << "  rho(" << cps[k].pair.first() << "," << cps[k].pair.second() << ") = " << num(res.params.rhos[k], 9)
            << "\n";
    }
    rep << "  phi_tot_deg = " << num(res.params.phi_tot * kDeg, 9) << "\n";
    auto s0 = scattering_at(res.device, 0.0);
    print_matrix(res.device, s0, "[delta_hz=0 phi_tot_deg=" + num(res.params.phi_tot * kDeg, 9) + "]", rep);
    return kExitOk;
}

struct CompareOpts {
    std::string sweep_file;
    std::string reference_file;
    double tol_db = 0.1;
    std::string columns;
};

bool strictly_increasing(const io::Table& t) {
    for (std::size_t r = 1; r < t.rows.size(); ++r)
        if (!(t.rows[r][0] > t.rows[r - 1][0])) return false;
    return !t.rows.empty();
}

int cmd_compare(const CompareOpts& o, std::ostream& out, std::ostream& err) {
    io::Table a, b;
    try {
        a = io::load_table(o.sweep_file);
        b = io::load_table(o.reference_file);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitSingular;
    }
    if (a.header != b.header) {
        for (std::size_t k = 0; k < std::max(a.header.size(), b.header.size()); ++k) {
            if (k >= a.header.size() || k >= b.header.size() || a.header[k] != b.header[k]) {
                err << "error: SchemaError: headers differ at column " << k + 1 << "\n";
                break;
            }
        }
        return kExitSingular;
    }
    if (!strictly_increasing(a) || !strictly_increasing(b)) {
        err << "error: SchemaError: grid column '" << a.header[0] << "' must be strictly increasing\n";
        return kExitSingular;
    }

    std::vector<std::size_t> cols;
    if (o.columns.empty()) {
        for (std::size_t k = 1; k < a.header.size(); ++k)
            if (a.header[k].ends_with("_db")) cols.push_back(k);
        if (cols.empty())
            for (std::size_t k = 1; k < a.header.size(); ++k) cols.push_back(k);
    } else {
        std::stringstream ss(o.columns);
        std::string name;
        while (std::getline(ss, name, ',')) {
            auto it = std::find(a.header.begin(), a.header.end(), name);
            if (it == a.header.end() || it == a.header.begin()) {
                err << "error: SchemaError: no data column named '" << name << "'\n";
                return kExitSingular;
            }
            cols.push_back(static_cast<std::size_t>(it - a.header.begin()));
        }
    }

    const double lo = b.rows.front()[0], hi = b.rows.back()[0];
    double worst = -1.0;
    std::size_t worst_col = 0;
    double worst_x = 0.0;
    std::size_t shared = 0;
    std::size_t j = 0;
    for (const auto& row : a.rows) {
        const double x = row[0];
        if (x < lo || x > hi) continue;
        ++shared;
        while (j + 1 < b.rows.size() && b.rows[j + 1][0] < x) ++j;
        const auto& r0 = b.rows[j];
        const auto& r1 = b.rows[std::min(j + 1, b.rows.size() - 1)];
        const double span = r1[0] - r0[0];
        const double w = span > 0.0 ? std::clamp((x - r0[0]) / span, 0.0, 1.0) : 0.0;
        for (auto k : cols) {
            double ref = (1.0 - w) * r0[k] + w * r1[k];
            double diff = std::abs(row[k] - ref);
            if (std::isnan(diff)) diff = std::numeric_limits<double>::infinity();
            if (diff > worst) {
                worst = diff;
                worst_col = k;
                worst_x = x;
            }
        }
    }
    if (shared == 0) {
        err << "error: SchemaError: the two files share no " << a.header[0] << " range\n";
        return kExitSingular;
    }
    out << "worst " << a.header[worst_col] << " at " << a.header[0] << "=" << num(worst_x, 9) << ": |diff|="
        << num(worst) << " dB over " << shared << " shared rows (tol " << num(o.tol_db) << " dB)\n";
    return worst <= o.tol_db ? kExitOk : kExitInvalid;
}

int exit_code_for(const Error& e) {
    return e.kind() == ErrorKind::SingularMatrix ? kExitSingular : kExitInvalid;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scattering simulation of three-mode parametric circulators and directional amplifiers", "nonrecip"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "Run configuration (JSON)")->required();
        sub->add_option("--out", common.out, "Output path, '-' for standard output");
        sub->add_option("--format", common.format, "csv or json");
    };

    auto* sp = app.add_subcommand("sparams", "Scattering matrix versus detuning");
    add_common(sp);

    PhaseOpts phase;
    auto* ps = app.add_subcommand("phase-sweep", "|S| over total pump phase and detuning");
    add_common(ps);
    ps->add_option("--phi-min-deg", phase.phi_min_deg);
    ps->add_option("--phi-max-deg", phase.phi_max_deg);
    ps->add_option("--phi-points", phase.phi_points);
    ps->add_option("--channels", phase.channels, "Comma list such as bb,ab or out:in");

    ThresholdOpts thr;
    auto* th = app.add_subcommand("threshold", "Input match and gain versus conversion coefficient");
    add_common(th);
    th->add_option("--c-min", thr.c_min);
    th->add_option("--c-max", thr.c_max);
    th->add_option("--c-points", thr.c_points);

    TuneOpts tn;
    auto* tu = app.add_subcommand("tune", "Simplex search over pump strengths and total phase");
    add_common(tu);
    tu->add_option("--objective", tn.objective, "cw, ccw or diramp");
    tu->add_option("--target-gain-db", tn.target_gain_db);
    tu->add_option("--budget", tn.budget, "Maximum objective evaluations");
    tu->add_option("--match-weight", tn.match_weight);
    tu->add_option("--isolation-weight", tn.isolation_weight);

    CompareOpts cmp;
    auto* co = app.add_subcommand("compare", "Compare a result file against a reference");
    co->add_option("sweep", cmp.sweep_file)->required();
    co->add_option("reference", cmp.reference_file)->required();
    co->add_option("--tol-db", cmp.tol_db);
    co->add_option("--columns", cmp.columns, "Comma list of columns; default all *_db columns");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    try {
        if (sp->parsed()) return cmd_sparams(common, out, err);
        if (ps->parsed()) return cmd_phase_sweep(common, phase, out, err);
        if (th->parsed()) return cmd_threshold(common, thr, out, err);
        if (tu->parsed()) return cmd_tune(common, tn, out, err);
        if (co->parsed()) return cmd_compare(cmp, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, out, err);
}

}  // namespace nonrecip

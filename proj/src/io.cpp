#include "nonrecip/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nonrecip/error.hpp"

namespace nonrecip::io {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }
[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

double number_at(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) config_error(where + "." + key + " is required");
    const auto& v = obj.at(key);
    if (!v.is_number()) config_error(where + "." + key + " must be a number");
    return v.get<double>();
}

std::optional<double> optional_number(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    return number_at(obj, key, where);
}

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double parse_number(std::string_view token, std::size_t line) {
    std::string s(token);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        schema_error("line " + std::to_string(line) + ": '" + s + "' is not a number");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double db_floor(double power) { return 10.0 * std::log10(std::max(power, 1e-30)); }

void check_table(const Table& t) {
    if (t.header.empty() || t.header.front().empty()) schema_error("table header is empty");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r].size() != t.header.size()) {
            schema_error("row " + std::to_string(r + 1) + " has " + std::to_string(t.rows[r].size()) +
                         " values, header has " + std::to_string(t.header.size()));
        }
    }
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
    RunConfig cfg;
    try {
        cfg.document = ordered_json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        config_error(std::string("config is not valid JSON: ") + e.what());
    }
    const auto& doc = cfg.document;
    if (!doc.is_object()) config_error("config must be an object");
    if (!doc.contains("device") || !doc.at("device").is_object()) config_error("device section is required");
    const auto& device = doc.at("device");

    if (!device.contains("modes") || !device.at("modes").is_array() || device.at("modes").size() != 3) {
        config_error("device.modes must list exactly 3 modes");
    }
    for (const auto& m : device.at("modes")) {
        if (!m.is_object() || !m.contains("name") || !m.at("name").is_string()) {
            config_error("device.modes[] needs a string name");
        }
        ModeEntry e;
        e.name = m.at("name").get<std::string>();
        const std::string where = "device.modes[" + e.name + "]";
        e.freq_ghz = number_at(m, "freq_ghz", where);
        e.kappa_mhz = number_at(m, "kappa_mhz", where);
        cfg.modes.push_back(std::move(e));
    }

    if (device.contains("couplings")) {
        if (!device.at("couplings").is_array()) config_error("device.couplings must be an array");
        for (const auto& c : device.at("couplings")) {
            if (!c.is_object()) config_error("device.couplings[] must be objects");
            CouplingEntry e;
            if (!c.contains("pair") || !c.at("pair").is_array() || c.at("pair").size() != 2 ||
                !c.at("pair")[0].is_string() || !c.at("pair")[1].is_string()) {
                config_error("device.couplings[].pair must be two mode names");
            }
            e.first = c.at("pair")[0].get<std::string>();
            e.second = c.at("pair")[1].get<std::string>();
            const std::string where = "device.couplings[" + e.first + "," + e.second + "]";
            if (!c.contains("kind") || !c.at("kind").is_string()) config_error(where + ".kind is required");
            const auto kind = c.at("kind").get<std::string>();
            if (kind == "gain") {
                e.kind = ProcessKind::Gain;
            } else if (kind == "conversion") {
                e.kind = ProcessKind::Conversion;
            } else {
                config_error(where + ".kind must be 'gain' or 'conversion'");
            }
            e.rho = optional_number(c, "rho", where);
            e.target_g_db = optional_number(c, "target_g_db", where);
            e.target_c = optional_number(c, "target_c", where);
            int given = e.rho.has_value() + e.target_g_db.has_value() + e.target_c.has_value();
            if (given != 1) config_error(where + " needs exactly one of rho, target_g_db, target_c");
            if (e.target_g_db && e.kind != ProcessKind::Gain) config_error(where + ".target_g_db needs kind gain");
            if (e.target_c && e.kind != ProcessKind::Conversion) config_error(where + ".target_c needs kind conversion");
            e.phase_deg = optional_number(c, "phase_deg", where).value_or(0.0);
            cfg.couplings.push_back(std::move(e));
        }
    }
    cfg.pump_detuning_tolerance_mhz =
        optional_number(device, "pump_detuning_tolerance_mhz", "device").value_or(cfg.pump_detuning_tolerance_mhz);

    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        if (!s.is_object()) config_error("sweep must be an object");
        cfg.sweep.delta_span_mhz = optional_number(s, "delta_span_mhz", "sweep").value_or(cfg.sweep.delta_span_mhz);
        if (s.contains("points")) {
            if (!s.at("points").is_number_integer() || s.at("points").get<long long>() < 1) {
                config_error("sweep.points must be an integer >= 1");
            }
            cfg.sweep.points = s.at("points").get<std::size_t>();
        }
        if (!(cfg.sweep.delta_span_mhz >= 0.0)) config_error("sweep.delta_span_mhz must be >= 0");
    }
    if (doc.contains("outputs")) {
        const auto& o = doc.at("outputs");
        if (!o.is_object()) config_error("outputs must be an object");
        if (o.contains("format")) {
            if (!o.at("format").is_string()) config_error("outputs.format must be a string");
            cfg.outputs.format = o.at("format").get<std::string>();
        }
        if (o.contains("path")) {
            if (!o.at("path").is_string()) config_error("outputs.path must be a string");
            cfg.outputs.path = o.at("path").get<std::string>();
        }
        if (cfg.outputs.format != "csv" && cfg.outputs.format != "json") {
            config_error("outputs.format must be csv or json");
        }
    }
    if (doc.contains("declared_pumps")) {
        const auto& p = doc.at("declared_pumps");
        if (!p.is_object()) config_error("declared_pumps must map mode name to GHz");
        for (const auto& [k, v] : p.items()) {
            if (!v.is_number()) config_error("declared_pumps." + k + " must be a number");
            cfg.declared_pumps_ghz[k] = v.get<double>();
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_file(path)); }

DeviceConfig to_device_config(const RunConfig& config) {
    DeviceConfig dc;
    for (std::size_t k = 0; k < 3; ++k) {
        dc.modes[k] = ModeSpec{config.modes[k].name, config.modes[k].freq_ghz * 1e9, config.modes[k].kappa_mhz * 1e6};
    }
    for (const auto& c : config.couplings) {
        double rho = 0.0;
        if (c.rho) {
            rho = *c.rho;
        } else if (c.target_g_db) {
            rho = rho_for_gain(std::pow(10.0, *c.target_g_db / 10.0));
        } else {
            rho = rho_for_conversion(*c.target_c);
        }
        dc.couplings.push_back({ModePair(c.first, c.second), c.kind, rho, c.phase_deg * std::numbers::pi / 180.0});
    }
    dc.pump_detuning_tolerance = config.pump_detuning_tolerance_mhz * 1e6;
    return dc;
}

std::map<std::string, double> declared_pumps_hz(const RunConfig& config) {
    std::map<std::string, double> out;
    for (const auto& [k, v] : config.declared_pumps_ghz) out[k] = v * 1e9;
    return out;
}

std::vector<double> delta_grid_hz(const SweepSettings& sweep) {
    const double half = 0.5 * sweep.delta_span_mhz * 1e6;
    return linear_grid(-half, half, sweep.points);
}

ordered_json tuned_document(const RunConfig& config, const ValidatedDevice& tuned) {
    ordered_json doc = config.document;
    const ModePair driven(tuned.modes()[0].name, tuned.modes()[1].name);
    for (auto& c : doc.at("device").at("couplings")) {
        const ModePair pair(c.at("pair")[0].get<std::string>(), c.at("pair")[1].get<std::string>());
        const int k = tuned.coupling_index(pair);
        if (k < 0) continue;
        const auto& cp = tuned.couplings()[static_cast<std::size_t>(k)];
        c.erase("target_g_db");
        c.erase("target_c");
        c["rho"] = cp.rho;
        if (pair == driven) c["phase_deg"] = cp.phase * 180.0 / std::numbers::pi;
    }
    return doc;
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == name) return k;
    schema_error("no column named '" + std::string(name) + "'");
}

double round_sig9(double v) { return std::strtod(fmt9(v).c_str(), nullptr); }

std::string channel_name(const ValidatedDevice& device, std::size_t out, std::size_t in) {
    return "S_" + device.modes()[out].name + device.modes()[in].name;
}

Table sweep_table(const SweepResult& sweep) {
    Table t;
    t.header.push_back("delta_hz");
    for (std::size_t o = 0; o < 3; ++o)
        for (std::size_t i = 0; i < 3; ++i) {
            t.header.push_back(channel_name(sweep.device, o, i) + "_re");
            t.header.push_back(channel_name(sweep.device, o, i) + "_im");
        }
    for (std::size_t o = 0; o < 3; ++o)
        for (std::size_t i = 0; i < 3; ++i) t.header.push_back(channel_name(sweep.device, o, i) + "_db");

    for (std::size_t k = 0; k < sweep.size(); ++k) {
        const auto& s = sweep.matrices[k];
        std::vector<double> row{round_sig9(sweep.deltas[k])};
        for (std::size_t o = 0; o < 3; ++o)
            for (std::size_t i = 0; i < 3; ++i) {
                row.push_back(round_sig9(s(o, i).real()));
                row.push_back(round_sig9(s(o, i).imag()));
            }
        for (std::size_t o = 0; o < 3; ++o)
            for (std::size_t i = 0; i < 3; ++i) row.push_back(round_sig9(db_floor(s.power(o, i))));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table phase_table(const PhaseMap& map, const ValidatedDevice& device) {
    Table t;
    t.header = {"phi_deg", "delta_hz"};
    for (auto [o, i] : map.channels) t.header.push_back(channel_name(device, o, i) + "_db");
    for (std::size_t p = 0; p < map.phis.size(); ++p) {
        for (std::size_t d = 0; d < map.deltas.size(); ++d) {
            std::vector<double> row{round_sig9(map.phis[p] * 180.0 / std::numbers::pi), round_sig9(map.deltas[d])};
            for (std::size_t c = 0; c < map.channels.size(); ++c) {
                double m = map.at(c, p, d);
                row.push_back(round_sig9(db_floor(m * m)));
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

Table threshold_table(const ConversionSweep& sweep, const ValidatedDevice& device) {
    Table t;
    const auto& r = sweep.roles;
    t.header = {"conversion", "rho", channel_name(device, r.signal, r.signal) + "_db",
                channel_name(device, r.idler, r.signal) + "_db", "stable"};
    for (const auto& p : sweep.points) {
        t.rows.push_back({round_sig9(p.conversion), round_sig9(p.rho), round_sig9(db_floor(p.input_match * p.input_match)),
                          round_sig9(db_floor(p.forward_gain * p.forward_gain)), p.stable ? 1.0 : 0.0});
    }
    t.notes = {{"pair_gain_db", round_sig9(10.0 * std::log10(sweep.pair_gain))},
               {"threshold_conversion", round_sig9(sweep.threshold)}};
    return t;
}

std::string emit_csv(const Table& table) {
    check_table(table);
    std::string out;
    for (std::size_t k = 0; k < table.header.size(); ++k) {
        if (k) out += ',';
        out += table.header[k];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            out += fmt9(row[k]);
        }
        out += '\n';
    }
    for (const auto& [key, value] : table.notes) out += "# " + key + "=" + fmt9(value) + "\n";
    return out;
}

Table parse_csv(std::string_view text) {
    Table t;
    std::size_t line_no = 0;
    bool have_header = false;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (line.empty()) continue;
        if (line.back() == '\r') schema_error("line " + std::to_string(line_no) + ": CRLF line endings are not allowed");
        if (line.front() == '#') {
            auto body = line.substr(1);
            while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            auto eq = body.find('=');
            if (eq == std::string_view::npos) schema_error("line " + std::to_string(line_no) + ": malformed note");
            t.notes.emplace_back(std::string(body.substr(0, eq)), parse_number(body.substr(eq + 1), line_no));
            continue;
        }
        if (!have_header) {
            for (auto cell : split(line, ',')) t.header.emplace_back(cell);
            have_header = true;
            continue;
        }
        std::vector<double> row;
        for (auto cell : split(line, ',')) row.push_back(parse_number(cell, line_no));
        t.rows.push_back(std::move(row));
    }
    if (!have_header) schema_error("missing header line");
    check_table(t);
    return t;
}

std::string emit_json(const Table& table) {
    check_table(table);
    std::string out = "{\n \"columns\": " + ordered_json(table.header).dump() + ",\n \"rows\": [";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += r ? ",\n  " : "\n  ";
        out += ordered_json(table.rows[r]).dump();
    }
    out += table.rows.empty() ? "]" : "\n ]";
    if (!table.notes.empty()) {
        ordered_json notes = ordered_json::object();
        for (const auto& [k, v] : table.notes) notes[k] = v;
        out += ",\n \"notes\": " + notes.dump();
    }
    return out + "\n}\n";
}

Table parse_json(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        schema_error(std::string("not valid JSON: ") + e.what());
    }
    Table t;
    try {
        for (const auto& h : doc.at("columns")) t.header.push_back(h.get<std::string>());
        for (const auto& row : doc.at("rows")) {
            std::vector<double> r;
            for (const auto& v : row) r.push_back(v.get<double>());
            t.rows.push_back(std::move(r));
        }
        if (doc.contains("notes"))
            for (const auto& [k, v] : doc.at("notes").items()) t.notes.emplace_back(k, v.get<double>());
    } catch (const nlohmann::json::exception& e) {
        schema_error(std::string("unexpected table layout: ") + e.what());
    }
    check_table(t);
    return t;
}

Table load_table(const std::filesystem::path& path) {
    const auto text = read_file(path);
    return path.extension() == ".json" ? parse_json(text) : parse_csv(text);
}

std::string emit(const Table& table, std::string_view format) {
    if (format == "json") return emit_json(table);
    if (format == "csv") return emit_csv(table);
    throw Error(ErrorKind::ConfigError, "output format must be csv or json");
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace nonrecip::io

#pragma once

// Run configuration files and tabular result files (CSV / JSON).
//
// Config files are JSON text. Units at this surface: mode frequencies and
// declared pumps in GHz, decay rates and spans in MHz, angles in degrees.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nonrecip/cmt.hpp"
#include "nonrecip/tuner.hpp"

namespace nonrecip::io {

struct ModeEntry {
    std::string name;
    double freq_ghz = 0.0;
    double kappa_mhz = 0.0;
};

struct CouplingEntry {
    std::string first;
    std::string second;
    ProcessKind kind = ProcessKind::Conversion;
    std::optional<double> rho;
    std::optional<double> target_g_db;
    std::optional<double> target_c;
    double phase_deg = 0.0;
};

struct SweepSettings {
    double delta_span_mhz = 60.0;
    std::size_t points = 1001;
};

struct OutputSettings {
    std::string format = "csv";
    std::string path;
};

struct RunConfig {
    std::vector<ModeEntry> modes;
    std::vector<CouplingEntry> couplings;
    double pump_detuning_tolerance_mhz = 10.0;
    SweepSettings sweep;
    OutputSettings outputs;
    std::map<std::string, double> declared_pumps_ghz;
    nlohmann::ordered_json document;  // parsed source, kept for write-back
};

/// Throws Error(ConfigError) naming the offending field.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Converts units and resolves target_g_db / target_c into rho.
DeviceConfig to_device_config(const RunConfig& config);

/// Declared pumps converted to Hz.
std::map<std::string, double> declared_pumps_hz(const RunConfig& config);

/// Detuning grid over ±span/2 (Hz); a single point sits at δ = 0.
std::vector<double> delta_grid_hz(const SweepSettings& sweep);

/// Source document with every coupling's strength replaced by the tuned
/// rho and the driven coupling's phase updated. Other fields are untouched.
nlohmann::ordered_json tuned_document(const RunConfig& config, const ValidatedDevice& tuned);

/// Header plus numeric rows, with optional "key = value" notes.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, double>> notes;

    std::size_t column(std::string_view name) const;  // SchemaError if absent
};

/// Rounds to the 9 significant digits used in files.
double round_sig9(double v);

/// delta_hz, S_xy_re, S_xy_im (row-major out,in), then S_xy_db.
Table sweep_table(const SweepResult& sweep);
Table phase_table(const PhaseMap& map, const ValidatedDevice& device);
Table threshold_table(const ConversionSweep& sweep, const ValidatedDevice& device);

std::string channel_name(const ValidatedDevice& device, std::size_t out, std::size_t in);

std::string emit_csv(const Table& table);
std::string emit_json(const Table& table);
/// Both throw Error(SchemaError) on malformed input.
Table parse_csv(std::string_view text);
Table parse_json(std::string_view text);

Table load_table(const std::filesystem::path& path);
std::string emit(const Table& table, std::string_view format);

/// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace nonrecip::io

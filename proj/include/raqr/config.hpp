#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace raqr {

// All scenario parameters, in normalized units (noise_var = 1 by default).
struct SystemConfig {
    int n_tx = 3;                     // transmit antennas
    int n_rx = 4;                     // vapor cells
    int shots = 5;                    // RAQR shots per cell
    int psk_order = 4;                // M-PSK alphabet size
    double total_power = 1.0;         // P; P == noise_var gives 0 dB sensing SNR
    double noise_var = 1.0;           // RAQR complex noise variance
    double rnr_db = 0.0;              // |r|^2 / noise_var in dB; -inf turns the reference off
    double rf_noise_penalty_db = 20;  // RF noise floor above the RAQR floor, in dB
    int rf_shots = 20;                // complex samples per RF sensor
    double prior_eta = 1.0;           // MAP likelihood-ratio threshold
    std::uint64_t master_seed = 20251016;

    // Throws ConfigError naming the first violated constraint.
    void validate() const;

    [[nodiscard]] double per_antenna_power() const { return total_power / n_tx; }
    [[nodiscard]] double reference_amplitude() const;
    [[nodiscard]] double rf_noise_var() const;
};

// Flat sectioned key-value configuration text:
//
//   ; comment
//   [section]
//   key = value
//
// Keys are addressed as "section.key". Later assignments (including
// overrides) replace earlier ones.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text);
    static ConfigFile load(const std::filesystem::path& path);

    void set(const std::string& dotted_key, const std::string& value);
    // Parses "section.key=value".
    void set_assignment(const std::string& assignment);

    [[nodiscard]] std::optional<std::string> get(const std::string& dotted_key) const;
    [[nodiscard]] std::vector<std::string> keys() const;
    [[nodiscard]] std::string dump() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Reads the [system], [raqr], [rf] and [detection] sections. Unknown keys in
// those sections are rejected so typos do not silently fall back to defaults.
SystemConfig system_config_from(const ConfigFile& file);

// Writes every SystemConfig field into `file`.
void store_system_config(const SystemConfig& cfg, ConfigFile& file);

}  // namespace raqr

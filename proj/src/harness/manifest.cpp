#include "raqr/error.hpp"
#include "raqr/manifest.hpp"

#include <json.hpp>

#include <ctime>
#include <fstream>
#include <sstream>

namespace raqr {
namespace {

std::string iso_utc(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw ConfigError("cannot write output file: " + path.string());
}

}  // namespace

std::string output_stem(const std::string& experiment_id, std::uint64_t seed) {
    return experiment_id + "_seed" + std::to_string(seed);
}

std::string manifest_json(const RunManifest& m) {
    using nlohmann::ordered_json;
    ordered_json config = ordered_json::object();
    for (const auto& key : m.resolved_config.keys()) config[key] = *m.resolved_config.get(key);
    const auto& s = m.spec;
    ordered_json j;
    j["experiment_id"] = m.experiment_id;
    j["command"] = m.command;
    j["tool_version"] = kToolVersion;
    j["seed"] = s.base.master_seed;
    j["workers"] = m.workers;
    j["start_utc"] = iso_utc(m.start);
    j["end_utc"] = iso_utc(m.end);
    j["wall_seconds"] = std::chrono::duration<double>(m.end - m.start).count();
    j["config"] = config;
    j["experiment"] = {
        {"sweep_variable", sweep_variable_name(s.sweep_variable)},
        {"grid", s.grid},
        {"trials", s.trials},
        {"p_fa", s.p_fa.value()},
        {"calibration", s.calibration == Calibration::HeldOut ? "held_out" : "in_sample"},
        {"common_random_numbers", s.common_random_numbers},
        {"stream_layout", "(grid_index * trials + trial_index) * 8 + role"},
    };
    j["outputs"] = m.outputs;
    return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_run(const std::filesystem::path& dir, RunManifest manifest,
                                             const SweepResult& result) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    const std::string stem = output_stem(manifest.experiment_id, manifest.spec.base.master_seed);
    const auto csv = dir / (stem + ".csv");
    const auto ini = dir / (stem + ".config.ini");
    const auto json = dir / (stem + ".manifest.json");

    std::ostringstream table;
    result.write_csv(table);
    write_file(csv, table.str());
    write_file(ini, manifest.resolved_config.dump());
    manifest.outputs = {csv.filename().string(), ini.filename().string(), json.filename().string()};
    write_file(json, manifest_json(manifest));
    return {csv, ini, json};
}

}  // namespace raqr

#pragma once

// Run provenance: file naming and the JSON manifest written next to every CSV.

#include "raqr/config.hpp"
#include "raqr/harness.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace raqr {

inline constexpr const char* kToolVersion = RAQR_VERSION;

struct RunManifest {
    std::string experiment_id;
    std::string command;
    ConfigFile resolved_config;
    ExperimentSpec spec;
    int workers = 0;
    std::chrono::system_clock::time_point start;
    std::chrono::system_clock::time_point end;
    std::vector<std::string> outputs;
};

// "<experiment_id>_seed<seed>"
std::string output_stem(const std::string& experiment_id, std::uint64_t seed);

// Writes the config echo (.ini), the sweep CSV and the manifest (.json)
// into `dir`, creating it if needed. Returns the written paths.
std::vector<std::filesystem::path> write_run(const std::filesystem::path& dir, RunManifest manifest,
                                             const SweepResult& result);

std::string manifest_json(const RunManifest& manifest);

}  // namespace raqr

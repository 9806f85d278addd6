#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dualmean/simulation.hpp"

namespace dualmean {

/// Provenance record written once per CLI command. Result files reference
/// the manifest by its (deterministic) filename; the manifest itself carries
/// timing and is not byte-stable across runs.
struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    std::uint64_t seed = 0;
    std::string artifact_version;
    std::vector<std::string> outputs;
    double wall_clock_ms = 0.0;
};

std::string manifest_filename(const std::string& command);
void write_manifest(const std::string& out_dir, const RunManifest& m);

/// Writes text, creating parent directories. Throws ConfigError with the
/// path on failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// 6 significant digits for report tables.
std::string format_table(double v);
/// Round-trip precision for data files.
std::string format_full(double v);

/// Two-column CSV (true_x, true_y) at round-trip precision.
std::string population_csv(const GeneratedPopulation& pop);

}  // namespace dualmean

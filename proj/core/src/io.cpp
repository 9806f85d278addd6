#include "dualmean/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualmean/errors.hpp"
#include "dualmean/serialization.hpp"

namespace dualmean {

std::string manifest_filename(const std::string& command) {
    return command + "_manifest.json";
}

void write_manifest(const std::string& out_dir, const RunManifest& m) {
    json j{{"command", m.command},
           {"inputs", m.inputs},
           {"seed", m.seed},
           {"artifact_version", m.artifact_version},
           {"outputs", m.outputs},
           {"wall_clock_ms", m.wall_clock_ms}};
    write_text_file((std::filesystem::path(out_dir) / manifest_filename(m.command)).string(),
                    j.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError(path + ": cannot open for writing");
    out << content;
    if (!out) throw ConfigError(path + ": write failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_table(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string population_csv(const GeneratedPopulation& pop) {
    std::string out = "true_x,true_y\n";
    for (std::size_t i = 0; i < pop.true_x.size(); ++i) {
        out += format_full(pop.true_x[i]);
        out += ',';
        out += format_full(pop.true_y[i]);
        out += '\n';
    }
    return out;
}

}  // namespace dualmean

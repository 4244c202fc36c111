#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace breakfront {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::string& path);

// Every successful CLI run writes one of these next to its outputs; re-running
// the recorded argv reproduces the output files byte for byte.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::string params_json;  // resolved parameters, stable key order
    uint64_t seed = 0;
    std::string version;
    std::vector<std::pair<std::string, std::string>> input_digests;   // path, sha256
    std::vector<std::pair<std::string, std::string>> output_digests;  // path, sha256
    double wall_seconds = 0.0;

    std::string to_json(int indent = 2) const;
};

RunManifest manifest_from_json(const std::string& text);

}  // namespace breakfront

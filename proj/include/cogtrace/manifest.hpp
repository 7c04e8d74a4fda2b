#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cogtrace {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Writes manifest.json next to a command's outputs: tool version, command
// name, effective configuration and input-file hashes. Deliberately contains
// no timestamps or absolute output paths so reruns are byte-identical.
void write_manifest(const std::filesystem::path& outdir, const std::string& command,
                    const nlohmann::ordered_json& config,
                    const std::vector<std::filesystem::path>& inputs);

}  // namespace cogtrace

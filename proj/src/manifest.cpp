#include "cogtrace/manifest.hpp"

#include "cogtrace/util.hpp"

namespace cogtrace {

void write_manifest(const std::filesystem::path& outdir, const std::string& command,
                    const nlohmann::ordered_json& config,
                    const std::vector<std::filesystem::path>& inputs) {
    nlohmann::ordered_json manifest;
    manifest["tool"] = "cogtrace";
    manifest["version"] = std::string(kToolVersion);
    manifest["command"] = command;
    manifest["config"] = config;
    nlohmann::ordered_json input_hashes = nlohmann::ordered_json::object();
    for (const auto& path : inputs) {
        input_hashes[path.filename().string()] = hash_file(path);
    }
    manifest["inputs"] = std::move(input_hashes);
    std::filesystem::create_directories(outdir);
    write_file(outdir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace cogtrace

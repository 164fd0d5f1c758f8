#pragma once
// One manifest per CLI run: enough to re-run the command and compare every
// reported metric.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace pemscl {

inline constexpr int kManifestFormatVersion = 1;
const char* tool_version();

struct ExperimentManifest {
    std::string command;
    /// Subcommand arguments other than config values (paths, seed lists,
    /// ratios, toggles), as given or defaulted.
    nlohmann::json arguments = nlohmann::json::object();
    /// Settings::to_json() of the resolved configuration.
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::uint64_t> seeds;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
    nlohmann::json metrics = nlohmann::json::object();
    std::string version = tool_version();
    double runtime_seconds = 0.0;
};

nlohmann::json to_json(const ExperimentManifest& m);
ExperimentManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const ExperimentManifest& m, const std::filesystem::path& path);
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// Paths into `a` and `b` whose values differ (exact comparison, doubles
/// included); empty when identical.
std::vector<std::string> diff_metrics(const nlohmann::json& a, const nlohmann::json& b);

}  // namespace pemscl

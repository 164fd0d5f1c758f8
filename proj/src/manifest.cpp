#include "pemscl/manifest.hpp"

#include "pemscl/error.hpp"
#include "pemscl/io.hpp"

#ifndef PEMSCL_VERSION
#define PEMSCL_VERSION "0.0.0"
#endif

namespace pemscl {

const char* tool_version() { return PEMSCL_VERSION; }

nlohmann::json to_json(const ExperimentManifest& m) {
    nlohmann::json j;
    j["format"] = "pemscl-manifest";
    j["format_version"] = kManifestFormatVersion;
    j["command"] = m.command;
    j["arguments"] = m.arguments;
    j["config"] = m.config;
    j["seeds"] = m.seeds;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["metrics"] = m.metrics;
    j["tool_version"] = m.version;
    j["runtime_seconds"] = m.runtime_seconds;
    return j;
}

ExperimentManifest manifest_from_json(const nlohmann::json& j) {
    try {
        require(j.value("format", "") == "pemscl-manifest", ErrorKind::Parse, "not a pemscl manifest");
        require(j.at("format_version").get<int>() == kManifestFormatVersion, ErrorKind::Parse,
                "unsupported manifest format_version");
        ExperimentManifest m;
        m.command = j.at("command").get<std::string>();
        m.arguments = j.at("arguments");
        m.config = j.at("config");
        m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
        m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
        m.metrics = j.at("metrics");
        m.version = j.at("tool_version").get<std::string>();
        m.runtime_seconds = j.at("runtime_seconds").get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("malformed manifest: ") + e.what());
    }
}

void save_manifest(const ExperimentManifest& m, const std::filesystem::path& path) {
    write_text_file(path, to_json(m).dump(2) + "\n");
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

namespace {

void diff_into(const nlohmann::json& a, const nlohmann::json& b, const std::string& path,
               std::vector<std::string>& out) {
    if (a.is_object() && b.is_object()) {
        for (const auto& [k, v] : a.items()) {
            if (!b.contains(k)) {
                out.push_back(path + "/" + k);
            } else {
                diff_into(v, b.at(k), path + "/" + k, out);
            }
        }
        for (const auto& [k, v] : b.items()) {
            if (!a.contains(k)) out.push_back(path + "/" + k);
        }
        return;
    }
    if (a.is_array() && b.is_array() && a.size() == b.size()) {
        for (std::size_t i = 0; i < a.size(); ++i) diff_into(a[i], b[i], path + "/" + std::to_string(i), out);
        return;
    }
    if (a.is_number() && b.is_number()) {
        if (a.get<double>() != b.get<double>()) out.push_back(path.empty() ? "/" : path);
        return;
    }
    if (a != b) out.push_back(path.empty() ? "/" : path);
}

}  // namespace

std::vector<std::string> diff_metrics(const nlohmann::json& a, const nlohmann::json& b) {
    std::vector<std::string> out;
    diff_into(a, b, "", out);
    return out;
}

}  // namespace pemscl

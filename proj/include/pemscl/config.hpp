#pragma once
// Flat key=value experiment configuration with sectioned keys (loss.tau,
// train.epochs, ...). Every key has a built-in default; presets, config files
// and command-line flags override field-wise, and the source of each resolved
// value is kept for the manifest.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pemscl/data.hpp"
#include "pemscl/relation.hpp"
#include "pemscl/train.hpp"

namespace pemscl {

struct RegimeConfig {
    std::string pattern = "OOG";
    double noise_rate = 0.4;
    std::uint64_t seed = 11;
};

struct ExperimentConfig {
    SyntheticConfig data;
    TrainConfig train;
    RegimeConfig regime;
    BucketCuts cuts;

    void validate() const;
};

enum class ValueSource { Default, Preset, File, Flag, Manifest };
const char* to_string(ValueSource source);

struct SettingValue {
    std::string value;
    ValueSource source = ValueSource::Default;
};

class Settings {
public:
    /// All known keys at their built-in defaults.
    Settings();

    /// Throws Config for unknown keys and for values that do not parse as the
    /// key's type.
    void set(const std::string& key, const std::string& value, ValueSource source);
    const SettingValue& get(const std::string& key) const;
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    void apply_preset(const std::string& name);
    void apply_text(const std::string& text, const std::string& origin);
    void apply_file(const std::string& path);
    void apply_json(const nlohmann::json& resolved, ValueSource source);

    /// Builds and validates the typed configuration.
    ExperimentConfig resolve() const;

    /// {key: {"value": ..., "source": ...}} in key order.
    nlohmann::json to_json() const;
    /// Round-trippable key = value text.
    std::string to_text() const;

    static std::vector<std::string> keys();
    static std::vector<std::string> presets();

private:
    std::map<std::string, SettingValue> values_;
};

/// Canonical text for a real value; parses back to the same double.
std::string format_real(double value);

}  // namespace pemscl

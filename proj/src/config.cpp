#include "pemscl/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "pemscl/error.hpp"
#include "pemscl/io.hpp"

namespace pemscl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        fail(ErrorKind::Config, key + ": expected a finite number, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        fail(ErrorKind::Config, key + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    fail(ErrorKind::Config, key + ": expected true or false, got '" + text + "'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct Field {
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string& key, const std::string&)> set;
};

template <typename Member>
Field real_field(Member member) {
    return {[member](const ExperimentConfig& c) { return format_real(member(c)); },
            [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
                member(c) = parse_real(k, v);
            }};
}

template <typename Member>
Field count_field(Member member) {
    return {[member](const ExperimentConfig& c) {
                return std::to_string(member(c));
            },
            [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
                using T = std::remove_reference_t<decltype(member(c))>;
                member(c) = static_cast<T>(parse_unsigned(k, v));
            }};
}

template <typename Member>
Field bool_field(Member member) {
    return {[member](const ExperimentConfig& c) { return bool_text(member(c)); },
            [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
                member(c) = parse_bool(k, v);
            }};
}

#define PEMSCL_MEMBER(expr) [](auto& c) -> auto& { return c.expr; }

const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["loss.tau"] = real_field(PEMSCL_MEMBER(train.loss.tau));
        t["loss.lambda"] = real_field(PEMSCL_MEMBER(train.loss.lambda));
        t["loss.gamma_mode"] = {
            [](const ExperimentConfig& c) { return std::string(to_string(c.train.loss.gamma_mode)); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
                c.train.loss.gamma_mode = parse_gamma_mode(v);
            }};
        t["loss.neg_sampling_ratio"] = real_field(PEMSCL_MEMBER(train.loss.neg_sampling_ratio));
        t["loss.enable_em"] = bool_field(PEMSCL_MEMBER(train.loss.enable_em));
        t["loss.enable_scl"] = bool_field(PEMSCL_MEMBER(train.loss.enable_scl));
        t["loss.enable_neg_sampling"] = bool_field(PEMSCL_MEMBER(train.loss.enable_neg_sampling));

        t["train.epochs"] = count_field(PEMSCL_MEMBER(train.epochs));
        t["train.batch_size"] = count_field(PEMSCL_MEMBER(train.batch_size));
        t["train.learning_rate"] = real_field(PEMSCL_MEMBER(train.learning_rate));
        t["train.warmup_ratio"] = real_field(PEMSCL_MEMBER(train.warmup_ratio));
        t["train.beta1"] = real_field(PEMSCL_MEMBER(train.optimizer.beta1));
        t["train.beta2"] = real_field(PEMSCL_MEMBER(train.optimizer.beta2));
        t["train.epsilon"] = real_field(PEMSCL_MEMBER(train.optimizer.epsilon));
        t["train.weight_decay"] = real_field(PEMSCL_MEMBER(train.optimizer.weight_decay));
        t["train.grad_clip_norm"] = {
            [](const ExperimentConfig& c) {
                return c.train.grad_clip_norm ? format_real(*c.train.grad_clip_norm) : std::string("none");
            },
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                if (v == "none") {
                    c.train.grad_clip_norm.reset();
                } else {
                    c.train.grad_clip_norm = parse_real(k, v);
                }
            }};
        t["train.seed"] = count_field(PEMSCL_MEMBER(train.seed));
        t["train.resample"] = {
            [](const ExperimentConfig& c) { return std::string(to_string(c.train.resample)); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
                c.train.resample = parse_resample_schedule(v);
            }};
        t["train.select_best_on_dev"] = bool_field(PEMSCL_MEMBER(train.select_best_on_dev));

        t["model.hidden_dim"] = count_field(PEMSCL_MEMBER(train.model.hidden_dim));
        t["model.group_count"] = count_field(PEMSCL_MEMBER(train.model.group_count));

        t["data.num_relations"] = count_field(PEMSCL_MEMBER(data.num_relations));
        t["data.train_documents"] = count_field(PEMSCL_MEMBER(data.train_documents));
        t["data.dev_documents"] = count_field(PEMSCL_MEMBER(data.dev_documents));
        t["data.test_documents"] = count_field(PEMSCL_MEMBER(data.test_documents));
        t["data.min_pairs_per_document"] = count_field(PEMSCL_MEMBER(data.min_pairs_per_document));
        t["data.max_pairs_per_document"] = count_field(PEMSCL_MEMBER(data.max_pairs_per_document));
        t["data.zipf_exponent"] = real_field(PEMSCL_MEMBER(data.zipf_exponent));
        t["data.multi_label_rate"] = real_field(PEMSCL_MEMBER(data.multi_label_rate));
        t["data.embedding_dim"] = count_field(PEMSCL_MEMBER(data.embedding_dim));
        t["data.prototype_noise_sigma"] = real_field(PEMSCL_MEMBER(data.prototype_noise_sigma));
        t["data.false_negative_rate"] = real_field(PEMSCL_MEMBER(data.false_negative_rate));
        t["data.na_fraction"] = real_field(PEMSCL_MEMBER(data.na_fraction));
        t["data.entity_pool_size"] = count_field(PEMSCL_MEMBER(data.entity_pool_size));
        t["data.seed"] = count_field(PEMSCL_MEMBER(data.seed));

        t["regime.pattern"] = {
            [](const ExperimentConfig& c) { return c.regime.pattern; },
            [](ExperimentConfig& c, const std::string&, const std::string& v) { c.regime.pattern = v; }};
        t["regime.noise_rate"] = real_field(PEMSCL_MEMBER(regime.noise_rate));
        t["regime.seed"] = count_field(PEMSCL_MEMBER(regime.seed));

        t["eval.head_count"] = count_field(PEMSCL_MEMBER(cuts.head_count));
        t["eval.tail_count"] = count_field(PEMSCL_MEMBER(cuts.tail_count));
        return t;
    }();
    return table;
}

#undef PEMSCL_MEMBER

const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& preset_table() {
    static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> table{
        {"docred-like",
         {{"loss.tau", "2"}, {"loss.lambda", "2"}, {"loss.gamma_mode", "unit"},
          {"train.warmup_ratio", "0.1"}, {"train.batch_size", "4"}}},
        {"redocred-like",
         {{"loss.tau", "0.2"}, {"loss.lambda", "0.1"}, {"loss.gamma_mode", "set-size"},
          {"train.warmup_ratio", "0.06"}, {"train.batch_size", "4"}}},
    };
    return table;
}

}  // namespace

std::string format_real(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void ExperimentConfig::validate() const {
    data.validate();
    train.validate();
    require(regime.noise_rate >= 0.0 && regime.noise_rate < 1.0, ErrorKind::Config,
            "regime.noise_rate must be in [0, 1)");
    require(regime.pattern.size() == 3 &&
                regime.pattern.find_first_not_of("OG") == std::string::npos,
            ErrorKind::Config, "regime.pattern must be three letters of O/G, got '" + regime.pattern + "'");
    require(cuts.head_count + cuts.tail_count <= data.num_relations, ErrorKind::Config,
            "eval.head_count + eval.tail_count exceeds data.num_relations");
}

const char* to_string(ValueSource s) {
    switch (s) {
        case ValueSource::Default: return "default";
        case ValueSource::Preset: return "preset";
        case ValueSource::File: return "file";
        case ValueSource::Flag: return "flag";
        case ValueSource::Manifest: return "manifest";
    }
    return "?";
}

Settings::Settings() {
    const ExperimentConfig defaults;
    for (const auto& [key, field] : field_table()) values_[key] = {field.get(defaults), ValueSource::Default};
}

void Settings::set(const std::string& key, const std::string& raw, ValueSource source) {
    const auto it = field_table().find(key);
    require(it != field_table().end(), ErrorKind::Config, "unknown config key '" + key + "'");
    const std::string value = trim(raw);
    // Parse once to reject malformed values early, then store canonical text.
    ExperimentConfig scratch;
    it->second.set(scratch, key, value);
    values_[key] = {it->second.get(scratch), source};
}

const SettingValue& Settings::get(const std::string& key) const {
    const auto it = values_.find(key);
    require(it != values_.end(), ErrorKind::Config, "unknown config key '" + key + "'");
    return it->second;
}

void Settings::apply_preset(const std::string& name) {
    const auto it = preset_table().find(name);
    if (it == preset_table().end()) {
        std::string known;
        for (const auto& [k, v] : preset_table()) known += (known.empty() ? "" : ", ") + k;
        fail(ErrorKind::Config, "unknown preset '" + name + "' (known: " + known + ")");
    }
    for (const auto& [key, value] : it->second) set(key, value, ValueSource::Preset);
}

void Settings::apply_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            require(line.back() == ']' && line.size() > 2, ErrorKind::Config,
                    where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorKind::Config, where + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        try {
            set(key, line.substr(eq + 1), ValueSource::File);
        } catch (const Error& e) {
            fail(ErrorKind::Config, where + ": " + e.what());
        }
    }
}

void Settings::apply_file(const std::string& path) { apply_text(read_text_file(path), path); }

void Settings::apply_json(const nlohmann::json& resolved, ValueSource source) {
    require(resolved.is_object(), ErrorKind::Parse, "resolved config must be an object");
    for (const auto& [key, entry] : resolved.items()) {
        const nlohmann::json& v = entry.is_object() && entry.contains("value") ? entry.at("value") : entry;
        require(v.is_string(), ErrorKind::Parse, "config value for '" + key + "' must be a string");
        set(key, v.get<std::string>(), source);
    }
}

ExperimentConfig Settings::resolve() const {
    ExperimentConfig c;
    for (const auto& [key, field] : field_table()) field.set(c, key, values_.at(key).value);
    c.validate();
    return c;
}

nlohmann::json Settings::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, v] : values_) j[key] = {{"value", v.value}, {"source", to_string(v.source)}};
    return j;
}

std::string Settings::to_text() const {
    std::ostringstream out;
    for (const auto& [key, v] : values_) out << key << " = " << v.value << "\n";
    return out.str();
}

std::vector<std::string> Settings::keys() {
    std::vector<std::string> out;
    for (const auto& [key, field] : field_table()) out.push_back(key);
    return out;
}

std::vector<std::string> Settings::presets() {
    std::vector<std::string> out;
    for (const auto& [name, values] : preset_table()) out.push_back(name);
    return out;
}

}  // namespace pemscl

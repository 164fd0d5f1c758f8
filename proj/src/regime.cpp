#include <fstream>

#include "pemscl/data.hpp"
#include "pemscl/error.hpp"
#include "pemscl/io.hpp"

namespace pemscl {

CorruptionResult inject_false_negatives(const Corpus& corpus, double rate, CounterRng& rng) {
    require(rate >= 0.0 && rate < 1.0, ErrorKind::Config,
            "false-negative rate must be in [0, 1), got " + std::to_string(rate));
    CorruptionResult out;
    out.corpus = corpus;
    out.corpus.label_source = LabelSource::Original;
    for (PairExample& ex : out.corpus.examples) {
        if (!ex.gold_positive_relations) ex.gold_positive_relations = ex.positive_relations;
        if (ex.is_na()) continue;
        ++out.positives_before;
        if (rng.bernoulli(rate)) {
            ex.positive_relations.clear();
            ++out.corrupted;
        }
    }
    return out;
}

const char* to_string(RegimeKind kind) {
    switch (kind) {
        case RegimeKind::OOG: return "OOG";
        case RegimeKind::OGG: return "OGG";
        case RegimeKind::GGG: return "GGG";
        case RegimeKind::OOO: return "OOO";
        case RegimeKind::Custom: return "Custom";
    }
    return "Custom";
}

namespace {

RegimeKind kind_of(const std::string& pattern) {
    if (pattern == "OOG") return RegimeKind::OOG;
    if (pattern == "OGG") return RegimeKind::OGG;
    if (pattern == "GGG") return RegimeKind::GGG;
    if (pattern == "OOO") return RegimeKind::OOO;
    return RegimeKind::Custom;
}

std::size_t apply_source(const Corpus& gold, char source, double rate, std::uint64_t seed,
                         const char* split, Corpus& out) {
    if (source == 'G') {
        out = gold;
        out.label_source = LabelSource::Gold;
        for (PairExample& ex : out.examples) {
            if (!ex.gold_positive_relations) ex.gold_positive_relations = ex.positive_relations;
        }
        return 0;
    }
    CounterRng rng(seed, 0, std::string("false-negatives-") + split);
    CorruptionResult r = inject_false_negatives(gold, rate, rng);
    out = std::move(r.corpus);
    return r.corrupted;
}

}  // namespace

Regime assemble_regime(const GoldSplits& gold, double noise_rate, const std::string& pattern,
                       std::uint64_t seed) {
    require(pattern.size() == 3 && pattern.find_first_not_of("OG") == std::string::npos,
            ErrorKind::Config, "regime kind must be OOG, OGG, GGG, OOO or a 3-letter O/G pattern, got '" +
                                   pattern + "'");
    require(gold.train.vocabulary.relations() == gold.dev.vocabulary.relations() &&
                gold.train.vocabulary.relations() == gold.test.vocabulary.relations(),
            ErrorKind::Config, "train/dev/test splits must share one relation vocabulary");
    Regime regime;
    regime.kind = kind_of(pattern);
    regime.pattern = pattern;
    regime.noise_rate = noise_rate;
    regime.noise_seed = seed;
    regime.corrupted_train = apply_source(gold.train, pattern[0], noise_rate, seed, "train", regime.train);
    regime.corrupted_dev = apply_source(gold.dev, pattern[1], noise_rate, seed, "dev", regime.dev);
    regime.corrupted_test = apply_source(gold.test, pattern[2], noise_rate, seed, "test", regime.test);

    // Frequencies always describe the (possibly noisy) training labels.
    const auto freq = count_relation_frequencies(regime.train);
    regime.train.vocabulary.set_frequencies(freq);
    regime.dev.vocabulary.set_frequencies(freq);
    regime.test.vocabulary.set_frequencies(freq);
    return regime;
}

void save_regime(const Regime& regime, const std::filesystem::path& dir,
                 const nlohmann::json& extra) {
    save_corpus(regime.train, dir / "train.jsonl");
    save_corpus(regime.dev, dir / "dev.jsonl");
    save_corpus(regime.test, dir / "test.jsonl");
    nlohmann::json manifest = extra;
    manifest["regime_kind"] = to_string(regime.kind);
    manifest["pattern"] = regime.pattern;
    manifest["noise_rate"] = regime.noise_rate;
    manifest["noise_seed"] = regime.noise_seed;
    manifest["corrupted"] = {{"train", regime.corrupted_train},
                             {"dev", regime.corrupted_dev},
                             {"test", regime.corrupted_test}};
    write_text_file(dir / "regime.json", manifest.dump(2) + "\n");
}

Regime load_regime(const std::filesystem::path& dir) {
    Regime regime;
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_text_file(dir / "regime.json"));
        regime.pattern = manifest.at("pattern").get<std::string>();
        regime.noise_rate = manifest.value("noise_rate", 0.0);
        regime.noise_seed = manifest.value("noise_seed", std::uint64_t{0});
        if (manifest.contains("corrupted")) {
            regime.corrupted_train = manifest["corrupted"].value("train", std::size_t{0});
            regime.corrupted_dev = manifest["corrupted"].value("dev", std::size_t{0});
            regime.corrupted_test = manifest["corrupted"].value("test", std::size_t{0});
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, (dir / "regime.json").string() + ": " + e.what());
    }
    regime.kind = kind_of(regime.pattern);
    regime.train = load_corpus(dir / "train.jsonl");
    regime.dev = load_corpus(dir / "dev.jsonl");
    regime.test = load_corpus(dir / "test.jsonl");
    require(regime.train.vocabulary.relations() == regime.dev.vocabulary.relations() &&
                regime.train.vocabulary.relations() == regime.test.vocabulary.relations(),
            ErrorKind::Parse, "regime bundle splits do not share one vocabulary");
    return regime;
}

}  // namespace pemscl

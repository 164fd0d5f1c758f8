#pragma once

// Synthetic long-tailed corpora, false-negative corruption, train/dev/test
// label-source regimes, and DocRED-format ingestion.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pemscl/relation.hpp"
#include "pemscl/rng.hpp"

namespace pemscl {

struct SyntheticConfig {
    std::size_t num_relations = 96;
    std::size_t train_documents = 200;
    std::size_t dev_documents = 60;
    std::size_t test_documents = 60;
    std::size_t min_pairs_per_document = 10;
    std::size_t max_pairs_per_document = 20;
    double zipf_exponent = 1.05;
    double multi_label_rate = 0.1;
    std::size_t embedding_dim = 32;
    double prototype_noise_sigma = 0.3;
    double false_negative_rate = 0.0;
    double na_fraction = 0.5;
    std::size_t entity_pool_size = 400;
    std::uint64_t seed = 1;

    void validate() const;
};

nlohmann::json to_json(const SyntheticConfig& config);

struct GoldSplits {
    Corpus train;
    Corpus dev;
    Corpus test;
};

/// One split ("train", "dev" or "test"; the document count comes from the
/// config) with gold labels. Relation prototypes are shared by all splits of
/// the same seed, documents draw from per-(split, document) streams.
Corpus generate_synthetic_corpus(const SyntheticConfig& config, std::string_view split = "train");

/// All three splits, sharing one vocabulary whose frequencies are counted on
/// the train split.
GoldSplits generate_synthetic_splits(const SyntheticConfig& config);

/// Fraction of positive-relation occurrences covered by the `top` most
/// frequent relations.
double top_relation_share(const Corpus& corpus, std::size_t top = 10);

struct CorruptionResult {
    Corpus corpus;
    std::size_t positives_before = 0;
    std::size_t corrupted = 0;
};

/// Each positive example independently loses all its labels with probability
/// `rate`; gold labels are kept in gold_positive_relations.
CorruptionResult inject_false_negatives(const Corpus& corpus, double rate, CounterRng& rng);

enum class RegimeKind { OOG, OGG, GGG, OOO, Custom };

const char* to_string(RegimeKind kind);

struct Regime {
    Corpus train;
    Corpus dev;
    Corpus test;
    RegimeKind kind = RegimeKind::GGG;
    std::string pattern = "GGG";  // label source of train/dev/test
    double noise_rate = 0.0;
    std::uint64_t noise_seed = 0;
    std::size_t corrupted_train = 0;
    std::size_t corrupted_dev = 0;
    std::size_t corrupted_test = 0;
};

/// `pattern` is a named kind (OOG, OGG, GGG, OOO) or any three-letter string
/// of O/G (Custom). Train/dev/test use independent corruption streams.
Regime assemble_regime(const GoldSplits& gold, double noise_rate, const std::string& pattern,
                       std::uint64_t seed);

/// Bundle layout: train.jsonl, dev.jsonl, test.jsonl, regime.json.
void save_regime(const Regime& regime, const std::filesystem::path& dir,
                 const nlohmann::json& extra = nlohmann::json::object());
Regime load_regime(const std::filesystem::path& dir);

struct FeaturizedPair {
    Vector mention;
    Vector context;
};

/// Signed feature hashing of unigrams and bigrams, L2-normalised; an empty
/// token list gives the zero vector.
Vector hash_tokens(const std::vector<std::string>& tokens, std::size_t dim);
FeaturizedPair hashed_featurizer(const std::vector<std::string>& mention_tokens,
                                 const std::vector<std::string>& window_tokens, std::size_t dim);

struct DocredOptions {
    std::size_t embedding_dim = 32;
    std::size_t context_margin = 5;
    std::size_t max_context_tokens = 128;
    LabelSource label_source = LabelSource::Original;
    /// When absent the vocabulary is the sorted set of relation ids seen.
    std::optional<RelationVocabulary> vocabulary;
};

Corpus parse_docred(const nlohmann::json& documents, const DocredOptions& options,
                    const std::string& origin = "<json>");
Corpus load_docred_json(const std::filesystem::path& path, const DocredOptions& options = {});

}  // namespace pemscl

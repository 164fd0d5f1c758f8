#pragma once

// Domain types shared by every module: the relation vocabulary, entity-pair
// examples, corpora and frequency bucketing.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace pemscl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RelationIndex = std::size_t;
using EntityId = std::int64_t;

/// Sorted, duplicate-free list of relation indices.
using LabelSet = std::vector<RelationIndex>;

LabelSet make_label_set(std::vector<RelationIndex> labels);
bool is_label_set(const LabelSet& labels);
bool intersects(const LabelSet& a, const LabelSet& b);
/// {0..num_relations-1} minus `positives`.
LabelSet complement(const LabelSet& positives, std::size_t num_relations);

class RelationVocabulary {
public:
    RelationVocabulary() = default;
    explicit RelationVocabulary(std::vector<std::string> relations);

    std::size_t size() const { return relations_.size(); }
    /// Index of the threshold (NA) class; always the last logit.
    RelationIndex na_index() const { return relations_.size(); }
    std::size_t logit_dim() const { return relations_.size() + 1; }

    const std::string& name(RelationIndex index) const;
    std::optional<RelationIndex> find(const std::string& name) const;
    const std::vector<std::string>& relations() const { return relations_; }

    std::size_t frequency(RelationIndex index) const;
    const std::vector<std::size_t>& frequencies() const { return train_frequency_; }
    void set_frequencies(std::vector<std::size_t> counts);

    bool operator==(const RelationVocabulary& other) const = default;

private:
    std::vector<std::string> relations_;
    std::unordered_map<std::string, RelationIndex> lookup_;
    std::vector<std::size_t> train_frequency_;
};

struct Mention {
    EntityId entity_id = 0;
    Vector embedding;
};

struct PairExample {
    std::string doc_id;
    EntityId head_id = 0;
    EntityId tail_id = 0;
    // Surface identifiers used as fact keys for Ign-F1.
    std::string head_name;
    std::string tail_name;
    std::vector<Mention> head_mentions;
    std::vector<Mention> tail_mentions;
    Vector context;
    LabelSet positive_relations;
    std::optional<LabelSet> gold_positive_relations;

    bool is_na() const { return positive_relations.empty(); }
};

enum class LabelSource { Original, Gold, Synthetic };

const char* to_string(LabelSource source);
LabelSource parse_label_source(const std::string& text);

struct Corpus {
    RelationVocabulary vocabulary;
    std::vector<PairExample> examples;
    LabelSource label_source = LabelSource::Synthetic;
    std::size_t embedding_dim = 0;

    /// Throws Shape / InvalidLabel errors when an invariant is broken.
    void validate() const;
};

/// Counts, per relation, the examples labelled with it (observed labels).
std::vector<std::size_t> count_relation_frequencies(const Corpus& corpus);

using PairKey = std::tuple<std::string, EntityId, EntityId>;

std::map<PairKey, std::size_t> build_pair_index(const Corpus& corpus);

enum class Bucket { Head, Mid, Tail };

const char* to_string(Bucket bucket);

struct BucketCuts {
    std::size_t head_count = 10;
    std::size_t tail_count = 20;
};

/// Ranks relations by descending training frequency (ties by ascending index)
/// and assigns the top `head_count` to Head, the bottom `tail_count` to Tail.
std::vector<Bucket> bucket_relations(const RelationVocabulary& vocab, BucketCuts cuts);

}  // namespace pemscl

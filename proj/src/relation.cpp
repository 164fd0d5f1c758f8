#include "pemscl/relation.hpp"

#include <algorithm>
#include <numeric>

#include "pemscl/error.hpp"

namespace pemscl {

LabelSet make_label_set(std::vector<RelationIndex> labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

bool is_label_set(const LabelSet& labels) {
    return std::adjacent_find(labels.begin(), labels.end(),
                              [](RelationIndex a, RelationIndex b) { return a >= b; }) ==
           labels.end();
}

bool intersects(const LabelSet& a, const LabelSet& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

LabelSet complement(const LabelSet& positives, std::size_t num_relations) {
    LabelSet out;
    out.reserve(num_relations - std::min(num_relations, positives.size()));
    auto it = positives.begin();
    for (RelationIndex r = 0; r < num_relations; ++r) {
        while (it != positives.end() && *it < r) ++it;
        if (it != positives.end() && *it == r) continue;
        out.push_back(r);
    }
    return out;
}

RelationVocabulary::RelationVocabulary(std::vector<std::string> relations)
    : relations_(std::move(relations)), train_frequency_(relations_.size(), 0) {
    for (RelationIndex i = 0; i < relations_.size(); ++i) {
        auto [_, inserted] = lookup_.emplace(relations_[i], i);
        require(inserted, ErrorKind::Config, "duplicate relation identifier '" + relations_[i] + "'");
    }
}

const std::string& RelationVocabulary::name(RelationIndex index) const {
    require(index < relations_.size(), ErrorKind::InvalidLabel,
            "relation index " + std::to_string(index) + " out of range");
    return relations_[index];
}

std::optional<RelationIndex> RelationVocabulary::find(const std::string& name) const {
    auto it = lookup_.find(name);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

std::size_t RelationVocabulary::frequency(RelationIndex index) const {
    require(index < relations_.size(), ErrorKind::InvalidLabel,
            "relation index " + std::to_string(index) + " out of range");
    return train_frequency_[index];
}

void RelationVocabulary::set_frequencies(std::vector<std::size_t> counts) {
    require(counts.size() == relations_.size(), ErrorKind::Shape,
            "frequency table has " + std::to_string(counts.size()) + " entries for " +
                std::to_string(relations_.size()) + " relations");
    train_frequency_ = std::move(counts);
}

const char* to_string(LabelSource source) {
    switch (source) {
        case LabelSource::Original: return "Original";
        case LabelSource::Gold: return "Gold";
        case LabelSource::Synthetic: return "Synthetic";
    }
    return "Synthetic";
}

LabelSource parse_label_source(const std::string& text) {
    if (text == "Original") return LabelSource::Original;
    if (text == "Gold") return LabelSource::Gold;
    if (text == "Synthetic") return LabelSource::Synthetic;
    fail(ErrorKind::Parse, "unknown label_source '" + text + "'");
}

namespace {

void check_labels(const LabelSet& labels, std::size_t num_relations, const PairExample& ex,
                  const char* field) {
    require(is_label_set(labels), ErrorKind::InvalidLabel,
            std::string(field) + " of pair (" + ex.doc_id + ", " + std::to_string(ex.head_id) +
                ", " + std::to_string(ex.tail_id) + ") is not sorted and unique");
    for (RelationIndex r : labels) {
        require(r < num_relations, ErrorKind::InvalidLabel,
                std::string(field) + " of pair in doc " + ex.doc_id + " references relation " +
                    std::to_string(r) + " (|R| = " + std::to_string(num_relations) + ")");
    }
}

}  // namespace

void Corpus::validate() const {
    const std::size_t num_relations = vocabulary.size();
    for (const PairExample& ex : examples) {
        require(ex.head_id != ex.tail_id, ErrorKind::Contract,
                "pair in doc " + ex.doc_id + " has head == tail (" + std::to_string(ex.head_id) + ")");
        require(!ex.head_mentions.empty() && !ex.tail_mentions.empty(), ErrorKind::EmptyMentions,
                "pair in doc " + ex.doc_id + " has an entity without mentions");
        for (const auto* mentions : {&ex.head_mentions, &ex.tail_mentions}) {
            for (const Mention& m : *mentions) {
                require(static_cast<std::size_t>(m.embedding.size()) == embedding_dim,
                        ErrorKind::Shape,
                        "mention embedding of dimension " + std::to_string(m.embedding.size()) +
                            " in doc " + ex.doc_id + ", corpus dimension is " +
                            std::to_string(embedding_dim));
            }
        }
        require(static_cast<std::size_t>(ex.context.size()) == embedding_dim, ErrorKind::Shape,
                "context vector dimension mismatch in doc " + ex.doc_id);
        check_labels(ex.positive_relations, num_relations, ex, "positive_relations");
        if (ex.gold_positive_relations) {
            check_labels(*ex.gold_positive_relations, num_relations, ex, "gold_positive_relations");
        }
    }
}

std::vector<std::size_t> count_relation_frequencies(const Corpus& corpus) {
    std::vector<std::size_t> counts(corpus.vocabulary.size(), 0);
    for (const PairExample& ex : corpus.examples) {
        for (RelationIndex r : ex.positive_relations) {
            if (r < counts.size()) ++counts[r];
        }
    }
    return counts;
}

std::map<PairKey, std::size_t> build_pair_index(const Corpus& corpus) {
    std::map<PairKey, std::size_t> index;
    for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
        const PairExample& ex = corpus.examples[i];
        auto [it, inserted] = index.emplace(PairKey{ex.doc_id, ex.head_id, ex.tail_id}, i);
        if (!inserted) {
            fail(ErrorKind::DuplicatePair,
                 "(" + ex.doc_id + ", " + std::to_string(ex.head_id) + ", " +
                     std::to_string(ex.tail_id) + ") appears at examples " +
                     std::to_string(it->second) + " and " + std::to_string(i));
        }
    }
    return index;
}

const char* to_string(Bucket bucket) {
    switch (bucket) {
        case Bucket::Head: return "Head";
        case Bucket::Mid: return "Mid";
        case Bucket::Tail: return "Tail";
    }
    return "Mid";
}

std::vector<Bucket> bucket_relations(const RelationVocabulary& vocab, BucketCuts cuts) {
    const std::size_t n = vocab.size();
    require(cuts.head_count + cuts.tail_count <= n, ErrorKind::InvalidCuts,
            "head_count + tail_count = " + std::to_string(cuts.head_count + cuts.tail_count) +
                " exceeds |R| = " + std::to_string(n));
    std::vector<RelationIndex> order(n);
    std::iota(order.begin(), order.end(), RelationIndex{0});
    std::stable_sort(order.begin(), order.end(), [&](RelationIndex a, RelationIndex b) {
        return vocab.frequency(a) > vocab.frequency(b);
    });
    std::vector<Bucket> buckets(n, Bucket::Mid);
    for (std::size_t rank = 0; rank < n; ++rank) {
        if (rank < cuts.head_count) {
            buckets[order[rank]] = Bucket::Head;
        } else if (rank >= n - cuts.tail_count) {
            buckets[order[rank]] = Bucket::Tail;
        }
    }
    return buckets;
}

}  // namespace pemscl

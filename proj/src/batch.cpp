#include "pemscl/batch.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

#include "pemscl/error.hpp"

namespace pemscl {

Batch make_batch(const Corpus& corpus, std::vector<std::size_t> example_indices) {
    Batch batch;
    batch.example_indices = std::move(example_indices);
    for (std::size_t pos = 0; pos < batch.size(); ++pos) {
        const std::size_t idx = batch.example_indices[pos];
        require(idx < corpus.examples.size(), ErrorKind::Shape,
                "batch references example " + std::to_string(idx) + " of " +
                    std::to_string(corpus.examples.size()));
        if (corpus.examples[idx].is_na()) {
            batch.bn_indices.push_back(pos);
        } else {
            batch.bp_indices.push_back(pos);
        }
    }
    batch.s_sets = compute_positive_sets(batch, corpus);
    return batch;
}

std::vector<Batch> assemble_batches(const Corpus& corpus, std::size_t batch_size,
                                    std::uint64_t rng_seed) {
    require(batch_size >= 2, ErrorKind::Config, "batch_size must be >= 2");
    std::vector<std::string> docs;
    std::unordered_map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
        const std::string& doc = corpus.examples[i].doc_id;
        auto [it, inserted] = members.try_emplace(doc);
        if (inserted) docs.push_back(doc);
        it->second.push_back(i);
    }

    CounterRng rng(rng_seed, 0, "batch-shuffle");
    for (std::size_t i = docs.size(); i > 1; --i) {
        std::swap(docs[i - 1], docs[rng.below(i)]);
    }

    std::vector<Batch> batches;
    for (std::size_t start = 0; start < docs.size(); start += batch_size) {
        std::vector<std::size_t> indices;
        for (std::size_t k = start; k < std::min(docs.size(), start + batch_size); ++k) {
            const auto& m = members[docs[k]];
            indices.insert(indices.end(), m.begin(), m.end());
        }
        batches.push_back(make_batch(corpus, std::move(indices)));
    }
    return batches;
}

std::map<std::size_t, std::vector<std::size_t>> compute_positive_sets(
    std::span<const LabelSet> positives) {
    std::map<std::size_t, std::vector<std::size_t>> s_sets;
    for (std::size_t a = 0; a < positives.size(); ++a) {
        if (positives[a].empty()) continue;
        std::vector<std::size_t>& s = s_sets[a];
        for (std::size_t p = 0; p < positives.size(); ++p) {
            if (p != a && intersects(positives[a], positives[p])) s.push_back(p);
        }
    }
    return s_sets;
}

std::map<std::size_t, std::vector<std::size_t>> compute_positive_sets(const Batch& batch,
                                                                      const Corpus& corpus) {
    std::vector<LabelSet> positives;
    positives.reserve(batch.size());
    for (std::size_t idx : batch.example_indices) {
        positives.push_back(corpus.examples.at(idx).positive_relations);
    }
    return compute_positive_sets(positives);
}

std::size_t negative_sample_size(std::size_t num_negatives, double ratio) {
    require(ratio > 0.0 && ratio <= 1.0, ErrorKind::Config,
            "negative sampling ratio must be in (0, 1], got " + std::to_string(ratio));
    const auto size = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(num_negatives) + 0.5));
    return std::clamp<std::size_t>(size, 1, std::max<std::size_t>(num_negatives, 1));
}

LabelSet sample_negative_labels(const PairExample& anchor, std::size_t num_relations, double ratio,
                                CounterRng& rng) {
    require(anchor.is_na(), ErrorKind::Contract,
            "negative label sampling applies only to NA-labelled pairs (doc " + anchor.doc_id + ")");
    const std::size_t k = negative_sample_size(num_relations, ratio);
    std::vector<RelationIndex> pool(num_relations);
    std::iota(pool.begin(), pool.end(), RelationIndex{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + rng.below(num_relations - i)]);
    }
    pool.resize(k);
    return make_label_set(std::move(pool));
}

const char* to_string(ResampleSchedule schedule) {
    switch (schedule) {
        case ResampleSchedule::Once: return "once";
        case ResampleSchedule::PerEpoch: return "per-epoch";
        case ResampleSchedule::PerStep: return "per-step";
    }
    return "per-epoch";
}

ResampleSchedule parse_resample_schedule(const std::string& text) {
    if (text == "once") return ResampleSchedule::Once;
    if (text == "per-epoch") return ResampleSchedule::PerEpoch;
    if (text == "per-step") return ResampleSchedule::PerStep;
    fail(ErrorKind::Config, "unknown resample schedule '" + text + "' (once|per-epoch|per-step)");
}

void attach_negative_samples(Batch& batch, const Corpus& corpus, double ratio, std::uint64_t seed,
                             std::uint64_t round) {
    const CounterRng root(seed, round, "negative-labels");
    batch.sampled_negatives.clear();
    for (std::size_t pos : batch.bn_indices) {
        const std::size_t idx = batch.example_indices[pos];
        CounterRng rng = root.split(idx);
        batch.sampled_negatives[pos] =
            sample_negative_labels(corpus.examples[idx], corpus.vocabulary.size(), ratio, rng);
    }
}

}  // namespace pemscl

#pragma once

// Batch assembly, in-batch positive sets for the contrastive loss, and
// uniform negative-label sampling for NA-labelled pairs.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pemscl/relation.hpp"
#include "pemscl/rng.hpp"

namespace pemscl {

/// Positions below are indices into `example_indices` (0..|B|-1), not corpus
/// indices.
struct Batch {
    std::vector<std::size_t> example_indices;  // corpus positions
    std::vector<std::size_t> bp_indices;       // positions with >= 1 positive relation
    std::vector<std::size_t> bn_indices;       // positions labelled NA
    std::map<std::size_t, std::vector<std::size_t>> s_sets;
    std::map<std::size_t, LabelSet> sampled_negatives;

    std::size_t size() const { return example_indices.size(); }
};

/// Seeded shuffle of documents (first-appearance order), then consecutive
/// groups of `batch_size` documents; each batch holds every pair of its
/// documents. B_P, B_N and S sets are filled in.
std::vector<Batch> assemble_batches(const Corpus& corpus, std::size_t batch_size,
                                    std::uint64_t rng_seed);

/// Builds a batch from explicit corpus positions (B_P/B_N/S sets filled in).
Batch make_batch(const Corpus& corpus, std::vector<std::size_t> example_indices);

/// S sets over batch positions from per-position positive labels.
std::map<std::size_t, std::vector<std::size_t>> compute_positive_sets(
    std::span<const LabelSet> positives);
std::map<std::size_t, std::vector<std::size_t>> compute_positive_sets(const Batch& batch,
                                                                      const Corpus& corpus);

/// round-half-up(ratio * num_negatives), at least 1.
std::size_t negative_sample_size(std::size_t num_negatives, double ratio);

/// Uniform sample without replacement from R for an NA example, returned
/// sorted. Throws Contract for a non-NA example or a ratio outside (0, 1].
LabelSet sample_negative_labels(const PairExample& anchor, std::size_t num_relations, double ratio,
                                CounterRng& rng);

enum class ResampleSchedule { Once, PerEpoch, PerStep };

const char* to_string(ResampleSchedule schedule);
ResampleSchedule parse_resample_schedule(const std::string& text);

/// Fills `batch.sampled_negatives` for every B_N member. Each example draws
/// from its own stream keyed by (seed, round, corpus index), where `round` is
/// 0, the epoch or the global step depending on the schedule.
void attach_negative_samples(Batch& batch, const Corpus& corpus, double ratio, std::uint64_t seed,
                             std::uint64_t round);

}  // namespace pemscl

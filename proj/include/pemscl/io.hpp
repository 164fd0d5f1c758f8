#pragma once

// On-disk formats.
//
// Corpus (JSON Lines). Line 1 is a header record:
//   {"record":"corpus","format_version":1,"label_source":"Gold","embedding_dim":32,
//    "relations":["R00",...],"train_frequency":[...]}
// Every following line is one example whose keys are the PairExample field
// names: doc_id, head_id, tail_id, head_name, tail_name, head_mentions,
// tail_mentions (arrays of {"entity_id","embedding"}), context,
// positive_relations, gold_positive_relations (array or null).
//
// Head checkpoint (single JSON document):
//   {"format":"pemscl-head-checkpoint","format_version":1,"group_count":P,
//    "tensors":{"W_h":{"rows":r,"cols":c,"data":[row-major decimals]},...}}
// Decimals are written in shortest round-trip form, so load(save(p)) == p.

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "pemscl/head.hpp"
#include "pemscl/relation.hpp"

namespace pemscl {

inline constexpr int kCorpusFormatVersion = 1;
inline constexpr int kCheckpointFormatVersion = 1;

nlohmann::json example_to_json(const PairExample& example);
PairExample example_from_json(const nlohmann::json& record);

void write_corpus(const Corpus& corpus, std::ostream& out);
Corpus read_corpus(std::istream& in, const std::string& origin = "<stream>");
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

nlohmann::json checkpoint_to_json(const HeadParams& params);
HeadParams checkpoint_from_json(const nlohmann::json& doc);
void save_checkpoint(const HeadParams& params, const std::filesystem::path& path);
HeadParams load_checkpoint(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories; throws Io.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace pemscl

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <set>

#include "pemscl/data.hpp"
#include "pemscl/error.hpp"
#include "pemscl/io.hpp"

namespace pemscl {

using nlohmann::json;

Vector hash_tokens(const std::vector<std::string>& tokens, std::size_t dim) {
    require(dim >= 8, ErrorKind::Config, "hashed features need dim >= 8");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    auto add = [&](std::string_view feature) {
        const std::uint64_t h = hash_tag(feature);
        const auto bucket = static_cast<Eigen::Index>(h % dim);
        v[bucket] += (mix64(h) >> 63) ? -1.0 : 1.0;
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        add("u:" + tokens[i]);
        if (i + 1 < tokens.size()) add("b:" + tokens[i] + " " + tokens[i + 1]);
    }
    const double n = v.norm();
    if (n > 0.0) v /= n;
    return v;
}

FeaturizedPair hashed_featurizer(const std::vector<std::string>& mention_tokens,
                                 const std::vector<std::string>& window_tokens, std::size_t dim) {
    return {hash_tokens(mention_tokens, dim), hash_tokens(window_tokens, dim)};
}

namespace {

struct DocMention {
    std::size_t start = 0;  // document-level token offsets
    std::size_t end = 0;
    std::vector<std::string> tokens;
};

[[noreturn]] void bad(const std::string& origin, const std::string& doc, const std::string& what) {
    fail(ErrorKind::Parse, origin + ": document '" + doc + "': " + what);
}

const json& need(const json& j, const char* key, const std::string& origin, const std::string& doc) {
    auto it = j.find(key);
    if (it == j.end()) bad(origin, doc, std::string("missing field '") + key + "'");
    return *it;
}

}  // namespace

Corpus parse_docred(const json& documents, const DocredOptions& options, const std::string& origin) {
    if (!documents.is_array()) fail(ErrorKind::Parse, origin + ": expected a JSON array of documents");

    RelationVocabulary vocab;
    if (options.vocabulary) {
        vocab = *options.vocabulary;
    } else {
        std::set<std::string> seen;
        for (const json& doc : documents) {
            if (!doc.contains("labels")) continue;
            for (const json& label : doc["labels"]) {
                if (label.contains("r") && label["r"].is_string()) seen.insert(label["r"].get<std::string>());
            }
        }
        vocab = RelationVocabulary(std::vector<std::string>(seen.begin(), seen.end()));
    }

    Corpus corpus;
    corpus.vocabulary = vocab;
    corpus.label_source = options.label_source;
    corpus.embedding_dim = options.embedding_dim;
    EntityId next_entity = 0;

    for (std::size_t d = 0; d < documents.size(); ++d) {
        const json& doc = documents[d];
        std::string title = "#" + std::to_string(d);
        try {
            title = need(doc, "title", origin, title).get<std::string>();
            const json& sents = need(doc, "sents", origin, title);
            std::vector<std::string> tokens;
            std::vector<std::size_t> sent_offset;
            for (const json& sent : sents) {
                sent_offset.push_back(tokens.size());
                for (const json& tok : sent) tokens.push_back(tok.get<std::string>());
            }

            const json& vertex_set = need(doc, "vertexSet", origin, title);
            std::vector<std::vector<DocMention>> entities;
            std::vector<std::string> names;
            std::vector<EntityId> ids;
            for (std::size_t e = 0; e < vertex_set.size(); ++e) {
                std::vector<DocMention> mentions;
                for (const json& m : vertex_set[e]) {
                    const auto sent_id = need(m, "sent_id", origin, title).get<std::size_t>();
                    const json& pos = need(m, "pos", origin, title);
                    if (sent_id >= sent_offset.size() || !pos.is_array() || pos.size() != 2) {
                        bad(origin, title, "vertexSet[" + std::to_string(e) + "] has an invalid mention position");
                    }
                    DocMention dm;
                    dm.start = sent_offset[sent_id] + pos[0].get<std::size_t>();
                    dm.end = sent_offset[sent_id] + pos[1].get<std::size_t>();
                    if (dm.end > tokens.size() || dm.start >= dm.end) {
                        bad(origin, title, "vertexSet[" + std::to_string(e) + "] mention span out of range");
                    }
                    dm.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(dm.start),
                                     tokens.begin() + static_cast<std::ptrdiff_t>(dm.end));
                    mentions.push_back(std::move(dm));
                }
                if (mentions.empty()) bad(origin, title, "vertexSet[" + std::to_string(e) + "] has no mentions");
                names.push_back(vertex_set[e][0].value("name", "entity" + std::to_string(e)));
                ids.push_back(next_entity++);
                entities.push_back(std::move(mentions));
            }

            std::map<std::pair<std::size_t, std::size_t>, std::vector<RelationIndex>> labels;
            if (doc.contains("labels")) {
                for (const json& label : doc["labels"]) {
                    const auto h = need(label, "h", origin, title).get<std::size_t>();
                    const auto t = need(label, "t", origin, title).get<std::size_t>();
                    const auto r = need(label, "r", origin, title).get<std::string>();
                    if (h >= entities.size() || t >= entities.size()) {
                        bad(origin, title, "label references entity outside vertexSet");
                    }
                    auto idx = vocab.find(r);
                    if (!idx) bad(origin, title, "label relation '" + r + "' not in the vocabulary");
                    labels[{h, t}].push_back(*idx);
                }
            }

            std::vector<std::vector<Mention>> mention_vectors(entities.size());
            for (std::size_t e = 0; e < entities.size(); ++e) {
                for (const DocMention& m : entities[e]) {
                    mention_vectors[e].push_back(
                        {ids[e], hash_tokens(m.tokens, options.embedding_dim)});
                }
            }

            for (std::size_t h = 0; h < entities.size(); ++h) {
                for (std::size_t t = 0; t < entities.size(); ++t) {
                    if (h == t) continue;
                    // Context window around the closest pair of mentions.
                    std::size_t best_gap = std::numeric_limits<std::size_t>::max();
                    std::size_t lo = 0, hi = 0;
                    for (const DocMention& a : entities[h]) {
                        for (const DocMention& b : entities[t]) {
                            const std::size_t gap = a.start > b.start ? a.start - b.start : b.start - a.start;
                            if (gap < best_gap) {
                                best_gap = gap;
                                lo = std::min(a.start, b.start);
                                hi = std::max(a.end, b.end);
                            }
                        }
                    }
                    lo = lo > options.context_margin ? lo - options.context_margin : 0;
                    hi = std::min(tokens.size(), hi + options.context_margin);
                    std::vector<std::string> window(tokens.begin() + static_cast<std::ptrdiff_t>(lo),
                                                    tokens.begin() + static_cast<std::ptrdiff_t>(hi));
                    if (window.size() > options.max_context_tokens) {
                        const std::size_t half = options.max_context_tokens / 2;
                        window.erase(window.begin() + static_cast<std::ptrdiff_t>(half),
                                     window.end() - static_cast<std::ptrdiff_t>(options.max_context_tokens - half));
                    }

                    PairExample ex;
                    ex.doc_id = title;
                    ex.head_id = ids[h];
                    ex.tail_id = ids[t];
                    ex.head_name = names[h];
                    ex.tail_name = names[t];
                    ex.head_mentions = mention_vectors[h];
                    ex.tail_mentions = mention_vectors[t];
                    ex.context = hash_tokens(window, options.embedding_dim);
                    auto it = labels.find({h, t});
                    if (it != labels.end()) ex.positive_relations = make_label_set(it->second);
                    if (options.label_source == LabelSource::Gold) {
                        ex.gold_positive_relations = ex.positive_relations;
                    }
                    corpus.examples.push_back(std::move(ex));
                }
            }
        } catch (const json::exception& e) {
            bad(origin, title, e.what());
        }
    }
    corpus.validate();
    return corpus;
}

Corpus load_docred_json(const std::filesystem::path& path, const DocredOptions& options) {
    json documents;
    try {
        documents = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    return parse_docred(documents, options, path.string());
}

}  // namespace pemscl

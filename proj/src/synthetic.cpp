#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "pemscl/data.hpp"
#include "pemscl/error.hpp"

namespace pemscl {

void SyntheticConfig::validate() const {
    require(num_relations >= 3, ErrorKind::Config, "data.num_relations must be >= 3");
    require(min_pairs_per_document >= 1 && min_pairs_per_document <= max_pairs_per_document,
            ErrorKind::Config, "data.min_pairs_per_document must be in [1, max_pairs_per_document]");
    require(zipf_exponent >= 0.0, ErrorKind::Config, "data.zipf_exponent must be >= 0");
    require(multi_label_rate >= 0.0 && multi_label_rate <= 1.0, ErrorKind::Config,
            "data.multi_label_rate must be in [0, 1]");
    require(embedding_dim >= 1, ErrorKind::Config, "data.embedding_dim must be >= 1");
    require(prototype_noise_sigma >= 0.0, ErrorKind::Config,
            "data.prototype_noise_sigma must be >= 0");
    require(false_negative_rate >= 0.0 && false_negative_rate < 1.0, ErrorKind::Config,
            "data.false_negative_rate must be in [0, 1)");
    require(na_fraction >= 0.0 && na_fraction < 1.0, ErrorKind::Config,
            "data.na_fraction must be in [0, 1)");
    require(entity_pool_size >= 2, ErrorKind::Config, "data.entity_pool_size must be >= 2");
}

nlohmann::json to_json(const SyntheticConfig& c) {
    return {{"num_relations", c.num_relations},
            {"train_documents", c.train_documents},
            {"dev_documents", c.dev_documents},
            {"test_documents", c.test_documents},
            {"min_pairs_per_document", c.min_pairs_per_document},
            {"max_pairs_per_document", c.max_pairs_per_document},
            {"zipf_exponent", c.zipf_exponent},
            {"multi_label_rate", c.multi_label_rate},
            {"embedding_dim", c.embedding_dim},
            {"prototype_noise_sigma", c.prototype_noise_sigma},
            {"false_negative_rate", c.false_negative_rate},
            {"na_fraction", c.na_fraction},
            {"entity_pool_size", c.entity_pool_size},
            {"seed", c.seed}};
}

namespace {

struct Prototypes {
    std::vector<Vector> head;
    std::vector<Vector> tail;
    std::vector<Vector> context;
};

Vector random_unit(CounterRng& rng, std::size_t dim) {
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    const double n = v.norm();
    return n > 0.0 ? Vector(v / n) : v;
}

Prototypes make_prototypes(const SyntheticConfig& c) {
    Prototypes p;
    CounterRng rng(c.seed, 0, "relation-prototypes");
    for (std::size_t r = 0; r < c.num_relations; ++r) {
        p.head.push_back(random_unit(rng, c.embedding_dim));
        p.tail.push_back(random_unit(rng, c.embedding_dim));
        p.context.push_back(random_unit(rng, c.embedding_dim));
    }
    return p;
}

class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double exponent) : cdf_(n) {
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            total += std::pow(static_cast<double>(k + 1), -exponent);
            cdf_[k] = total;
        }
        for (double& v : cdf_) v /= total;
    }

    std::size_t operator()(CounterRng& rng) const {
        const double u = rng.uniform();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }

private:
    std::vector<double> cdf_;
};

Vector noisy(const Vector& signal, double sigma, CounterRng& rng) {
    Vector v = signal;
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += sigma * rng.normal();
    return v;
}

std::vector<Mention> make_mentions(EntityId id, const Vector& signal, double sigma, CounterRng& rng) {
    const std::size_t count = 1 + rng.below(3);
    std::vector<Mention> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back({id, noisy(signal, sigma, rng)});
    return out;
}

Vector mean_of(const std::vector<Vector>& table, const LabelSet& labels) {
    Vector v = Vector::Zero(table.front().size());
    for (RelationIndex r : labels) v += table[r];
    return v / static_cast<double>(labels.size());
}

std::string entity_name(EntityId id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "E%05lld", static_cast<long long>(id));
    return buf;
}

std::vector<std::string> relation_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t r = 0; r < n; ++r) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "R%02zu", r);
        names.emplace_back(buf);
    }
    return names;
}

std::size_t documents_for(const SyntheticConfig& c, std::string_view split) {
    if (split == "train") return c.train_documents;
    if (split == "dev") return c.dev_documents;
    if (split == "test") return c.test_documents;
    fail(ErrorKind::Config, "unknown split '" + std::string(split) + "'");
}

}  // namespace

Corpus generate_synthetic_corpus(const SyntheticConfig& c, std::string_view split) {
    c.validate();
    const std::size_t num_docs = documents_for(c, split);
    const Prototypes protos = make_prototypes(c);
    const ZipfSampler zipf(c.num_relations, c.zipf_exponent);
    const double sigma = c.prototype_noise_sigma;
    const CounterRng split_root(c.seed, hash_tag(split), "synthetic-split");

    Corpus corpus;
    corpus.vocabulary = RelationVocabulary(relation_names(c.num_relations));
    corpus.label_source = LabelSource::Gold;
    corpus.embedding_dim = c.embedding_dim;

    for (std::size_t doc = 0; doc < num_docs; ++doc) {
        CounterRng rng = split_root.split(doc, "document");
        char doc_id[64];
        std::snprintf(doc_id, sizeof doc_id, "%s-%05zu", std::string(split).c_str(), doc);
        const std::size_t num_pairs =
            c.min_pairs_per_document + rng.below(c.max_pairs_per_document - c.min_pairs_per_document + 1);
        std::vector<std::pair<EntityId, EntityId>> used;
        for (std::size_t k = 0; k < num_pairs; ++k) {
            PairExample ex;
            ex.doc_id = doc_id;
            do {
                ex.head_id = static_cast<EntityId>(rng.below(c.entity_pool_size));
                ex.tail_id = static_cast<EntityId>(rng.below(c.entity_pool_size));
            } while (ex.head_id == ex.tail_id ||
                     std::find(used.begin(), used.end(), std::pair{ex.head_id, ex.tail_id}) != used.end());
            used.emplace_back(ex.head_id, ex.tail_id);
            ex.head_name = entity_name(ex.head_id);
            ex.tail_name = entity_name(ex.tail_id);

            Vector head_signal, tail_signal, context_signal;
            if (rng.bernoulli(c.na_fraction)) {
                // Background pair: isotropic directions with the same norm as a prototype.
                head_signal = random_unit(rng, c.embedding_dim);
                tail_signal = random_unit(rng, c.embedding_dim);
                context_signal = random_unit(rng, c.embedding_dim);
            } else {
                std::vector<RelationIndex> labels{zipf(rng)};
                if (rng.bernoulli(c.multi_label_rate)) {
                    std::size_t second;
                    do {
                        second = zipf(rng);
                    } while (second == labels.front());
                    labels.push_back(second);
                }
                ex.positive_relations = make_label_set(std::move(labels));
                head_signal = mean_of(protos.head, ex.positive_relations);
                tail_signal = mean_of(protos.tail, ex.positive_relations);
                context_signal = mean_of(protos.context, ex.positive_relations);
            }
            ex.head_mentions = make_mentions(ex.head_id, head_signal, sigma, rng);
            ex.tail_mentions = make_mentions(ex.tail_id, tail_signal, sigma, rng);
            ex.context = noisy(context_signal, sigma, rng);
            ex.gold_positive_relations = ex.positive_relations;
            corpus.examples.push_back(std::move(ex));
        }
    }
    corpus.vocabulary.set_frequencies(count_relation_frequencies(corpus));
    return corpus;
}

GoldSplits generate_synthetic_splits(const SyntheticConfig& c) {
    GoldSplits s{generate_synthetic_corpus(c, "train"), generate_synthetic_corpus(c, "dev"),
                 generate_synthetic_corpus(c, "test")};
    const auto freq = count_relation_frequencies(s.train);
    s.train.vocabulary.set_frequencies(freq);
    s.dev.vocabulary.set_frequencies(freq);
    s.test.vocabulary.set_frequencies(freq);
    return s;
}

double top_relation_share(const Corpus& corpus, std::size_t top) {
    std::vector<std::size_t> counts = count_relation_frequencies(corpus);
    std::sort(counts.begin(), counts.end(), std::greater<>());
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    if (total == 0.0) return 0.0;
    const std::size_t k = std::min(top, counts.size());
    const double head = static_cast<double>(std::accumulate(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(k), std::size_t{0}));
    return head / total;
}

}  // namespace pemscl

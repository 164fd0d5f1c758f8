#include <doctest.h>

#include <filesystem>

#include "pemscl/data.hpp"
#include "pemscl/error.hpp"
#include "pemscl/io.hpp"
#include "support.hpp"

using namespace pemscl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pemscl-test-" + name);
    fs::remove_all(p);
    return p;
}

bool same_corpus(const Corpus& a, const Corpus& b) {
    if (a.examples.size() != b.examples.size() || !(a.vocabulary.relations() == b.vocabulary.relations())) return false;
    for (std::size_t i = 0; i < a.examples.size(); ++i) {
        const PairExample& x = a.examples[i];
        const PairExample& y = b.examples[i];
        if (x.doc_id != y.doc_id || x.head_id != y.head_id || x.tail_id != y.tail_id ||
            x.positive_relations != y.positive_relations || x.gold_positive_relations != y.gold_positive_relations ||
            x.context != y.context || x.head_mentions.size() != y.head_mentions.size()) {
            return false;
        }
        for (std::size_t m = 0; m < x.head_mentions.size(); ++m) {
            if (x.head_mentions[m].embedding != y.head_mentions[m].embedding) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("synthetic generation is deterministic and valid") {
    const GoldSplits a = generate_synthetic_splits(test::tiny_data(4));
    const GoldSplits b = generate_synthetic_splits(test::tiny_data(4));
    CHECK(same_corpus(a.train, b.train));
    CHECK(same_corpus(a.test, b.test));
    CHECK_NOTHROW(a.train.validate());
    CHECK_NOTHROW(build_pair_index(a.train));
    CHECK(a.train.vocabulary.size() == 8);
    CHECK(a.train.embedding_dim == 8);
    std::size_t na = 0;
    for (const PairExample& ex : a.train.examples) na += ex.is_na() ? 1 : 0;
    CHECK(na > 0);
    CHECK(na < a.train.examples.size());
}

TEST_CASE("zipf exponent controls the head share") {
    SyntheticConfig c;
    c.num_relations = 96;
    c.train_documents = 300;
    c.seed = 2;
    const double share = top_relation_share(generate_synthetic_corpus(c, "train"));
    CHECK(share > 0.5);
    CHECK(share < 0.7);
    c.zipf_exponent = 0.3;
    CHECK(top_relation_share(generate_synthetic_corpus(c, "train")) < share);
}

TEST_CASE("config validation") {
    SyntheticConfig c = test::tiny_data();
    c.min_pairs_per_document = 9;
    CHECK_THROWS_AS(c.validate(), Error);
    c = test::tiny_data();
    c.false_negative_rate = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("false negatives only remove labels") {
    const Corpus gold = generate_synthetic_corpus(test::tiny_data(), "train");
    CounterRng rng(3);
    const CorruptionResult r = inject_false_negatives(gold, 0.5, rng);
    CHECK(r.corpus.label_source == LabelSource::Original);
    std::size_t cleared = 0;
    for (std::size_t i = 0; i < gold.examples.size(); ++i) {
        const PairExample& ex = r.corpus.examples[i];
        REQUIRE(ex.gold_positive_relations.has_value());
        CHECK(*ex.gold_positive_relations == gold.examples[i].positive_relations);
        CHECK((ex.positive_relations.empty() || ex.positive_relations == gold.examples[i].positive_relations));
        if (ex.positive_relations.empty() && !gold.examples[i].is_na()) ++cleared;
    }
    CHECK(cleared == r.corrupted);
    CHECK(r.corrupted > 0);
    CHECK(r.corrupted < r.positives_before);
    CounterRng rng2(3);
    CHECK_THROWS_AS(inject_false_negatives(gold, 1.0, rng2), Error);
}

TEST_CASE("regimes corrupt only the O splits") {
    const GoldSplits gold = generate_synthetic_splits(test::tiny_data());
    const Regime oog = assemble_regime(gold, 0.4, "OOG", 8);
    CHECK(oog.kind == RegimeKind::OOG);
    CHECK(oog.train.label_source == LabelSource::Original);
    CHECK(oog.dev.label_source == LabelSource::Original);
    CHECK(oog.test.label_source == LabelSource::Gold);
    CHECK(oog.corrupted_train > 0);
    CHECK(oog.corrupted_test == 0);
    CHECK(assemble_regime(gold, 0.4, "OGG", 8).corrupted_dev == 0);
    CHECK(assemble_regime(gold, 0.4, "GOG", 8).kind == RegimeKind::Custom);
    CHECK_THROWS_AS(assemble_regime(gold, 0.4, "XYZ", 8), Error);
    CHECK(oog.train.vocabulary.frequencies() == count_relation_frequencies(oog.train));
}

TEST_CASE("regime bundles round-trip through disk") {
    const fs::path dir = scratch("regime");
    const Regime r = assemble_regime(generate_synthetic_splits(test::tiny_data()), 0.3, "OOG", 2);
    save_regime(r, dir);
    const Regime back = load_regime(dir);
    CHECK(back.pattern == "OOG");
    CHECK(back.noise_rate == 0.3);
    CHECK(back.corrupted_train == r.corrupted_train);
    CHECK(same_corpus(back.train, r.train));
    CHECK(same_corpus(back.dev, r.dev));
    CHECK(back.dev.label_source == LabelSource::Original);
    CHECK(back.test.label_source == LabelSource::Gold);
    fs::remove_all(dir);
    CHECK_THROWS_AS(load_regime(dir), Error);
}

TEST_CASE("malformed corpus files report parse errors") {
    const fs::path dir = scratch("bad");
    write_text_file(dir / "bad.jsonl", "{not json\n");
    try {
        load_corpus(dir / "bad.jsonl");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }
    fs::remove_all(dir);
}

TEST_CASE("docred-format ingestion") {
    const nlohmann::json docs = nlohmann::json::parse(R"([{
        "title": "Doc",
        "sents": [["Alice", "lives", "in", "Paris", "."], ["She", "works", "for", "Acme", "."]],
        "vertexSet": [[{"name": "Alice", "sent_id": 0, "pos": [0, 1]}],
                      [{"name": "Paris", "sent_id": 0, "pos": [3, 4]}],
                      [{"name": "Acme", "sent_id": 1, "pos": [3, 4]}]],
        "labels": [{"h": 0, "t": 1, "r": "P551"}, {"h": 0, "t": 2, "r": "P108"}]
    }])");
    DocredOptions opts;
    opts.embedding_dim = 16;
    const Corpus c = parse_docred(docs, opts);
    CHECK(c.vocabulary.size() == 2);
    CHECK(c.examples.size() == 6);
    CHECK(c.label_source == LabelSource::Original);
    CHECK_NOTHROW(c.validate());
    std::size_t positive = 0;
    for (const PairExample& ex : c.examples) positive += ex.is_na() ? 0 : 1;
    CHECK(positive == 2);

    nlohmann::json broken = docs;
    broken[0]["labels"][0]["r"] = "P999";
    opts.vocabulary = c.vocabulary;
    CHECK_THROWS_AS(parse_docred(broken, opts), Error);
    CHECK_THROWS_AS(parse_docred(nlohmann::json::object(), opts), Error);
}

TEST_CASE("hashed features are deterministic unit vectors") {
    const Vector a = hash_tokens({"alpha", "beta"}, 32);
    CHECK(a == hash_tokens({"alpha", "beta"}, 32));
    CHECK(a.size() == 32);
    CHECK(a != hash_tokens({"gamma"}, 32));
}

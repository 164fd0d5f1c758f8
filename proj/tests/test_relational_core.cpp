#include <doctest.h>

#include "pemscl/error.hpp"
#include "pemscl/relation.hpp"
#include "pemscl/rng.hpp"
#include "support.hpp"

using namespace pemscl;

namespace {

PairExample pair(const std::string& doc, EntityId h, EntityId t, LabelSet labels, std::size_t dim = 2) {
    PairExample ex;
    ex.doc_id = doc;
    ex.head_id = h;
    ex.tail_id = t;
    ex.head_name = "E" + std::to_string(h);
    ex.tail_name = "E" + std::to_string(t);
    ex.head_mentions = {{h, Vector::Zero(static_cast<Eigen::Index>(dim))}};
    ex.tail_mentions = {{t, Vector::Zero(static_cast<Eigen::Index>(dim))}};
    ex.context = Vector::Zero(static_cast<Eigen::Index>(dim));
    ex.positive_relations = std::move(labels);
    return ex;
}

}  // namespace

TEST_CASE("label sets are sorted and unique") {
    CHECK(make_label_set({3, 1, 3, 0}) == LabelSet{0, 1, 3});
    CHECK(is_label_set({0, 2, 5}));
    CHECK_FALSE(is_label_set({2, 2}));
    CHECK(intersects({1, 4}, {0, 4}));
    CHECK_FALSE(intersects({1, 4}, {0, 2}));
    CHECK(complement({1, 3}, 5) == LabelSet{0, 2, 4});
    CHECK(complement({}, 3) == LabelSet{0, 1, 2});
}

TEST_CASE("vocabulary puts the threshold class last") {
    RelationVocabulary v({"P17", "P131", "P27"});
    CHECK(v.size() == 3);
    CHECK(v.na_index() == 3);
    CHECK(v.logit_dim() == 4);
    CHECK(v.find("P131") == RelationIndex{1});
    CHECK_FALSE(v.find("missing").has_value());
    CHECK_THROWS_AS(RelationVocabulary({"a", "a"}), Error);
    CHECK_THROWS_AS(v.set_frequencies({1, 2}), Error);
}

TEST_CASE("corpus validation catches broken examples") {
    Corpus c;
    c.vocabulary = RelationVocabulary({"r0", "r1"});
    c.embedding_dim = 2;
    c.examples.push_back(pair("d", 1, 2, {0}));
    CHECK_NOTHROW(c.validate());

    SUBCASE("out of range label") {
        c.examples[0].positive_relations = {2};
        CHECK_THROWS_AS(c.validate(), Error);
    }
    SUBCASE("missing mentions") {
        c.examples[0].head_mentions.clear();
        try {
            c.validate();
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::EmptyMentions);
        }
    }
    SUBCASE("dimension mismatch") {
        c.examples[0].context = Vector::Zero(3);
        CHECK_THROWS_AS(c.validate(), Error);
    }
}

TEST_CASE("duplicate pairs are rejected by the pair index") {
    Corpus c;
    c.vocabulary = RelationVocabulary({"r0"});
    c.embedding_dim = 2;
    c.examples = {pair("d", 1, 2, {}), pair("d", 2, 1, {}), pair("d", 1, 2, {0})};
    try {
        build_pair_index(c);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DuplicatePair);
    }
    c.examples.pop_back();
    CHECK(build_pair_index(c).size() == 2);
}

TEST_CASE("bucket cuts rank by training frequency") {
    RelationVocabulary v({"a", "b", "c", "d", "e"});
    v.set_frequencies({5, 50, 1, 20, 1});
    const auto b = bucket_relations(v, {2, 2});
    CHECK(b[1] == Bucket::Head);
    CHECK(b[3] == Bucket::Head);
    CHECK(b[0] == Bucket::Mid);
    CHECK(b[2] == Bucket::Tail);
    CHECK(b[4] == Bucket::Tail);
    try {
        bucket_relations(v, {3, 3});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidCuts);
    }
}

TEST_CASE("counter rng streams are reproducible and independent") {
    CounterRng a(42, 0, "x"), b(42, 0, "x"), c(42, 1, "x");
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
    CounterRng a2(42, 0, "x");
    CHECK(a2() != c());
    CounterRng u(7);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        CHECK(u.below(5) < 5);
    }
}

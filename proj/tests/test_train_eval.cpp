#include <doctest.h>

#include <cmath>

#include "pemscl/data.hpp"
#include "pemscl/error.hpp"
#include "pemscl/experiments.hpp"
#include "pemscl/metrics.hpp"
#include "pemscl/train.hpp"
#include "support.hpp"

using namespace pemscl;
using pemscl::test::vec;

namespace {

PairExample named(const std::string& h, const std::string& t, LabelSet observed, LabelSet gold) {
    PairExample ex;
    ex.doc_id = "d";
    ex.head_name = h;
    ex.tail_name = t;
    ex.positive_relations = std::move(observed);
    ex.gold_positive_relations = std::move(gold);
    return ex;
}

}  // namespace

TEST_CASE("threshold prediction") {
    const double eta = 0.7;
    CHECK(predict_labels(vec({eta + 1, eta - 1, eta + 0.5, eta})) == LabelSet{0, 2});
    CHECK(predict_labels(vec({0.0, 0.0})).empty());
    CHECK(predict_labels(vec({1.0, 2.0, 3.0})).empty());
    // Shift invariance.
    CHECK(predict_labels(vec({5.0, 3.0, 4.0})) == predict_labels(vec({105.0, 103.0, 104.0})));
}

TEST_CASE("precision recall f1") {
    const Prf p = prf_from_counts(3, 1, 2);
    CHECK(p.precision == doctest::Approx(0.75));
    CHECK(p.recall == doctest::Approx(0.6));
    CHECK(p.f1 == doctest::Approx(2 * 0.75 * 0.6 / 1.35));
    const Prf z = prf_from_counts(0, 0, 0);
    CHECK(z.precision == 0.0);
    CHECK(z.recall == 0.0);
    CHECK(z.f1 == 0.0);
}

TEST_CASE("scoring against views, buckets and training facts") {
    Corpus c;
    c.vocabulary = RelationVocabulary({"r0", "r1", "r2"});
    c.label_source = LabelSource::Original;
    c.examples = {named("A", "B", {0}, {0, 1}), named("A", "C", {}, {2}), named("B", "C", {}, {})};
    const std::vector<LabelSet> pred{{0, 1}, {2}, {1}};
    FactSet train{{"A", 0, "B"}, {"B", 1, "C"}};
    const std::vector<Bucket> buckets{Bucket::Head, Bucket::Mid, Bucket::Tail};

    CHECK(default_label_view(c) == LabelView::Observed);
    const EvalReport gold = score_predictions(c, pred, train, buckets, LabelView::Gold);
    CHECK(gold.true_positive_count == 3);
    CHECK(gold.predicted_triple_count == 4);
    CHECK(gold.gold_triple_count == 3);
    CHECK(gold.precision == doctest::Approx(0.75));
    CHECK(gold.recall == doctest::Approx(1.0));
    // Excluded: (A,r0,B) correct and (B,r1,C) wrong, leaving 2 of 2 correct.
    CHECK(gold.excluded_prediction_count == 2);
    CHECK(gold.ign_f1 == doctest::Approx(2 * 1.0 * (2.0 / 3) / (1.0 + 2.0 / 3)));
    CHECK(gold.bucket(Bucket::Head) == doctest::Approx(1.0));
    CHECK(gold.bucket(Bucket::Tail) == doctest::Approx(1.0));
    CHECK(gold.bucket(Bucket::Mid) == doctest::Approx(2.0 / 3));

    const EvalReport observed = score_predictions(c, pred, {}, buckets, LabelView::Observed);
    CHECK(observed.true_positive_count == 1);
    CHECK(observed.gold_triple_count == 1);
    CHECK(observed.ign_f1 == observed.f1);

    std::size_t tp = 0, fp = 0, fn = 0;
    for (const Counts& k : gold.per_relation) {
        tp += k.tp;
        fp += k.fp;
        fn += k.fn;
    }
    CHECK(tp == gold.true_positive_count);
    CHECK(tp + fp == gold.predicted_triple_count);
    CHECK(tp + fn == gold.gold_triple_count);

    CHECK_THROWS_AS(score_predictions(c, std::vector<LabelSet>{{0}}, {}, buckets, LabelView::Gold), Error);
}

TEST_CASE("learning rate schedule") {
    TrainConfig t;
    t.learning_rate = 0.1;
    t.warmup_ratio = 0.1;
    CHECK(learning_rate_at(t, 0, 100) == doctest::Approx(0.01));
    CHECK(learning_rate_at(t, 4, 100) == doctest::Approx(0.05));
    CHECK(learning_rate_at(t, 50, 100) == doctest::Approx(0.1));
    t.warmup_ratio = 0.0;
    CHECK(learning_rate_at(t, 0, 100) == doctest::Approx(0.1));
}

TEST_CASE("AdamW leaves the output bias undecayed") {
    HeadParams p = HeadParams::initialize(2, 2, 1, 3, 5);
    p.b_o.setConstant(1.0);
    AdamWConfig cfg;
    cfg.weight_decay = 0.5;
    AdamW opt(p, cfg);
    const HeadParams before = p;
    HeadGradients zero = HeadParams::zeros(2, 2, 1, 3);
    opt.step(p, zero, 0.1);
    CHECK(opt.steps() == 1);
    CHECK(p.b_o == before.b_o);
    CHECK(p.w_o.isApprox(before.w_o * (1.0 - 0.1 * 0.5)));
}

TEST_CASE("training is deterministic and keeps the best dev epoch") {
    const Regime r = assemble_regime(generate_synthetic_splits(test::tiny_data()), 0.0, "GGG", 1);
    const TrainConfig cfg = test::tiny_train();
    const TrainResult a = train(r.train, &r.dev, cfg);
    const TrainResult b = train(r.train, &r.dev, cfg);
    CHECK(a.params == b.params);
    REQUIRE(a.history.size() == 3);
    REQUIRE(a.best_epoch.has_value());
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t e = 0; e < a.history.size(); ++e) {
        REQUIRE(a.history[e].dev.has_value());
        if (a.history[e].dev->f1 > best) {
            best = a.history[e].dev->f1;
            arg = e;
        }
    }
    CHECK(*a.best_epoch == arg);
    const EvalReport dev = evaluate(a.params, r.dev, {}, {}, LabelView::Gold);
    CHECK(dev.f1 == doctest::Approx(best).epsilon(1e-15));
    for (const EpochRecord& e : a.history) CHECK(std::isfinite(e.total));

    TrainConfig other = cfg;
    other.seed = cfg.seed + 1;
    CHECK_FALSE(train(r.train, &r.dev, other).params == a.params);
}

TEST_CASE("train config validation") {
    TrainConfig t = test::tiny_train();
    t.loss.tau = 0.0;
    CHECK_THROWS_AS(t.validate(), Error);
    t = test::tiny_train();
    t.model.group_count = 3;
    CHECK_THROWS_AS(t.validate(), Error);
    t = test::tiny_train();
    t.loss.neg_sampling_ratio = 0.0;
    CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("ablation produces four variants") {
    const Regime r = assemble_regime(generate_synthetic_splits(test::tiny_data()), 0.0, "GGG", 1);
    TrainConfig cfg = test::tiny_train();
    cfg.epochs = 1;
    const auto rows = run_ablation(r, cfg, {AblationToggle::Em, AblationToggle::Scl}, {1, 2}, {2, 2});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].variant == "full");
    CHECK(rows[3].variant == "-both");
    for (const AblationRow& row : rows) CHECK(row.per_seed.size() == 2);
    const MeanMetrics m = mean_of(rows[0].per_seed);
    CHECK(m.f1 == doctest::Approx((rows[0].per_seed[0].f1 + rows[0].per_seed[1].f1) / 2));
}

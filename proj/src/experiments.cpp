#include "pemscl/experiments.hpp"

#include "pemscl/error.hpp"

namespace pemscl {

MeanMetrics mean_of(std::span<const EvalReport> reports) {
    MeanMetrics m;
    if (reports.empty()) return m;
    for (const EvalReport& r : reports) {
        m.precision += r.precision;
        m.recall += r.recall;
        m.f1 += r.f1;
        m.ign_f1 += r.ign_f1;
        for (std::size_t b = 0; b < 3; ++b) m.bucket_f1[b] += r.bucket_f1[b];
    }
    const auto n = static_cast<double>(reports.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    m.ign_f1 /= n;
    for (double& b : m.bucket_f1) b /= n;
    return m;
}

std::vector<AblationRow> run_ablation(const Regime& regime, const TrainConfig& base,
                                      const std::set<AblationToggle>& toggles,
                                      const std::vector<std::uint64_t>& seeds, BucketCuts cuts) {
    require(!seeds.empty(), ErrorKind::Config, "ablation needs at least one seed");
    const bool em = toggles.count(AblationToggle::Em) > 0;
    const bool scl = toggles.count(AblationToggle::Scl) > 0;

    struct Variant {
        std::string name;
        bool remove_em;
        bool remove_scl;
    };
    std::vector<Variant> variants{{"full", false, false}};
    if (em) variants.push_back({"-em", true, false});
    if (scl) variants.push_back({"-scl", false, true});
    if (em && scl) variants.push_back({"-both", true, true});

    const std::vector<Bucket> buckets = bucket_relations(regime.train.vocabulary, cuts);
    const FactSet facts = collect_facts(regime.train);
    const LabelView view = default_label_view(regime.dev);

    std::vector<AblationRow> rows;
    for (const Variant& v : variants) {
        AblationRow row;
        row.variant = v.name;
        for (std::uint64_t seed : seeds) {
            TrainConfig config = base;
            config.seed = seed;
            if (v.remove_em) config.loss.enable_em = false;
            if (v.remove_scl) config.loss.enable_scl = false;
            const TrainResult result = train(regime.train, &regime.dev, config);
            row.per_seed.push_back(evaluate(result.params, regime.dev, facts, buckets, view));
        }
        row.dev = mean_of(row.per_seed);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SweepPoint> sweep_sampling_ratio(const Regime& regime, const TrainConfig& base,
                                             const std::vector<double>& ratios,
                                             const std::vector<std::uint64_t>& seeds) {
    require(!seeds.empty(), ErrorKind::Config, "sweep needs at least one seed");
    const FactSet facts = collect_facts(regime.train);
    std::vector<SweepPoint> points;
    for (double ratio : ratios) {
        std::vector<EvalReport> noisy, gold_dev, gold_test;
        for (std::uint64_t seed : seeds) {
            TrainConfig config = base;
            config.seed = seed;
            config.loss.enable_neg_sampling = true;
            config.loss.neg_sampling_ratio = ratio;
            const TrainResult result = train(regime.train, &regime.dev, config);
            noisy.push_back(evaluate(result.params, regime.dev, facts, {}, LabelView::Observed));
            gold_dev.push_back(evaluate(result.params, regime.dev, facts, {}, LabelView::Gold));
            gold_test.push_back(evaluate(result.params, regime.test, facts, {}, LabelView::Gold));
        }
        points.push_back({ratio, mean_of(noisy), mean_of(gold_dev), mean_of(gold_test)});
    }
    return points;
}

MeanMetrics mean_test_f1(const Regime& regime, const TrainConfig& config,
                         const std::vector<std::uint64_t>& seeds) {
    const FactSet facts = collect_facts(regime.train);
    std::vector<EvalReport> reports;
    for (std::uint64_t seed : seeds) {
        TrainConfig c = config;
        c.seed = seed;
        const TrainResult result = train(regime.train, &regime.dev, c);
        reports.push_back(evaluate(result.params, regime.test, facts, {}, LabelView::Gold));
    }
    return mean_of(reports);
}

}  // namespace pemscl

#include "pemscl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "pemscl/error.hpp"

namespace pemscl {

LabelSet predict_labels(std::span<const double> logits) {
    require(!logits.empty(), ErrorKind::Shape, "empty logit vector");
    const double threshold = logits.back();
    LabelSet out;
    for (std::size_t r = 0; r + 1 < logits.size(); ++r) {
        if (logits[r] > threshold) out.push_back(r);
    }
    return out;
}

LabelSet predict_labels(const Vector& logits) {
    return predict_labels(std::span<const double>(logits.data(), static_cast<std::size_t>(logits.size())));
}

const char* to_string(LabelView view) {
    return view == LabelView::Observed ? "observed" : "gold";
}

LabelView default_label_view(const Corpus& corpus) {
    return corpus.label_source == LabelSource::Original ? LabelView::Observed : LabelView::Gold;
}

const LabelSet& labels_for(const PairExample& ex, LabelView view) {
    if (view == LabelView::Gold && ex.gold_positive_relations) return *ex.gold_positive_relations;
    return ex.positive_relations;
}

FactSet collect_facts(const Corpus& train) {
    FactSet facts;
    for (const PairExample& ex : train.examples) {
        for (RelationIndex r : ex.positive_relations) facts.emplace(ex.head_name, r, ex.tail_name);
    }
    return facts;
}

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    Prf out;
    if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (out.precision + out.recall > 0.0) {
        out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    }
    return out;
}

EvalReport score_predictions(const Corpus& corpus, std::span<const LabelSet> predictions,
                             const FactSet& train_facts, std::span<const Bucket> buckets,
                             LabelView view) {
    require(predictions.size() == corpus.examples.size(), ErrorKind::Shape,
            "prediction count does not match corpus size");
    const std::size_t num_relations = corpus.vocabulary.size();
    require(buckets.empty() || buckets.size() == num_relations, ErrorKind::Shape,
            "bucket table does not cover the vocabulary");

    EvalReport report;
    report.view = view;
    report.per_relation.assign(num_relations, Counts{});
    for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
        const PairExample& ex = corpus.examples[i];
        const LabelSet& gold = labels_for(ex, view);
        const LabelSet& pred = predictions[i];
        for (RelationIndex r : pred) {
            require(r < num_relations, ErrorKind::InvalidLabel, "prediction outside vocabulary");
            const bool correct = std::binary_search(gold.begin(), gold.end(), r);
            if (correct) {
                ++report.per_relation[r].tp;
            } else {
                ++report.per_relation[r].fp;
            }
            if (train_facts.count(Fact{ex.head_name, r, ex.tail_name}) > 0) {
                ++report.excluded_prediction_count;
                if (correct) ++report.excluded_true_positive_count;
            }
        }
        for (RelationIndex r : gold) {
            if (!std::binary_search(pred.begin(), pred.end(), r)) ++report.per_relation[r].fn;
        }
    }

    std::size_t tp = 0, fp = 0, fn = 0;
    std::array<Counts, 3> bucket_counts{};
    for (std::size_t r = 0; r < num_relations; ++r) {
        const Counts& c = report.per_relation[r];
        tp += c.tp;
        fp += c.fp;
        fn += c.fn;
        if (!buckets.empty()) {
            Counts& b = bucket_counts[static_cast<std::size_t>(buckets[r])];
            b.tp += c.tp;
            b.fp += c.fp;
            b.fn += c.fn;
        }
    }
    const Prf overall = prf_from_counts(tp, fp, fn);
    report.precision = overall.precision;
    report.recall = overall.recall;
    report.f1 = overall.f1;
    report.true_positive_count = tp;
    report.predicted_triple_count = tp + fp;
    report.gold_triple_count = tp + fn;

    // Ign-F1: drop predicted triples whose fact was seen in training and
    // rescore against the unchanged gold set.
    const std::size_t ign_tp = tp - report.excluded_true_positive_count;
    const std::size_t ign_pred = tp + fp - report.excluded_prediction_count;
    report.ign_f1 = prf_from_counts(ign_tp, ign_pred - ign_tp, report.gold_triple_count - ign_tp).f1;

    if (!buckets.empty()) {
        report.has_buckets = true;
        for (std::size_t b = 0; b < 3; ++b) {
            report.bucket_f1[b] = prf_from_counts(bucket_counts[b].tp, bucket_counts[b].fp, bucket_counts[b].fn).f1;
        }
    }
    return report;
}

EvalReport evaluate(const HeadParams& params, const Corpus& corpus, const FactSet& train_facts,
                    std::span<const Bucket> buckets, LabelView view) {
    std::vector<LabelSet> predictions;
    predictions.reserve(corpus.examples.size());
    for (const PairExample& ex : corpus.examples) {
        const PairForward fw = head_forward(ex, params);
        require(fw.f.allFinite(), ErrorKind::NonFinite, "non-finite logits during evaluation");
        predictions.push_back(predict_labels(fw.f));
    }
    return score_predictions(corpus, predictions, train_facts, buckets, view);
}

nlohmann::json to_json(const EvalReport& r, const RelationVocabulary* vocab) {
    nlohmann::json j;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["ign_f1"] = r.ign_f1;
    j["label_view"] = to_string(r.view);
    j["predicted_triple_count"] = r.predicted_triple_count;
    j["gold_triple_count"] = r.gold_triple_count;
    j["true_positive_count"] = r.true_positive_count;
    j["excluded_prediction_count"] = r.excluded_prediction_count;
    if (r.has_buckets) {
        j["bucket_f1"] = {{"Head", r.bucket(Bucket::Head)},
                          {"Mid", r.bucket(Bucket::Mid)},
                          {"Tail", r.bucket(Bucket::Tail)}};
    }
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t i = 0; i < r.per_relation.size(); ++i) {
        const std::string key = vocab ? vocab->name(i) : std::to_string(i);
        per[key] = {{"tp", r.per_relation[i].tp}, {"fp", r.per_relation[i].fp}, {"fn", r.per_relation[i].fn}};
    }
    j["per_relation"] = per;
    j["config"] = r.config;
    return j;
}

}  // namespace pemscl

#pragma once

// Thresholded prediction and the relation-extraction metric suite.

#include <array>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "pemscl/head.hpp"
#include "pemscl/relation.hpp"

namespace pemscl {

/// {r : f_r > f_eta}; ties are not predicted, the empty set means NA.
LabelSet predict_labels(std::span<const double> logits);
LabelSet predict_labels(const Vector& logits);

/// Which labels an evaluation scores against. Gold uses
/// gold_positive_relations when present.
enum class LabelView { Observed, Gold };

const char* to_string(LabelView view);
/// Observed for noisy (Original) splits, Gold otherwise.
LabelView default_label_view(const Corpus& corpus);
const LabelSet& labels_for(const PairExample& example, LabelView view);

/// (head surface identifier, relation, tail surface identifier).
using Fact = std::tuple<std::string, RelationIndex, std::string>;
using FactSet = std::set<Fact>;

/// Facts of the observed training labels, independent of document.
FactSet collect_facts(const Corpus& train);

struct Counts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// 0/0 precision or recall is 0; F1 is 0 when P + R = 0.
Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double ign_f1 = 0.0;
    std::array<double, 3> bucket_f1{};  // indexed by Bucket
    bool has_buckets = false;
    std::vector<Counts> per_relation;
    std::size_t predicted_triple_count = 0;
    std::size_t gold_triple_count = 0;
    std::size_t true_positive_count = 0;
    // Ign-F1 bookkeeping: predicted triples whose fact is in the training set.
    std::size_t excluded_prediction_count = 0;
    std::size_t excluded_true_positive_count = 0;
    LabelView view = LabelView::Gold;
    nlohmann::json config = nlohmann::json::object();

    double bucket(Bucket b) const { return bucket_f1[static_cast<std::size_t>(b)]; }
};

EvalReport score_predictions(const Corpus& corpus, std::span<const LabelSet> predictions,
                             const FactSet& train_facts, std::span<const Bucket> buckets,
                             LabelView view);

EvalReport evaluate(const HeadParams& params, const Corpus& corpus, const FactSet& train_facts,
                    std::span<const Bucket> buckets, LabelView view);

nlohmann::json to_json(const EvalReport& report, const RelationVocabulary* vocab = nullptr);

}  // namespace pemscl

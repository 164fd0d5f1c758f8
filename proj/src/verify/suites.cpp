#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pemscl/batch.hpp"
#include "pemscl/loss.hpp"
#include "pemscl/metrics.hpp"
#include "pemscl/rng.hpp"
#include "pemscl/train.hpp"
#include "pemscl/verify/oracle.hpp"
#include "pemscl/verify/suites.hpp"

namespace pemscl::verify {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Vector random_unit(CounterRng& rng, std::size_t dim) {
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    return v / v.norm();
}

LabelSet random_labels(CounterRng& rng, std::size_t num_rel, double na_rate) {
    LabelSet out;
    if (rng.bernoulli(na_rate)) return out;
    for (std::size_t r = 0; r < num_rel; ++r) {
        if (rng.bernoulli(0.4)) out.push_back(r);
    }
    if (out.empty()) out.push_back(static_cast<std::size_t>(rng.below(num_rel)));
    return out;
}

LabelSet random_nonempty_subset(CounterRng& rng, const LabelSet& pool) {
    LabelSet out;
    for (RelationIndex r : pool) {
        if (rng.bernoulli(0.5)) out.push_back(r);
    }
    if (out.empty()) out.push_back(pool[static_cast<std::size_t>(rng.below(pool.size()))]);
    return out;
}

Batch batch_for(const std::vector<LabelSet>& labels) {
    Batch b;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        b.example_indices.push_back(i);
        (labels[i].empty() ? b.bn_indices : b.bp_indices).push_back(i);
    }
    b.s_sets = compute_positive_sets(std::span<const LabelSet>(labels));
    return b;
}

}  // namespace

SuiteResult run_oracle_equivalence(std::uint64_t seed, std::size_t instances) {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult suite;
    suite.name = "oracle-equivalence";
    CounterRng rng(seed, 0, "oracle-equivalence");
    const double taus[] = {0.1, 0.5, 1.0, 2.0};
    for (std::size_t t = 0; t < instances; ++t) {
        OracleInstance in;
        in.num_relations = 1 + static_cast<std::size_t>(rng.below(5));
        const std::size_t n = 1 + static_cast<std::size_t>(rng.below(6));
        const std::size_t dim = 1 + static_cast<std::size_t>(rng.below(8));
        in.tau = taus[rng.below(4)];
        in.lambda = rng.uniform(0.05, 2.0);
        in.gamma_set_size = rng.bernoulli(0.5);
        in.enable_em = rng.bernoulli(0.75);
        in.enable_scl = rng.bernoulli(0.75);
        in.enable_neg_sampling = rng.bernoulli(0.5);
        const double scale = rng.uniform(0.1, 4.0);

        std::vector<LabelSet> labels;
        std::vector<PairForward> forwards(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(random_labels(rng, in.num_relations, 0.35));
            PairForward& fw = forwards[i];
            fw.f = Vector(static_cast<Eigen::Index>(in.num_relations + 1));
            for (Eigen::Index k = 0; k < fw.f.size(); ++k) fw.f[k] = scale * rng.normal();
            fw.x_unit = random_unit(rng, dim);
            fw.x = fw.x_unit;
            in.logits.emplace_back(fw.f.data(), fw.f.data() + fw.f.size());
            in.embeddings.emplace_back(fw.x_unit.data(), fw.x_unit.data() + fw.x_unit.size());
            in.positives.push_back(labels.back());
        }
        Batch batch = batch_for(labels);
        for (std::size_t i : batch.bn_indices) {
            const LabelSet sub = random_nonempty_subset(rng, complement(labels[i], in.num_relations));
            batch.sampled_negatives[i] = sub;
            in.sampled[i] = sub;
        }

        LossConfig cfg;
        cfg.tau = in.tau;
        cfg.lambda = in.lambda;
        cfg.gamma_mode = in.gamma_set_size ? GammaMode::SetSize : GammaMode::Unit;
        cfg.enable_em = in.enable_em;
        cfg.enable_scl = in.enable_scl;
        cfg.enable_neg_sampling = in.enable_neg_sampling;

        const BatchLossOutput got = batch_loss(batch, labels, forwards, cfg);
        const OracleParts want = oracle_batch_loss(in);
        const double reference = static_cast<double>(want.total);
        const double err = std::abs(got.total - reference) / std::max(1e-300, std::abs(reference));
        std::ostringstream what;
        what << "instance " << t << " (|R|=" << in.num_relations << ", batch=" << n << ", d_x=" << dim
             << "): batch_loss " << got.total << " vs oracle " << reference << ", relative " << err;
        suite.record(err < kOracleTolerance, err, what.str());
    }
    suite.seconds = seconds_since(start);
    return suite;
}

SuiteResult run_invariants(std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult suite;
    suite.name = "invariants";
    CounterRng rng(seed, 0, "invariants");

    // Label partitions and batch partitions.
    for (int t = 0; t < 50; ++t) {
        const std::size_t num_rel = 1 + static_cast<std::size_t>(rng.below(12));
        const LabelSet pos = random_labels(rng, num_rel, 0.3);
        const LabelSet neg = complement(pos, num_rel);
        LabelSet all = pos;
        all.insert(all.end(), neg.begin(), neg.end());
        std::sort(all.begin(), all.end());
        LabelSet expect(num_rel);
        std::iota(expect.begin(), expect.end(), std::size_t{0});
        suite.record(!intersects(pos, neg) && all == expect, 0.0,
                     "P and N do not partition R (trial " + std::to_string(t) + ")");

        const std::size_t n = 2 + static_cast<std::size_t>(rng.below(10));
        std::vector<LabelSet> labels;
        for (std::size_t i = 0; i < n; ++i) labels.push_back(random_labels(rng, num_rel, 0.4));
        const Batch b = batch_for(labels);
        std::vector<std::size_t> members = b.bp_indices;
        members.insert(members.end(), b.bn_indices.begin(), b.bn_indices.end());
        std::sort(members.begin(), members.end());
        std::vector<std::size_t> positions(n);
        std::iota(positions.begin(), positions.end(), std::size_t{0});
        suite.record(members == positions, 0.0, "B_P and B_N do not partition the batch");

        // S-set symmetry and irreflexivity.
        bool symmetric = true;
        for (const auto& [i, s] : b.s_sets) {
            if (std::find(s.begin(), s.end(), i) != s.end()) symmetric = false;
            for (std::size_t j : s) {
                const auto it = b.s_sets.find(j);
                if (it == b.s_sets.end() || std::find(it->second.begin(), it->second.end(), i) == it->second.end()) {
                    symmetric = false;
                }
            }
        }
        suite.record(symmetric, 0.0, "S sets are not symmetric");
    }

    // Logit-shift invariance of predictions and pairwise losses; entropy bounds.
    for (int t = 0; t < 100; ++t) {
        const std::size_t num_rel = 1 + static_cast<std::size_t>(rng.below(20));
        Vector f(static_cast<Eigen::Index>(num_rel + 1));
        for (Eigen::Index k = 0; k < f.size(); ++k) f[k] = 3.0 * rng.normal();
        const double c = rng.uniform(-50.0, 50.0);
        const Vector g = f.array() + c;
        suite.record(predict_labels(f) == predict_labels(g), 0.0, "prediction changed under logit shift");

        const LabelSet pos = random_labels(rng, num_rel, 0.3);
        const LabelSet neg = complement(pos, num_rel);
        const std::span<const double> fs(f.data(), static_cast<std::size_t>(f.size()));
        const std::span<const double> gs(g.data(), static_cast<std::size_t>(g.size()));
        LossConfig cfg;
        const double a = pmt_loss(fs, pos, neg) + em_loss(fs, pos, neg, cfg);
        const double b = pmt_loss(gs, pos, neg) + em_loss(gs, pos, neg, cfg);
        const double err = std::abs(a - b) / std::max(1.0, std::abs(a));
        suite.record(err < 1e-9, err, "pairwise loss changed under logit shift");

        for (RelationIndex r = 0; r < num_rel; ++r) {
            const double h = pair_entropy(f[static_cast<Eigen::Index>(r)], f[static_cast<Eigen::Index>(num_rel)]);
            if (!(h >= 0.0 && h <= std::log(2.0) + 1e-15)) {
                suite.record(false, h, "pair entropy outside [0, ln 2]: " + std::to_string(h));
            }
        }
        suite.record(pair_entropy(c, c) == std::log(2.0) || std::abs(pair_entropy(c, c) - std::log(2.0)) < 1e-15,
                     0.0, "pair entropy at a tie is not ln 2");
    }
    suite.record(pair_entropy(800.0, -800.0) == 0.0, 0.0, "saturated pair entropy is not exactly 0");

    // Batch-permutation invariance of L2.
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.below(12));
        const std::size_t num_rel = 2 + static_cast<std::size_t>(rng.below(6));
        std::vector<LabelSet> labels;
        std::vector<Vector> x;
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(random_labels(rng, num_rel, 0.3));
            x.push_back(random_unit(rng, 8));
        }
        const double tau = rng.uniform(0.1, 2.0);
        const double base = l2_loss(batch_for(labels), x, tau).total();
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[static_cast<std::size_t>(rng.below(i + 1))]);
        std::vector<LabelSet> pl;
        std::vector<Vector> px;
        for (std::size_t i : perm) {
            pl.push_back(labels[i]);
            px.push_back(x[i]);
        }
        const double permuted = l2_loss(batch_for(pl), px, tau).total();
        const double err = std::abs(base - permuted) / std::max(1.0, std::abs(base));
        suite.record(err < 1e-12, err, "L2 changed under batch permutation");
    }

    // Negative-label sampling contracts.
    for (int t = 0; t < 40; ++t) {
        const std::size_t num_rel = 1 + static_cast<std::size_t>(rng.below(100));
        const double ratio = rng.uniform(0.01, 1.0);
        PairExample na;
        CounterRng sample_rng = rng.split(static_cast<std::uint64_t>(t), "sample");
        const LabelSet s = sample_negative_labels(na, num_rel, ratio, sample_rng);
        const bool ok = is_label_set(s) && s.size() == negative_sample_size(num_rel, ratio) &&
                        (s.empty() || s.back() < num_rel);
        suite.record(ok, 0.0, "sampled negative set has the wrong size or range");
        CounterRng full_rng = rng.split(static_cast<std::uint64_t>(t), "full");
        suite.record(sample_negative_labels(na, num_rel, 1.0, full_rng) == complement({}, num_rel), 0.0,
                     "ratio 1.0 does not sample the full negative set");
    }

    // Metric identities on random predictions.
    for (int t = 0; t < 30; ++t) {
        const std::size_t num_rel = 2 + static_cast<std::size_t>(rng.below(8));
        std::vector<std::string> names;
        for (std::size_t r = 0; r < num_rel; ++r) names.push_back("R" + std::to_string(r));
        Corpus corpus;
        corpus.vocabulary = RelationVocabulary(names);
        corpus.label_source = LabelSource::Gold;
        corpus.embedding_dim = 2;
        std::vector<LabelSet> preds;
        FactSet facts;
        const std::size_t n = 1 + static_cast<std::size_t>(rng.below(40));
        for (std::size_t i = 0; i < n; ++i) {
            PairExample ex;
            ex.doc_id = "d" + std::to_string(i / 5);
            ex.head_id = static_cast<EntityId>(i);
            ex.tail_id = static_cast<EntityId>(i + 1000);
            ex.head_name = "E" + std::to_string(rng.below(6));
            ex.tail_name = "E" + std::to_string(rng.below(6));
            ex.head_mentions = {{ex.head_id, Vector::Zero(2)}};
            ex.tail_mentions = {{ex.tail_id, Vector::Zero(2)}};
            ex.context = Vector::Zero(2);
            ex.positive_relations = random_labels(rng, num_rel, 0.4);
            ex.gold_positive_relations = ex.positive_relations;
            preds.push_back(random_labels(rng, num_rel, 0.4));
            if (rng.bernoulli(0.3) && !ex.positive_relations.empty()) {
                facts.emplace(ex.head_name, ex.positive_relations.front(), ex.tail_name);
            }
            corpus.examples.push_back(std::move(ex));
        }
        const EvalReport r = score_predictions(corpus, preds, facts, {}, LabelView::Gold);
        std::size_t tp = 0, fp = 0, fn = 0;
        for (const Counts& c : r.per_relation) {
            tp += c.tp;
            fp += c.fp;
            fn += c.fn;
        }
        const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double rc = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        const double f1 = p + rc > 0.0 ? 2 * p * rc / (p + rc) : 0.0;
        const double err = std::abs(f1 - r.f1);
        suite.record(err < 1e-12 && r.true_positive_count == tp && r.predicted_triple_count == tp + fp &&
                         r.gold_triple_count == tp + fn,
                     err, "micro F1 inconsistent with summed counts");
        suite.record(r.excluded_prediction_count <= r.predicted_triple_count &&
                         r.excluded_true_positive_count <= r.excluded_prediction_count &&
                         r.ign_f1 >= 0.0 && r.ign_f1 <= 1.0,
                     0.0, "Ign-F1 bookkeeping out of range");
    }

    // Best-epoch selection on a tiny corpus.
    {
        Corpus corpus;
        corpus.vocabulary = RelationVocabulary({"A", "B", "C"});
        corpus.label_source = LabelSource::Gold;
        corpus.embedding_dim = 4;
        CounterRng data = rng.split(99, "tiny-train");
        for (std::size_t i = 0; i < 24; ++i) {
            PairExample ex;
            ex.doc_id = "doc" + std::to_string(i / 4);
            ex.head_id = static_cast<EntityId>(2 * i);
            ex.tail_id = static_cast<EntityId>(2 * i + 1);
            ex.head_name = "E" + std::to_string(2 * i);
            ex.tail_name = "E" + std::to_string(2 * i + 1);
            const std::size_t r = i % 4;
            Vector signal = Vector::Zero(4);
            signal[static_cast<Eigen::Index>(r)] = 1.0;
            ex.head_mentions = {{ex.head_id, signal + 0.1 * random_unit(data, 4)}};
            ex.tail_mentions = {{ex.tail_id, signal + 0.1 * random_unit(data, 4)}};
            ex.context = signal;
            if (r < 3) ex.positive_relations = {r};
            ex.gold_positive_relations = ex.positive_relations;
            corpus.examples.push_back(std::move(ex));
        }
        corpus.vocabulary.set_frequencies(count_relation_frequencies(corpus));
        TrainConfig cfg;
        cfg.epochs = 6;
        cfg.learning_rate = 0.01;
        cfg.model.hidden_dim = 4;
        cfg.model.group_count = 2;
        const TrainResult result = train(corpus, &corpus, cfg);
        double best = -1.0;
        for (const EpochRecord& e : result.history) best = std::max(best, e.dev->f1);
        const bool ok = result.best_epoch && result.history.at(*result.best_epoch).dev->f1 == best;
        suite.record(ok, 0.0, "returned checkpoint is not the best dev-F1 epoch");
    }

    suite.seconds = seconds_since(start);
    return suite;
}

}  // namespace pemscl::verify

// Acceptance runner: one PASS/FAIL line per criterion.
//
// Exit status is 0 once every criterion has been evaluated; --strict makes any
// FAIL line turn into exit status 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pemscl/batch.hpp"
#include "pemscl/cli.hpp"
#include "pemscl/data.hpp"
#include "pemscl/experiments.hpp"
#include "pemscl/loss.hpp"
#include "pemscl/manifest.hpp"
#include "pemscl/metrics.hpp"
#include "pemscl/train.hpp"
#include "pemscl/verify/suites.hpp"

using namespace pemscl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, a);
    return buf;
}

std::string f4(double v) { return fmt("%.4f", v); }

// Shared OOG setup for the noise criteria.
struct NoiseSetup {
    Regime regime;
    TrainConfig base;
    std::vector<std::uint64_t> seeds{1, 2, 3};
};

const NoiseSetup& noise_setup() {
    static const NoiseSetup setup = [] {
        NoiseSetup s;
        SyntheticConfig data;
        data.num_relations = 32;
        data.train_documents = 200;
        data.dev_documents = 150;
        data.test_documents = 150;
        data.seed = 1;
        s.regime = assemble_regime(generate_synthetic_splits(data), 0.4, "OOG", 11);
        s.base.learning_rate = 0.01;
        s.base.epochs = 30;
        return s;
    }();
    return setup;
}

// Sweep at {0.1, 1.0}, shared by criteria 5 and 6.
const std::vector<SweepPoint>& noise_sweep() {
    static const std::vector<SweepPoint> points =
        sweep_sampling_ratio(noise_setup().regime, noise_setup().base, {0.1, 1.0}, noise_setup().seeds);
    return points;
}

Outcome suite_outcome(const verify::SuiteResult& r) {
    Outcome o;
    o.pass = r.passed();
    o.detail = verify::summary_line(r);
    for (const std::string& n : r.notes) o.detail += "; " + n;
    return o;
}

Outcome criterion_gradients() {
    const verify::SuiteResult r = verify::run_gradient_checks(1);
    Outcome o = suite_outcome(r);
    const bool enough = r.checks >= 200;
    const bool fast = r.seconds < 60.0;
    o.pass = o.pass && enough && fast;
    if (!enough) o.detail += "; fewer than 200 configurations";
    if (!fast) o.detail += "; over the 60 s budget";
    return o;
}

Outcome criterion_oracle() {
    const verify::SuiteResult r = verify::run_oracle_equivalence(1, 100);
    Outcome o = suite_outcome(r);
    o.pass = o.pass && r.checks >= 50;
    return o;
}

Outcome criterion_spot_values() {
    struct Spot {
        const char* name;
        double got;
        double want;
    };
    // Reference values from 30-digit evaluation of the closed forms.
    std::vector<Spot> spots{
        {"sigma(2)", pairwise_probs(2.0, 0.0).p_r, 0.880797077977882444},
        {"pmt tie", pmt_loss(std::vector<double>{0.0, 0.0}, {0}, {}), std::log(2.0)},
        {"H(gap 2)", pair_entropy(2.0, 0.0), 0.365333855087207608},
    };
    for (std::size_t n = 2; n <= 8; ++n) {
        const std::vector<Vector> same(n, Vector::Constant(4, 0.5));
        spots.push_back({"scl identical", scl_loss(0, same, {1}, 1.0), std::log(double(n - 1))});
    }
    Outcome o{true, ""};
    double worst = 0.0;
    for (const Spot& s : spots) {
        const double err = std::abs(s.got - s.want);
        worst = std::max(worst, err);
        if (!(err < 1e-6)) {
            o.pass = false;
            o.detail += std::string(s.name) + " off by " + fmt("%.3g", err) + "; ";
        }
    }
    o.detail += std::to_string(spots.size()) + " values, worst abs error " + fmt("%.3g", worst);
    return o;
}

Outcome criterion_sampling_consistency() {
    SyntheticConfig data;
    data.num_relations = 16;
    data.train_documents = 30;
    data.dev_documents = 10;
    data.test_documents = 10;
    const Regime r = assemble_regime(generate_synthetic_splits(data), 0.3, "OOG", 5);
    const HeadParams params = HeadParams::initialize(r.train.embedding_dim, 32, 4, r.train.vocabulary.logit_dim(), 2);

    LossConfig plain;
    LossConfig full = plain;
    full.enable_neg_sampling = true;
    full.neg_sampling_ratio = 1.0;
    std::size_t batches = 0, mismatches = 0;
    for (Batch b : assemble_batches(r.train, 4, 3)) {
        attach_negative_samples(b, r.train, 1.0, 9, 0);
        std::vector<LabelSet> labels;
        std::vector<PairForward> fw;
        for (std::size_t i : b.example_indices) {
            labels.push_back(r.train.examples[i].positive_relations);
            fw.push_back(head_forward(r.train.examples[i], params));
        }
        const BatchLossOutput a = batch_loss(b, labels, fw, plain);
        const BatchLossOutput s = batch_loss(b, labels, fw, full);
        bool same = std::memcmp(&a.total, &s.total, sizeof(double)) == 0;
        for (std::size_t i = 0; i < fw.size(); ++i) {
            same = same && a.grad_logits[i] == s.grad_logits[i] && a.grad_embeddings[i] == s.grad_embeddings[i];
        }
        ++batches;
        mismatches += same ? 0 : 1;
    }

    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.learning_rate = 0.01;
    TrainConfig sampled = cfg;
    sampled.loss.enable_neg_sampling = true;
    sampled.loss.neg_sampling_ratio = 1.0;
    const TrainResult ta = train(r.train, &r.dev, cfg);
    const TrainResult ts = train(r.train, &r.dev, sampled);
    const FactSet facts = collect_facts(r.train);
    const EvalReport ea = evaluate(ta.params, r.test, facts, {}, LabelView::Gold);
    const EvalReport es = evaluate(ts.params, r.test, facts, {}, LabelView::Gold);
    const bool trained_same = ta.params == ts.params && ea.f1 == es.f1 && ea.ign_f1 == es.ign_f1 &&
                              ea.precision == es.precision && ea.recall == es.recall;

    Outcome o;
    o.pass = mismatches == 0 && batches > 0 && trained_same;
    o.detail = std::to_string(batches - mismatches) + "/" + std::to_string(batches) +
               " batches bitwise equal; trained parameters and test metrics " +
               (trained_same ? "identical" : "differ") + " (F1 " + f4(ea.f1) + " vs " + f4(es.f1) + ")";
    return o;
}

Outcome criterion_noise_gap() {
    const auto start = std::chrono::steady_clock::now();
    const NoiseSetup& s = noise_setup();
    const double with_sampling = noise_sweep().front().gold_test.f1;
    const double without = mean_test_f1(s.regime, s.base, s.seeds).f1;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double gap = 100.0 * (with_sampling - without);
    Outcome o;
    o.pass = gap >= 8.0 && seconds < 600.0;
    o.detail = "gold-test F1 ratio 0.1 " + f4(with_sampling) + " vs no sampling " + f4(without) + ", gap " +
               fmt("%.2f", gap) + " points (need >= 8), " + fmt("%.0f", seconds) + " s";
    return o;
}

Outcome criterion_sweep_direction() {
    const SweepPoint& low = noise_sweep().front();
    const SweepPoint& high = noise_sweep().back();
    const bool gold_ok = low.gold_test.f1 > high.gold_test.f1;
    const bool noisy_ok = high.noisy_dev.f1 > low.noisy_dev.f1;
    Outcome o;
    o.pass = gold_ok && noisy_ok;
    o.detail = "gold-test 0.1 " + f4(low.gold_test.f1) + (gold_ok ? " > " : " <= ") + "1.0 " +
               f4(high.gold_test.f1) + "; noisy-dev 1.0 " + f4(high.noisy_dev.f1) + (noisy_ok ? " > " : " <= ") +
               "0.1 " + f4(low.noisy_dev.f1);
    return o;
}

Outcome criterion_ablation() {
    SyntheticConfig data;
    data.num_relations = 32;
    data.train_documents = 200;
    data.dev_documents = 150;
    data.test_documents = 150;
    data.zipf_exponent = 0.7;
    data.seed = 1;
    const GoldSplits gold = generate_synthetic_splits(data);
    const Regime r = assemble_regime(gold, 0.0, "GGG", 1);
    TrainConfig base;
    base.learning_rate = 0.01;
    base.epochs = 30;
    const auto rows =
        run_ablation(r, base, {AblationToggle::Em, AblationToggle::Scl}, {1, 2, 3}, BucketCuts{10, 10});

    const MeanMetrics& full = rows.front().dev;
    const MeanMetrics& both = rows.back().dev;
    bool tail_ok = true;
    std::ostringstream d;
    d << "top-10 share " << f4(top_relation_share(r.train)) << "; Tail F1 full " << f4(full.bucket(Bucket::Tail));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        tail_ok = tail_ok && full.bucket(Bucket::Tail) >= rows[i].dev.bucket(Bucket::Tail);
        d << ", " << rows[i].variant << " " << f4(rows[i].dev.bucket(Bucket::Tail));
    }
    const double tail_drop = full.bucket(Bucket::Tail) - both.bucket(Bucket::Tail);
    const double head_drop = full.bucket(Bucket::Head) - both.bucket(Bucket::Head);
    d << "; removing both drops Tail " << fmt("%.2f", 100 * tail_drop) << " vs Head " << fmt("%.2f", 100 * head_drop)
      << " points";
    Outcome o;
    o.pass = tail_ok && tail_drop > head_drop;
    o.detail = d.str();
    return o;
}

Outcome criterion_invariants() { return suite_outcome(verify::run_invariants(1)); }

int quiet_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"pemscl"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != 0) std::cerr << err.str();
    return code;
}

Outcome criterion_replay() {
    const fs::path root = fs::temp_directory_path() / "pemscl-acceptance-replay";
    fs::remove_all(root);
    const std::vector<std::string> tiny{
        "--set", "data.num_relations=10", "--set", "data.train_documents=20", "--set", "data.dev_documents=6",
        "--set", "data.test_documents=6", "--set", "eval.head_count=3", "--set", "eval.tail_count=3",
        "--epochs", "3", "--lr", "0.01"};
    struct Case {
        std::string command;
        std::vector<std::string> extra;
    };
    const std::vector<Case> cases{{"train", {}},
                                  {"train", {"--neg-sampling", "--neg-sampling-ratio", "0.2"}},
                                  {"sweep-ratio", {"--ratios", "0.2,1", "--seeds", "4,5"}},
                                  {"ablate", {"--seeds", "2"}}};
    std::size_t ok = 0;
    std::string detail;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const fs::path first = root / ("run" + std::to_string(i));
        const fs::path again = root / ("replay" + std::to_string(i));
        std::vector<std::string> args{cases[i].command, "--out", first.string()};
        args.insert(args.end(), tiny.begin(), tiny.end());
        args.insert(args.end(), cases[i].extra.begin(), cases[i].extra.end());
        if (quiet_cli(args) != 0) {
            detail += cases[i].command + " run failed; ";
            continue;
        }
        const std::string manifest = (first / "manifest.json").string();
        const int code = quiet_cli({cases[i].command, "--manifest", manifest, "--verify", "--out", again.string()});
        const auto diffs =
            diff_metrics(load_manifest(manifest).metrics, load_manifest(again / "manifest.json").metrics);
        if (code == 0 && diffs.empty()) {
            ++ok;
        } else {
            detail += cases[i].command + " replay differs; ";
        }
    }
    fs::remove_all(root);
    Outcome o;
    o.pass = ok == cases.size();
    o.detail = detail + std::to_string(ok) + "/" + std::to_string(cases.size()) +
               " manifests replayed with identical metrics";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    std::string report_path;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) {
            strict = true;
        } else if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc) {
            report_path = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--strict] [--report FILE]\n";
            return 2;
        }
    }

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"gradient correctness", criterion_gradients},
        {"oracle equivalence", criterion_oracle},
        {"closed-form spot values", criterion_spot_values},
        {"ratio 1.0 equals the plain objective", criterion_sampling_consistency},
        {"noise robustness gap", criterion_noise_gap},
        {"sampling ratio sweep direction", criterion_sweep_direction},
        {"ablation direction", criterion_ablation},
        {"invariant suite", criterion_invariants},
        {"manifest replay determinism", criterion_replay},
    };

    std::ostringstream lines;
    std::size_t passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        passed += o.pass ? 1 : 0;
        std::ostringstream line;
        line << "criterion " << i + 1 << " [" << (o.pass ? "PASS" : "FAIL") << "] " << criteria[i].first << ": "
             << o.detail << " (" << fmt("%.1f", seconds) << " s)";
        std::cout << line.str() << std::endl;
        lines << line.str() << "\n";
    }
    std::cout << passed << "/" << criteria.size() << " criteria passed" << std::endl;
    lines << passed << "/" << criteria.size() << " criteria passed\n";
    if (!report_path.empty()) std::ofstream(report_path) << lines.str();
    return strict && passed != criteria.size() ? 1 : 0;
}

#include "pemscl/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "pemscl/config.hpp"
#include "pemscl/data.hpp"
#include "pemscl/experiments.hpp"
#include "pemscl/io.hpp"
#include "pemscl/manifest.hpp"
#include "pemscl/report.hpp"
#include "pemscl/verify/suites.hpp"

namespace pemscl {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::Shape:
        case ErrorKind::EmptyMentions:
        case ErrorKind::InvalidLabel:
        case ErrorKind::InvalidSample:
        case ErrorKind::Contract:
        case ErrorKind::DegenerateBatch:
        case ErrorKind::DuplicatePair:
        case ErrorKind::InvalidCuts:
            return kExitConfig;
        case ErrorKind::NumericInput:
        case ErrorKind::NonFinite:
            return kExitNumeric;
        case ErrorKind::Parse:
        case ErrorKind::Io:
            return kExitIo;
        case ErrorKind::InvalidState:
            return kExitOther;
    }
    return kExitOther;
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Named shortcuts for frequently changed keys; anything else goes through --set.
const std::vector<std::pair<std::string, std::string>>& shortcut_flags() {
    static const std::vector<std::pair<std::string, std::string>> flags{
        {"--tau", "loss.tau"},
        {"--lambda", "loss.lambda"},
        {"--gamma-mode", "loss.gamma_mode"},
        {"--neg-sampling-ratio", "loss.neg_sampling_ratio"},
        {"--epochs", "train.epochs"},
        {"--batch-size", "train.batch_size"},
        {"--lr", "train.learning_rate"},
        {"--seed", "train.seed"},
        {"--noise-rate", "regime.noise_rate"},
        {"--pattern", "regime.pattern"},
    };
    return flags;
}

struct Common {
    std::string config_file;
    std::string preset;
    std::vector<std::string> sets;
    std::string out_dir;
    std::string manifest;
    bool verify = false;
    bool neg_sampling = false;
    std::map<std::string, std::string> shortcut_values;
    std::vector<std::pair<std::string, CLI::Option*>> shortcut_options;
    CLI::Option* neg_sampling_option = nullptr;

    bool any_config_given() const {
        if (!config_file.empty() || !preset.empty() || !sets.empty() || neg_sampling_option->count() > 0) {
            return true;
        }
        for (const auto& [key, opt] : shortcut_options) {
            if (opt->count() > 0) return true;
        }
        return false;
    }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_file, "Config file of key = value lines");
    app->add_option("--preset", c.preset, "Hyperparameter preset: docred-like or redocred-like");
    app->add_option("--set", c.sets, "Override one key, e.g. --set loss.tau=0.5 (repeatable)");
    app->add_option("--out", c.out_dir, "Output directory (default: $PEMSCL_OUT_DIR or ./pemscl-out)");
    app->add_option("--manifest", c.manifest, "Re-run the experiment recorded in a manifest");
    app->add_flag("--verify", c.verify, "With --manifest: fail unless every metric matches");
    for (const auto& [flag, key] : shortcut_flags()) {
        c.shortcut_options.emplace_back(key, app->add_option(flag, c.shortcut_values[key], "Sets " + key));
    }
    c.neg_sampling_option =
        app->add_flag("--neg-sampling", c.neg_sampling, "Enable negative label sampling (loss.enable_neg_sampling)");
}

std::vector<std::uint64_t> parse_seed_list(const json& j) {
    std::vector<std::uint64_t> seeds = j.get<std::vector<std::uint64_t>>();
    require(!seeds.empty(), ErrorKind::Config, "--seeds must name at least one seed");
    return seeds;
}

struct Context {
    std::string subcommand;
    Settings settings;
    ExperimentConfig config;
    json args = json::object();
    fs::path out_dir;
    ExperimentManifest manifest;
    std::ostream* out = nullptr;
};

json config_echo(const Settings& s) {
    const json resolved = s.to_json();
    json j = json::object();
    for (const auto& [key, entry] : resolved.items()) j[key] = entry.at("value");
    return j;
}

Regime obtain_regime(Context& ctx) {
    const std::string dir = ctx.args.value("regime", "");
    if (!dir.empty()) {
        ctx.manifest.inputs["regime"] = dir;
        return load_regime(dir);
    }
    const GoldSplits gold = generate_synthetic_splits(ctx.config.data);
    return assemble_regime(gold, ctx.config.regime.noise_rate, ctx.config.regime.pattern, ctx.config.regime.seed);
}

std::vector<Bucket> buckets_if_feasible(const Corpus& train, const BucketCuts& cuts) {
    if (cuts.head_count + cuts.tail_count > train.vocabulary.size()) return {};
    return bucket_relations(train.vocabulary, cuts);
}

void record_outputs(Context& ctx, const std::vector<fs::path>& paths) {
    for (const fs::path& p : paths) ctx.manifest.outputs[p.filename().string()] = p.string();
}

json split_stats(const Corpus& c) {
    std::size_t positive = 0;
    for (const PairExample& ex : c.examples) positive += ex.is_na() ? 0 : 1;
    return {{"pairs", c.examples.size()},
            {"positive_pairs", positive},
            {"top10_share", top_relation_share(c, 10)},
            {"label_source", to_string(c.label_source)}};
}

json run_gen_data(Context& ctx) {
    const std::string train_path = ctx.args.value("docred_train", "");
    Regime regime;
    json extra;
    if (!train_path.empty()) {
        const std::string dev_path = ctx.args.value("docred_dev", "");
        const std::string test_path = ctx.args.value("docred_test", "");
        require(!dev_path.empty() && !test_path.empty(), ErrorKind::Config,
                "--docred-train needs --docred-dev and --docred-test");
        DocredOptions opts;
        opts.embedding_dim = ctx.config.data.embedding_dim;
        regime.train = load_docred_json(train_path, opts);
        opts.vocabulary = regime.train.vocabulary;
        regime.dev = load_docred_json(dev_path, opts);
        regime.test = load_docred_json(test_path, opts);
        const auto freq = count_relation_frequencies(regime.train);
        for (Corpus* c : {&regime.train, &regime.dev, &regime.test}) c->vocabulary.set_frequencies(freq);
        regime.kind = RegimeKind::OOO;
        regime.pattern = "OOO";
        ctx.manifest.inputs["docred_train"] = train_path;
        ctx.manifest.inputs["docred_dev"] = dev_path;
        ctx.manifest.inputs["docred_test"] = test_path;
        extra["source"] = "docred";
    } else {
        const GoldSplits gold = generate_synthetic_splits(ctx.config.data);
        const double rate = ctx.config.data.false_negative_rate;
        regime = assemble_regime(gold, rate, rate > 0.0 ? "OOO" : "GGG", ctx.config.data.seed);
        extra["source"] = "synthetic";
        extra["generator"] = to_json(ctx.config.data);
    }
    save_regime(regime, ctx.out_dir, extra);
    for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl", "regime.json"}) {
        ctx.manifest.outputs[name] = (ctx.out_dir / name).string();
    }
    json metrics = {{"train", split_stats(regime.train)},
                    {"dev", split_stats(regime.dev)},
                    {"test", split_stats(regime.test)}};
    *ctx.out << "gen-data: " << regime.train.examples.size() << "/" << regime.dev.examples.size() << "/"
             << regime.test.examples.size() << " pairs (train/dev/test), " << regime.train.vocabulary.size()
             << " relations, top-10 share " << fixed6(top_relation_share(regime.train)) << "\n";
    return metrics;
}

json run_build_regime(Context& ctx) {
    const std::string gold_dir = ctx.args.value("gold", "");
    GoldSplits gold;
    if (!gold_dir.empty()) {
        Regime loaded = load_regime(gold_dir);
        gold = {std::move(loaded.train), std::move(loaded.dev), std::move(loaded.test)};
        ctx.manifest.inputs["gold"] = gold_dir;
    } else {
        gold = generate_synthetic_splits(ctx.config.data);
    }
    const Regime regime =
        assemble_regime(gold, ctx.config.regime.noise_rate, ctx.config.regime.pattern, ctx.config.regime.seed);
    save_regime(regime, ctx.out_dir,
                {{"source", gold_dir.empty() ? "synthetic" : gold_dir}, {"generator", to_json(ctx.config.data)}});
    for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl", "regime.json"}) {
        ctx.manifest.outputs[name] = (ctx.out_dir / name).string();
    }
    *ctx.out << "build-regime: " << regime.pattern << " at noise " << fixed6(regime.noise_rate) << ", corrupted "
             << regime.corrupted_train << "/" << regime.corrupted_dev << "/" << regime.corrupted_test
             << " positive pairs (train/dev/test)\n";
    return {{"pattern", regime.pattern},
            {"noise_rate", regime.noise_rate},
            {"corrupted", {{"train", regime.corrupted_train}, {"dev", regime.corrupted_dev}, {"test", regime.corrupted_test}}},
            {"train", split_stats(regime.train)},
            {"dev", split_stats(regime.dev)},
            {"test", split_stats(regime.test)}};
}

json run_train(Context& ctx) {
    const Regime regime = obtain_regime(ctx);
    ctx.manifest.seeds = {ctx.config.train.seed};
    const TrainResult result = train(regime.train, &regime.dev, ctx.config.train);

    const fs::path ckpt = ctx.out_dir / "checkpoint.json";
    save_checkpoint(result.params, ckpt);
    ctx.manifest.outputs["checkpoint.json"] = ckpt.string();
    std::ostringstream history;
    json history_json = json::array();
    for (const EpochRecord& r : result.history) {
        history << to_json(r).dump() << "\n";
        history_json.push_back(to_json(r));
    }
    const fs::path hist = ctx.out_dir / "history.jsonl";
    write_text_file(hist, history.str());
    ctx.manifest.outputs["history.jsonl"] = hist.string();

    const FactSet facts = collect_facts(regime.train);
    const std::vector<Bucket> buckets = buckets_if_feasible(regime.train, ctx.config.cuts);
    EvalReport dev = evaluate(result.params, regime.dev, facts, buckets, default_label_view(regime.dev));
    EvalReport test = evaluate(result.params, regime.test, facts, buckets, default_label_view(regime.test));
    dev.config = test.config = config_echo(ctx.settings);
    record_outputs(ctx, emit_eval_reports({{"dev", dev}, {"test", test}}, regime.train.vocabulary, ctx.out_dir));

    *ctx.out << "train: best epoch " << result.best_epoch.value_or(0) + 1 << "/" << result.history.size()
             << ", dev F1 " << fixed6(dev.f1) << " (" << to_string(dev.view) << "), test F1 " << fixed6(test.f1)
             << " Ign-F1 " << fixed6(test.ign_f1) << " (" << to_string(test.view) << ")\n";
    return {{"best_epoch", result.best_epoch ? json(*result.best_epoch) : json(nullptr)},
            {"total_steps", result.total_steps},
            {"history", history_json},
            {"dev", to_json(dev, &regime.train.vocabulary)},
            {"test", to_json(test, &regime.train.vocabulary)}};
}

json run_eval(Context& ctx) {
    const std::string ckpt = ctx.args.value("checkpoint", "");
    require(!ckpt.empty(), ErrorKind::Config, "eval needs --checkpoint");
    ctx.manifest.inputs["checkpoint"] = ckpt;
    const HeadParams params = load_checkpoint(ckpt);
    const Regime regime = obtain_regime(ctx);
    const std::string split = ctx.args.value("split", "test");
    const Corpus* corpus = split == "train" ? &regime.train
                           : split == "dev" ? &regime.dev
                           : split == "test" ? &regime.test
                                             : nullptr;
    require(corpus != nullptr, ErrorKind::Config, "--split must be train, dev or test");
    require(params.logit_dim() == corpus->vocabulary.logit_dim() && params.input_dim() == corpus->embedding_dim,
            ErrorKind::Shape, "checkpoint shape does not match the corpus (relations or embedding size)");
    const std::string view_name = ctx.args.value("view", "default");
    LabelView view = default_label_view(*corpus);
    if (view_name == "gold") {
        view = LabelView::Gold;
    } else if (view_name == "observed") {
        view = LabelView::Observed;
    } else {
        require(view_name == "default", ErrorKind::Config, "--view must be default, gold or observed");
    }
    EvalReport report = evaluate(params, *corpus, collect_facts(regime.train),
                                 buckets_if_feasible(regime.train, ctx.config.cuts), view);
    report.config = config_echo(ctx.settings);
    record_outputs(ctx, emit_eval_reports({{split, report}}, regime.train.vocabulary, ctx.out_dir));
    *ctx.out << "eval: " << split << " (" << to_string(view) << ") P " << fixed6(report.precision) << " R "
             << fixed6(report.recall) << " F1 " << fixed6(report.f1) << " Ign-F1 " << fixed6(report.ign_f1) << "\n";
    return {{split, to_json(report, &regime.train.vocabulary)}};
}

json run_ablate(Context& ctx) {
    const Regime regime = obtain_regime(ctx);
    const std::vector<std::uint64_t> seeds = parse_seed_list(ctx.args.at("seeds"));
    ctx.manifest.seeds = seeds;
    std::set<AblationToggle> toggles;
    for (const std::string& t : ctx.args.at("toggles").get<std::vector<std::string>>()) {
        if (t == "em") {
            toggles.insert(AblationToggle::Em);
        } else if (t == "scl") {
            toggles.insert(AblationToggle::Scl);
        } else {
            fail(ErrorKind::Config, "unknown ablation toggle '" + t + "' (em, scl)");
        }
    }
    const std::vector<AblationRow> rows = run_ablation(regime, ctx.config.train, toggles, seeds, ctx.config.cuts);
    record_outputs(ctx, emit_ablation_reports(rows, ctx.out_dir));
    json metrics = json::array();
    for (const AblationRow& row : rows) {
        *ctx.out << "ablate: " << row.variant << " dev F1 " << fixed6(row.dev.f1) << " Ign-F1 "
                 << fixed6(row.dev.ign_f1) << " Head " << fixed6(row.dev.bucket(Bucket::Head)) << " Mid "
                 << fixed6(row.dev.bucket(Bucket::Mid)) << " Tail " << fixed6(row.dev.bucket(Bucket::Tail)) << "\n";
        metrics.push_back({{"variant", row.variant}, {"dev", to_json(row.dev)}});
    }
    return {{"variants", metrics}};
}

json run_sweep(Context& ctx) {
    const Regime regime = obtain_regime(ctx);
    const std::vector<std::uint64_t> seeds = parse_seed_list(ctx.args.at("seeds"));
    ctx.manifest.seeds = seeds;
    const std::vector<double> ratios = ctx.args.at("ratios").get<std::vector<double>>();
    require(!ratios.empty(), ErrorKind::Config, "--ratios must name at least one ratio");
    const std::vector<SweepPoint> points = sweep_sampling_ratio(regime, ctx.config.train, ratios, seeds);
    record_outputs(ctx, emit_sweep_reports(points, seeds.size(), ctx.out_dir));
    json metrics = json::array();
    for (const SweepPoint& p : points) {
        *ctx.out << "sweep-ratio: " << fixed6(p.ratio) << " noisy-dev F1 " << fixed6(p.noisy_dev.f1)
                 << " gold-dev F1 " << fixed6(p.gold_dev.f1) << " gold-test F1 " << fixed6(p.gold_test.f1) << "\n";
        metrics.push_back({{"ratio", p.ratio},
                           {"noisy_dev", to_json(p.noisy_dev)},
                           {"gold_dev", to_json(p.gold_dev)},
                           {"gold_test", to_json(p.gold_test)}});
    }
    return {{"points", metrics}};
}

json run_selftest(Context& ctx, bool& all_passed) {
    const auto seed = ctx.args.at("seed").get<std::uint64_t>();
    const auto instances = ctx.args.at("instances").get<std::size_t>();
    ctx.manifest.seeds = {seed};
    const std::vector<verify::SuiteResult> results{verify::run_gradient_checks(seed),
                                                   verify::run_oracle_equivalence(seed, instances),
                                                   verify::run_invariants(seed)};
    json metrics = json::object();
    all_passed = true;
    for (const verify::SuiteResult& r : results) {
        *ctx.out << "selftest: " << verify::summary_line(r) << "\n";
        for (const std::string& note : r.notes) *ctx.out << "  " << note << "\n";
        all_passed = all_passed && r.passed();
        metrics[r.name] = {{"checks", r.checks}, {"failures", r.failures}, {"worst", r.worst}};
    }
    *ctx.out << "selftest: " << (all_passed ? "all suites passed" : "FAILED") << "\n";
    return metrics;
}

fs::path default_out_dir() {
    if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
    return "pemscl-out";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"pemscl: pairwise moving-threshold loss with entropy minimization and supervised "
                 "contrastive learning for multi-label relation classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    Common common;
    struct {
        std::string docred_train, docred_dev, docred_test, gold, regime, checkpoint;
        std::string split = "test";
        std::string view = "default";
        std::vector<std::uint64_t> seeds{1, 2, 3};
        std::vector<std::string> toggles{"em", "scl"};
        std::vector<double> ratios{0.1, 0.5, 1.0};
        std::uint64_t selftest_seed = 1;
        std::size_t instances = 100;
    } a;

    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic corpus (or ingest DocRED files)");
    gen->add_option("--docred-train", a.docred_train, "DocRED-format train file");
    gen->add_option("--docred-dev", a.docred_dev, "DocRED-format dev file");
    gen->add_option("--docred-test", a.docred_test, "DocRED-format test file");
    auto* build = app.add_subcommand("build-regime", "Assemble an OOG/OGG/... regime bundle");
    build->add_option("--gold", a.gold, "Gold bundle from gen-data (default: generate from data.*)");
    auto* trn = app.add_subcommand("train", "Train the head and report dev/test metrics");
    auto* evl = app.add_subcommand("eval", "Score a checkpoint on one split");
    evl->add_option("--checkpoint", a.checkpoint, "Checkpoint written by train");
    evl->add_option("--split", a.split, "train, dev or test")->capture_default_str();
    evl->add_option("--view", a.view, "Label view: default, gold or observed")->capture_default_str();
    auto* abl = app.add_subcommand("ablate", "Full model against -em, -scl and -both");
    abl->add_option("--seeds", a.seeds, "Comma-separated seeds")->delimiter(',')->capture_default_str();
    abl->add_option("--toggles", a.toggles, "Components to remove: em,scl")->delimiter(',')->capture_default_str();
    auto* swp = app.add_subcommand("sweep-ratio", "Negative label sampling ratio sweep");
    swp->add_option("--seeds", a.seeds, "Comma-separated seeds")->delimiter(',')->capture_default_str();
    swp->add_option("--ratios", a.ratios, "Comma-separated ratios in (0, 1]")->delimiter(',')->capture_default_str();
    auto* self = app.add_subcommand("selftest", "Gradient-check, oracle-equivalence and invariant suites");
    self->add_option("--seed", a.selftest_seed, "Suite seed")->capture_default_str();
    self->add_option("--instances", a.instances, "Oracle-equivalence instances")->capture_default_str();

    for (CLI::App* sub : {trn, evl, abl, swp}) sub->add_option("--regime", a.regime, "Regime bundle directory");
    for (CLI::App* sub : {gen, build, trn, evl, abl, swp}) add_common(sub, common);
    self->add_option("--out", common.out_dir, "Output directory for the manifest");
    self->add_option("--manifest", common.manifest, "Re-run from a manifest");
    self->add_flag("--verify", common.verify, "With --manifest: fail unless every metric matches");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    Context ctx;
    ctx.subcommand = chosen->get_name();
    ctx.out = &out;
    const auto start = std::chrono::steady_clock::now();

    try {
        std::optional<ExperimentManifest> replay;
        if (!common.manifest.empty()) {
            if (chosen != self && common.any_config_given()) {
                err << "pemscl: usage error: --manifest cannot be combined with config options\n";
                return kExitUsage;
            }
            replay = load_manifest(common.manifest);
            require(replay->command == ctx.subcommand, ErrorKind::Config,
                    "manifest records '" + replay->command + "', not '" + ctx.subcommand + "'");
            ctx.settings.apply_json(replay->config, ValueSource::Manifest);
            ctx.args = replay->arguments;
        } else {
            if (chosen != self) {
                if (!common.preset.empty()) ctx.settings.apply_preset(common.preset);
                if (!common.config_file.empty()) ctx.settings.apply_file(common.config_file);
                for (const auto& [key, opt] : common.shortcut_options) {
                    if (opt->count() > 0) ctx.settings.set(key, common.shortcut_values.at(key), ValueSource::Flag);
                }
                if (common.neg_sampling_option->count() > 0) {
                    ctx.settings.set("loss.enable_neg_sampling", "true", ValueSource::Flag);
                }
                for (const std::string& kv : common.sets) {
                    const auto eq = kv.find('=');
                    require(eq != std::string::npos, ErrorKind::Config, "--set expects key=value, got '" + kv + "'");
                    ctx.settings.set(kv.substr(0, eq), kv.substr(eq + 1), ValueSource::Flag);
                }
            }
            if (chosen == gen) {
                ctx.args = {{"docred_train", a.docred_train}, {"docred_dev", a.docred_dev}, {"docred_test", a.docred_test}};
            } else if (chosen == build) {
                ctx.args = {{"gold", a.gold}};
            } else if (chosen == trn) {
                ctx.args = {{"regime", a.regime}};
            } else if (chosen == evl) {
                ctx.args = {{"regime", a.regime}, {"checkpoint", a.checkpoint}, {"split", a.split}, {"view", a.view}};
            } else if (chosen == abl) {
                ctx.args = {{"regime", a.regime}, {"seeds", a.seeds}, {"toggles", a.toggles}};
            } else if (chosen == swp) {
                ctx.args = {{"regime", a.regime}, {"seeds", a.seeds}, {"ratios", a.ratios}};
            } else {
                ctx.args = {{"seed", a.selftest_seed}, {"instances", a.instances}};
            }
        }
        ctx.config = ctx.settings.resolve();
        ctx.out_dir = common.out_dir.empty() ? default_out_dir() : fs::path(common.out_dir);

        ctx.manifest.command = ctx.subcommand;
        ctx.manifest.arguments = ctx.args;
        ctx.manifest.config = ctx.settings.to_json();

        json metrics;
        bool selftest_ok = true;
        if (chosen == gen) {
            metrics = run_gen_data(ctx);
        } else if (chosen == build) {
            metrics = run_build_regime(ctx);
        } else if (chosen == trn) {
            metrics = run_train(ctx);
        } else if (chosen == evl) {
            metrics = run_eval(ctx);
        } else if (chosen == abl) {
            metrics = run_ablate(ctx);
        } else if (chosen == swp) {
            metrics = run_sweep(ctx);
        } else {
            metrics = run_selftest(ctx, selftest_ok);
        }
        ctx.manifest.metrics = metrics;
        ctx.manifest.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const fs::path manifest_path = ctx.out_dir / "manifest.json";
        save_manifest(ctx.manifest, manifest_path);
        out << ctx.subcommand << ": wrote " << manifest_path.string() << "\n";

        if (replay && common.verify) {
            const std::vector<std::string> diffs = diff_metrics(replay->metrics, metrics);
            if (!diffs.empty()) {
                err << "pemscl: replay mismatch in " << diffs.size() << " metric(s), first: " << diffs.front() << "\n";
                return kExitOther;
            }
            out << ctx.subcommand << ": replay reproduced every recorded metric\n";
        }
        return selftest_ok ? kExitOk : kExitOther;
    } catch (const Error& e) {
        err << "pemscl: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const nlohmann::json::exception& e) {
        err << "pemscl: parse error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "pemscl: io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "pemscl: error: " << e.what() << "\n";
        return kExitOther;
    }
}

}  // namespace pemscl

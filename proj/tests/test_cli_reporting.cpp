#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "pemscl/cli.hpp"
#include "pemscl/config.hpp"
#include "pemscl/error.hpp"
#include "pemscl/io.hpp"
#include "pemscl/manifest.hpp"
#include "pemscl/report.hpp"

using namespace pemscl;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "pemscl");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pemscl-cli-" + name);
    fs::remove_all(p);
    return p;
}

const std::vector<std::string> kTiny{"--set", "data.num_relations=6",    "--set", "data.train_documents=8",
                                     "--set", "data.dev_documents=3",    "--set", "data.test_documents=3",
                                     "--set", "data.embedding_dim=8",    "--set", "model.hidden_dim=8",
                                     "--set", "model.group_count=2",     "--set", "eval.head_count=2",
                                     "--set", "eval.tail_count=2",       "--epochs", "2"};

std::vector<std::string> with_tiny(std::vector<std::string> args) {
    args.insert(args.end(), kTiny.begin(), kTiny.end());
    return args;
}

}  // namespace

TEST_CASE("settings precedence and provenance") {
    Settings s;
    CHECK(s.get("loss.tau").source == ValueSource::Default);
    s.apply_preset("redocred-like");
    CHECK(s.get("loss.tau").value == "0.2");
    CHECK(s.get("loss.tau").source == ValueSource::Preset);
    s.apply_text("# comment\n[loss]\ntau = 0.7\n", "inline");
    CHECK(s.get("loss.tau").value == "0.7");
    CHECK(s.get("loss.tau").source == ValueSource::File);
    s.set("loss.tau", "1.5", ValueSource::Flag);
    const ExperimentConfig c = s.resolve();
    CHECK(c.train.loss.tau == 1.5);
    CHECK(c.train.loss.gamma_mode == GammaMode::SetSize);

    Settings copy;
    copy.apply_json(s.to_json(), ValueSource::Manifest);
    CHECK(copy.to_text() == s.to_text());
    CHECK(copy.resolve().train.loss.lambda == c.train.loss.lambda);
}

TEST_CASE("settings reject bad input") {
    Settings s;
    CHECK_THROWS_AS(s.set("loss.nope", "1", ValueSource::Flag), Error);
    CHECK_THROWS_AS(s.set("train.epochs", "three", ValueSource::Flag), Error);
    CHECK_THROWS_AS(s.apply_preset("unknown"), Error);
    CHECK_THROWS_AS(s.apply_text("tau 0.5\n", "inline"), Error);
    s.set("loss.tau", "-1", ValueSource::Flag);
    CHECK_THROWS_AS(s.resolve(), Error);
    s.set("loss.tau", "1", ValueSource::Flag);
    s.set("train.grad_clip_norm", "none", ValueSource::Flag);
    CHECK_FALSE(s.resolve().train.grad_clip_norm.has_value());
    s.set("train.grad_clip_norm", "5", ValueSource::Flag);
    CHECK(s.resolve().train.grad_clip_norm == 5.0);
}

TEST_CASE("real values print in shortest round-trip form") {
    for (double v : {0.1, 1e-3, 2.0, 1.0 / 3.0, 6.02e23}) CHECK(std::stod(format_real(v)) == v);
    CHECK(format_real(0.1) == "0.1");
}

TEST_CASE("csv tables") {
    EvalReport r;
    r.precision = 0.5;
    r.recall = 0.25;
    r.f1 = 1.0 / 3.0;
    const CsvTable t = eval_table({{"dev", r}});
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("split,label_view,precision,recall,f1,ign_f1", 0) == 0);
    CHECK(csv.find("dev,gold,0.500000,0.250000,0.333333") != std::string::npos);
    CHECK(fixed6(2.0 / 3.0) == "0.666667");
}

TEST_CASE("manifest round trip and metric diff") {
    ExperimentManifest m;
    m.command = "train";
    m.arguments = {{"regime", "x"}};
    m.seeds = {1, 2};
    m.metrics = {{"f1", 0.1 + 0.2}, {"nested", {{"a", 1}, {"b", {1.0, 2.0}}}}};
    const fs::path dir = scratch("manifest");
    save_manifest(m, dir / "manifest.json");
    const ExperimentManifest back = load_manifest(dir / "manifest.json");
    CHECK(back.command == "train");
    CHECK(back.seeds == m.seeds);
    CHECK(diff_metrics(m.metrics, back.metrics).empty());

    nlohmann::json changed = m.metrics;
    changed["nested"]["b"][1] = std::nextafter(2.0, 3.0);
    const auto diffs = diff_metrics(m.metrics, changed);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].find("nested") != std::string::npos);
    write_text_file(dir / "broken.json", "{}");
    CHECK_THROWS_AS(load_manifest(dir / "broken.json"), Error);
    fs::remove_all(dir);
}

TEST_CASE("cli exit codes") {
    CHECK(run_cli({}).code == kExitUsage);
    CHECK(run_cli({"train", "--bogus"}).code == kExitUsage);
    CHECK(run_cli({"train", "--set", "loss.tau=-1", "--out", scratch("x").string()}).code == kExitConfig);
    CHECK(run_cli({"train", "--set", "nonsense", "--out", scratch("x").string()}).code == kExitConfig);
    CHECK(run_cli({"train", "--regime", "/nonexistent/dir", "--out", scratch("x").string()}).code == kExitIo);
    CHECK(run_cli({"train", "--manifest", "/nonexistent/manifest.json"}).code == kExitIo);
    CHECK(exit_code_for(ErrorKind::NonFinite) == kExitNumeric);
    CHECK(exit_code_for(ErrorKind::Parse) == kExitIo);
    CHECK(exit_code_for(ErrorKind::InvalidCuts) == kExitConfig);
}

TEST_CASE("cli pipeline with replay") {
    const fs::path root = scratch("pipeline");
    const std::string gold = (root / "gold").string();
    const std::string reg = (root / "regime").string();
    const std::string tr = (root / "train").string();

    REQUIRE(run_cli(with_tiny({"gen-data", "--out", gold})).code == 0);
    CHECK(fs::exists(root / "gold" / "train.jsonl"));
    REQUIRE(run_cli(with_tiny({"build-regime", "--gold", gold, "--out", reg})).code == 0);
    const Run t = run_cli(with_tiny({"train", "--regime", reg, "--out", tr, "--preset", "docred-like"}));
    REQUIRE(t.code == 0);
    for (const char* f : {"checkpoint.json", "history.jsonl", "eval.csv", "eval.json", "manifest.json"}) {
        CHECK(fs::exists(root / "train" / f));
    }

    const ExperimentManifest m = load_manifest(root / "train" / "manifest.json");
    CHECK(m.command == "train");
    CHECK(m.config.at("loss.tau").at("source") == "preset");
    CHECK(m.config.at("train.epochs").at("source") == "flag");
    CHECK(m.inputs.at("regime") == reg);

    const Run replay = run_cli({"train", "--manifest", (root / "train" / "manifest.json").string(), "--verify",
                                "--out", (root / "replay").string()});
    CHECK(replay.code == 0);
    CHECK(replay.out.find("reproduced") != std::string::npos);
    CHECK(run_cli({"train", "--manifest", (root / "train" / "manifest.json").string(), "--tau", "3"}).code ==
          kExitUsage);
    CHECK(run_cli({"eval", "--manifest", (root / "train" / "manifest.json").string()}).code == kExitConfig);

    const Run ev = run_cli(with_tiny({"eval", "--checkpoint", (root / "train" / "checkpoint.json").string(),
                                      "--regime", reg, "--split", "dev", "--view", "gold", "--out",
                                      (root / "eval").string()}));
    CHECK(ev.code == 0);
    CHECK(run_cli(with_tiny({"eval", "--checkpoint", (root / "train" / "checkpoint.json").string(), "--regime",
                             reg, "--split", "nope", "--out", (root / "eval").string()}))
              .code == kExitConfig);
    fs::remove_all(root);
}

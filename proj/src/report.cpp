#include "pemscl/report.hpp"

#include <cstdio>
#include <sstream>

#include "pemscl/error.hpp"
#include "pemscl/io.hpp"

namespace pemscl {

namespace {

const MeanMetrics& split_of(const SweepPoint& p, const std::string& split) {
    if (split == "noisy_dev") return p.noisy_dev;
    if (split == "gold_dev") return p.gold_dev;
    if (split == "gold_test") return p.gold_test;
    fail(ErrorKind::Contract, "unknown sweep split '" + split + "'");
}

std::filesystem::path write(const std::filesystem::path& dir, const std::string& name,
                            const std::string& text) {
    const std::filesystem::path path = dir / name;
    write_text_file(path, text);
    return path;
}

}  // namespace

std::string fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::string CsvTable::to_csv() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << "\n";
    };
    line(header);
    for (const auto& row : rows) line(row);
    return out.str();
}

nlohmann::json to_json(const MeanMetrics& m) {
    return {{"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
            {"ign_f1", m.ign_f1},
            {"bucket_f1",
             {{"Head", m.bucket(Bucket::Head)}, {"Mid", m.bucket(Bucket::Mid)}, {"Tail", m.bucket(Bucket::Tail)}}}};
}

CsvTable eval_table(const std::vector<NamedReport>& reports) {
    CsvTable t;
    t.header = {"split", "label_view", "precision", "recall", "f1", "ign_f1", "head_f1", "mid_f1",
                "tail_f1", "predicted", "gold", "true_positive", "excluded_predictions"};
    for (const NamedReport& n : reports) {
        const EvalReport& r = n.report;
        t.rows.push_back({n.split, to_string(r.view), fixed6(r.precision), fixed6(r.recall),
                          fixed6(r.f1), fixed6(r.ign_f1),
                          r.has_buckets ? fixed6(r.bucket(Bucket::Head)) : "",
                          r.has_buckets ? fixed6(r.bucket(Bucket::Mid)) : "",
                          r.has_buckets ? fixed6(r.bucket(Bucket::Tail)) : "",
                          std::to_string(r.predicted_triple_count), std::to_string(r.gold_triple_count),
                          std::to_string(r.true_positive_count),
                          std::to_string(r.excluded_prediction_count)});
    }
    return t;
}

CsvTable ablation_table(const std::vector<AblationRow>& rows) {
    CsvTable t;
    t.header = {"variant", "seeds", "ign_f1", "f1", "precision", "recall", "head_f1", "mid_f1", "tail_f1"};
    for (const AblationRow& row : rows) {
        const MeanMetrics& m = row.dev;
        t.rows.push_back({row.variant, std::to_string(row.per_seed.size()), fixed6(m.ign_f1),
                          fixed6(m.f1), fixed6(m.precision), fixed6(m.recall),
                          fixed6(m.bucket(Bucket::Head)), fixed6(m.bucket(Bucket::Mid)),
                          fixed6(m.bucket(Bucket::Tail))});
    }
    return t;
}

CsvTable sweep_table(const std::vector<SweepPoint>& points, std::size_t seeds, const std::string& split) {
    CsvTable t;
    t.header = {"ratio", "seeds", "precision", "recall", "f1", "ign_f1"};
    for (const SweepPoint& p : points) {
        const MeanMetrics& m = split_of(p, split);
        t.rows.push_back({fixed6(p.ratio), std::to_string(seeds), fixed6(m.precision),
                          fixed6(m.recall), fixed6(m.f1), fixed6(m.ign_f1)});
    }
    return t;
}

std::vector<std::filesystem::path> emit_eval_reports(const std::vector<NamedReport>& reports,
                                                     const RelationVocabulary& vocabulary,
                                                     const std::filesystem::path& out_dir) {
    require(!reports.empty(), ErrorKind::Contract, "no evaluation reports to emit");
    std::vector<std::filesystem::path> paths;
    paths.push_back(write(out_dir, "eval.csv", eval_table(reports).to_csv()));
    nlohmann::json summary = nlohmann::json::object();
    for (const NamedReport& n : reports) summary[n.split] = to_json(n.report, &vocabulary);
    paths.push_back(write(out_dir, "eval.json", summary.dump(2) + "\n"));
    return paths;
}

std::vector<std::filesystem::path> emit_ablation_reports(const std::vector<AblationRow>& rows,
                                                         const std::filesystem::path& out_dir) {
    require(!rows.empty(), ErrorKind::Contract, "no ablation rows to emit");
    std::vector<std::filesystem::path> paths;
    paths.push_back(write(out_dir, "ablation.csv", ablation_table(rows).to_csv()));

    std::ostringstream dat;
    dat << "# variant f1 head_f1 mid_f1 tail_f1\n";
    for (const AblationRow& row : rows) {
        dat << row.variant << " " << fixed6(row.dev.f1) << " " << fixed6(row.dev.bucket(Bucket::Head))
            << " " << fixed6(row.dev.bucket(Bucket::Mid)) << " "
            << fixed6(row.dev.bucket(Bucket::Tail)) << "\n";
    }
    paths.push_back(write(out_dir, "ablation.dat", dat.str()));

    nlohmann::json summary;
    summary["table"] = "ablation";
    summary["split"] = "dev";
    for (const AblationRow& row : rows) {
        nlohmann::json per_seed = nlohmann::json::array();
        for (const EvalReport& r : row.per_seed) per_seed.push_back(to_json(r, nullptr));
        summary["variants"].push_back({{"variant", row.variant}, {"mean", to_json(row.dev)}, {"per_seed", per_seed}});
    }
    paths.push_back(write(out_dir, "summary.json", summary.dump(2) + "\n"));
    return paths;
}

std::vector<std::filesystem::path> emit_sweep_reports(const std::vector<SweepPoint>& points,
                                                      std::size_t seeds,
                                                      const std::filesystem::path& out_dir) {
    require(!points.empty(), ErrorKind::Contract, "no sweep points to emit");
    std::vector<std::filesystem::path> paths;
    for (const std::string& split : sweep_splits()) {
        paths.push_back(write(out_dir, "sweep_" + split + ".csv", sweep_table(points, seeds, split).to_csv()));
        std::ostringstream dat;
        dat << "# ratio f1 (" << split << ")\n";
        for (const SweepPoint& p : points) dat << fixed6(p.ratio) << " " << fixed6(split_of(p, split).f1) << "\n";
        paths.push_back(write(out_dir, "sweep_" + split + ".dat", dat.str()));
    }
    nlohmann::json summary;
    summary["table"] = "sampling-ratio sweep";
    summary["seeds"] = seeds;
    for (const SweepPoint& p : points) {
        summary["points"].push_back({{"ratio", p.ratio},
                                     {"noisy_dev", to_json(p.noisy_dev)},
                                     {"gold_dev", to_json(p.gold_dev)},
                                     {"gold_test", to_json(p.gold_test)}});
    }
    paths.push_back(write(out_dir, "summary.json", summary.dump(2) + "\n"));
    return paths;
}

}  // namespace pemscl

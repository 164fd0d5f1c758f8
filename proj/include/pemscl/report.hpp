#pragma once
// Tabular and plot-data output for evaluations, ablations and ratio sweeps.
//
// Column orders (reals are fixed-point with six decimals):
//   eval.csv      split,label_view,precision,recall,f1,ign_f1,head_f1,mid_f1,tail_f1,
//                 predicted,gold,true_positive,excluded_predictions
//   ablation.csv  variant,seeds,ign_f1,f1,precision,recall,head_f1,mid_f1,tail_f1
//   sweep_<split>.csv  ratio,seeds,precision,recall,f1,ign_f1
// Plot-data (.dat) files are whitespace separated with a '#' header line.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pemscl/experiments.hpp"
#include "pemscl/metrics.hpp"

namespace pemscl {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

std::string fixed6(double value);

struct NamedReport {
    std::string split;
    EvalReport report;
};

CsvTable eval_table(const std::vector<NamedReport>& reports);
CsvTable ablation_table(const std::vector<AblationRow>& rows);
/// One table per evaluation split: noisy_dev, gold_dev, gold_test.
CsvTable sweep_table(const std::vector<SweepPoint>& points, std::size_t seeds,
                     const std::string& split);

inline const std::vector<std::string>& sweep_splits() {
    static const std::vector<std::string> names{"noisy_dev", "gold_dev", "gold_test"};
    return names;
}

/// Each function writes its files under `out_dir` and returns the paths
/// written, in order. Throws Io when a file cannot be written and Contract
/// when given nothing to report.
std::vector<std::filesystem::path> emit_eval_reports(const std::vector<NamedReport>& reports,
                                                     const RelationVocabulary& vocabulary,
                                                     const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> emit_ablation_reports(const std::vector<AblationRow>& rows,
                                                         const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> emit_sweep_reports(const std::vector<SweepPoint>& points,
                                                      std::size_t seeds,
                                                      const std::filesystem::path& out_dir);

nlohmann::json to_json(const MeanMetrics& m);

}  // namespace pemscl

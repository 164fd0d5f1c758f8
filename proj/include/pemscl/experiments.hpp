#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <set>
#include <string>
#include <vector>

#include "pemscl/data.hpp"
#include "pemscl/metrics.hpp"
#include "pemscl/train.hpp"

namespace pemscl {

/// Seed-averaged metrics of one evaluation split.
struct MeanMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double ign_f1 = 0.0;
    std::array<double, 3> bucket_f1{};

    double bucket(Bucket b) const { return bucket_f1[static_cast<std::size_t>(b)]; }
};

MeanMetrics mean_of(std::span<const EvalReport> reports);

enum class AblationToggle { Em, Scl };

struct AblationRow {
    std::string variant;  // full, -em, -scl, -both
    MeanMetrics dev;
    std::vector<EvalReport> per_seed;
};

/// Full model plus every removal combination of `toggles`, each trained once
/// per seed and scored on the regime's dev split with frequency buckets.
std::vector<AblationRow> run_ablation(const Regime& regime, const TrainConfig& base,
                                      const std::set<AblationToggle>& toggles,
                                      const std::vector<std::uint64_t>& seeds, BucketCuts cuts);

struct SweepPoint {
    double ratio = 1.0;
    MeanMetrics noisy_dev;
    MeanMetrics gold_dev;
    MeanMetrics gold_test;
};

/// One model per (ratio, seed) trained with negative label sampling at that
/// ratio; scored on dev with observed labels, dev with gold labels and test
/// with gold labels.
std::vector<SweepPoint> sweep_sampling_ratio(const Regime& regime, const TrainConfig& base,
                                             const std::vector<double>& ratios,
                                             const std::vector<std::uint64_t>& seeds);

/// Trains with `config` under each seed and scores the gold test split.
MeanMetrics mean_test_f1(const Regime& regime, const TrainConfig& config,
                         const std::vector<std::uint64_t>& seeds);

}  // namespace pemscl

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "pemscl/batch.hpp"
#include "pemscl/head.hpp"
#include "pemscl/loss.hpp"
#include "pemscl/metrics.hpp"

namespace pemscl {

struct AdamWConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
};

/// Adam with bias correction and decoupled weight decay. Decay applies to the
/// weight matrices, not to b_o.
class AdamW {
public:
    AdamW(const HeadParams& like, AdamWConfig config);

    void step(HeadParams& params, const HeadGradients& grads, double learning_rate);
    std::size_t steps() const { return steps_; }

private:
    AdamWConfig config_;
    HeadParams m_;
    HeadParams v_;
    std::size_t steps_ = 0;
};

double gradient_norm(const HeadGradients& grads);
void scale_gradients(HeadGradients& grads, double factor);

struct ModelConfig {
    std::size_t hidden_dim = 32;
    std::size_t group_count = 4;
};

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 4;  // documents
    double learning_rate = 1e-3;
    double warmup_ratio = 0.06;
    AdamWConfig optimizer;
    std::optional<double> grad_clip_norm;
    std::uint64_t seed = 7;
    ResampleSchedule resample = ResampleSchedule::PerEpoch;
    /// Keep the epoch with the best dev F1; otherwise keep the last epoch.
    bool select_best_on_dev = true;
    ModelConfig model;
    LossConfig loss;

    void validate() const;
};

/// Linear warmup over the first warmup_ratio of all steps, then constant.
double learning_rate_at(const TrainConfig& config, std::size_t step, std::size_t total_steps);

struct EpochRecord {
    std::size_t epoch = 0;
    LossParts parts;
    double total = 0.0;
    std::size_t steps = 0;
    std::optional<Prf> dev;
    double dev_ign_f1 = 0.0;
};

struct TrainResult {
    HeadParams params;
    HeadParams initial;
    std::vector<EpochRecord> history;
    std::optional<std::size_t> best_epoch;
    std::size_t total_steps = 0;
};

/// Deterministic given config.seed. `dev` may be null (no model selection).
TrainResult train(const Corpus& train_corpus, const Corpus* dev, const TrainConfig& config);

nlohmann::json to_json(const EpochRecord& record);

}  // namespace pemscl

#include "pemscl/train.hpp"

#include <cmath>
#include <sstream>

#include "pemscl/error.hpp"

namespace pemscl {

namespace {

template <typename Fn>
void for_each_tensor(HeadParams& a, const HeadParams& b, Fn&& fn) {
    fn(a.w_h, b.w_h, true);
    fn(a.w_t, b.w_t, true);
    fn(a.w_c1, b.w_c1, true);
    fn(a.w_c2, b.w_c2, true);
    fn(a.w_o, b.w_o, true);
}

}  // namespace

AdamW::AdamW(const HeadParams& like, AdamWConfig config)
    : config_(config),
      m_(HeadParams::zeros(like.input_dim(), like.hidden_dim(), like.group_count, like.logit_dim())),
      v_(m_) {}

void AdamW::step(HeadParams& params, const HeadGradients& grads, double lr) {
    ++steps_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    auto update = [&](auto& p, const auto& g, auto& m, auto& v, bool decay) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        if (decay && config_.weight_decay != 0.0) p *= (1.0 - lr * config_.weight_decay);
        p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon);
    };
    update(params.w_h, grads.w_h, m_.w_h, v_.w_h, true);
    update(params.w_t, grads.w_t, m_.w_t, v_.w_t, true);
    update(params.w_c1, grads.w_c1, m_.w_c1, v_.w_c1, true);
    update(params.w_c2, grads.w_c2, m_.w_c2, v_.w_c2, true);
    update(params.w_o, grads.w_o, m_.w_o, v_.w_o, true);
    update(params.b_o, grads.b_o, m_.b_o, v_.b_o, false);
}

double gradient_norm(const HeadGradients& g) {
    return std::sqrt(g.w_h.squaredNorm() + g.w_t.squaredNorm() + g.w_c1.squaredNorm() +
                     g.w_c2.squaredNorm() + g.w_o.squaredNorm() + g.b_o.squaredNorm());
}

void scale_gradients(HeadGradients& g, double factor) {
    for_each_tensor(g, g, [&](Matrix& m, const Matrix&, bool) { m *= factor; });
    g.b_o *= factor;
}

void TrainConfig::validate() const {
    require(epochs >= 1, ErrorKind::Config, "train.epochs must be >= 1");
    require(batch_size >= 2, ErrorKind::Config, "train.batch_size must be >= 2");
    require(std::isfinite(learning_rate) && learning_rate > 0.0, ErrorKind::Config,
            "train.learning_rate must be > 0");
    require(warmup_ratio >= 0.0 && warmup_ratio < 1.0, ErrorKind::Config,
            "train.warmup_ratio must be in [0, 1)");
    require(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0 && optimizer.beta2 >= 0.0 &&
                optimizer.beta2 < 1.0,
            ErrorKind::Config, "train.beta1/train.beta2 must be in [0, 1)");
    require(optimizer.epsilon > 0.0, ErrorKind::Config, "train.epsilon must be > 0");
    require(optimizer.weight_decay >= 0.0, ErrorKind::Config, "train.weight_decay must be >= 0");
    require(!grad_clip_norm || *grad_clip_norm > 0.0, ErrorKind::Config,
            "train.grad_clip_norm must be > 0 when set");
    require(model.group_count >= 1 && model.hidden_dim % model.group_count == 0, ErrorKind::Config,
            "model.hidden_dim must be divisible by model.group_count");
    loss.validate();
}

double learning_rate_at(const TrainConfig& config, std::size_t step, std::size_t total_steps) {
    const auto warmup = static_cast<std::size_t>(config.warmup_ratio * static_cast<double>(total_steps));
    if (warmup == 0 || step >= warmup) return config.learning_rate;
    return config.learning_rate * static_cast<double>(step + 1) / static_cast<double>(warmup);
}

TrainResult train(const Corpus& corpus, const Corpus* dev, const TrainConfig& config) {
    config.validate();
    corpus.validate();
    require(corpus.embedding_dim > 0, ErrorKind::Shape, "training corpus has no embedding dimension");

    TrainResult result;
    result.initial = HeadParams::initialize(corpus.embedding_dim, config.model.hidden_dim,
                                            config.model.group_count, corpus.vocabulary.logit_dim(),
                                            config.seed);
    HeadParams params = result.initial;
    result.params = params;
    if (corpus.examples.empty()) return result;

    AdamW optimizer(params, config.optimizer);
    HeadGradients grads = HeadParams::zeros(params.input_dim(), params.hidden_dim(),
                                            params.group_count, params.logit_dim());
    const FactSet train_facts = dev ? collect_facts(corpus) : FactSet{};
    const LabelView dev_view = dev ? default_label_view(*dev) : LabelView::Gold;

    std::size_t step = 0;
    std::size_t total_steps = 0;
    double best_f1 = -1.0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<Batch> batches =
            assemble_batches(corpus, config.batch_size, mix64(config.seed) ^ epoch);
        if (total_steps == 0) total_steps = batches.size() * config.epochs;

        EpochRecord record;
        record.epoch = epoch;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            Batch& batch = batches[b];
            if (config.loss.enable_neg_sampling) {
                const std::uint64_t round = config.resample == ResampleSchedule::Once      ? 0
                                            : config.resample == ResampleSchedule::PerEpoch ? epoch
                                                                                            : step;
                attach_negative_samples(batch, corpus, config.loss.neg_sampling_ratio, config.seed,
                                        round);
            }
            std::vector<PairForward> forwards;
            std::vector<LabelSet> positives;
            forwards.reserve(batch.size());
            positives.reserve(batch.size());
            for (std::size_t idx : batch.example_indices) {
                forwards.push_back(head_forward(corpus.examples[idx], params));
                positives.push_back(corpus.examples[idx].positive_relations);
            }
            const BatchLossOutput out = batch_loss(batch, positives, forwards, config.loss);
            if (!std::isfinite(out.total)) {
                std::ostringstream msg;
                msg << "non-finite loss at epoch " << epoch << ", batch " << b << " (pmt "
                    << out.parts.pmt << ", em " << out.parts.em << ", scl " << out.parts.scl
                    << ", lt " << out.parts.lt << ", sampled_neg " << out.parts.sampled_neg << ")";
                fail(ErrorKind::NonFinite, msg.str());
            }

            grads.w_h.setZero();
            grads.w_t.setZero();
            grads.w_c1.setZero();
            grads.w_c2.setZero();
            grads.w_o.setZero();
            grads.b_o.setZero();
            for (std::size_t i = 0; i < batch.size(); ++i) {
                accumulate_head_gradients(forwards[i], out.grad_embeddings[i], out.grad_logits[i],
                                          params, grads);
            }
            if (config.grad_clip_norm) {
                const double norm = gradient_norm(grads);
                if (norm > *config.grad_clip_norm) scale_gradients(grads, *config.grad_clip_norm / norm);
            }
            optimizer.step(params, grads, learning_rate_at(config, step, total_steps));
            ++step;

            record.parts.pmt += out.parts.pmt;
            record.parts.em += out.parts.em;
            record.parts.scl += out.parts.scl;
            record.parts.lt += out.parts.lt;
            record.parts.sampled_neg += out.parts.sampled_neg;
            record.total += out.total;
            ++record.steps;
        }

        if (dev) {
            const EvalReport report = evaluate(params, *dev, train_facts, {}, dev_view);
            record.dev = Prf{report.precision, report.recall, report.f1};
            record.dev_ign_f1 = report.ign_f1;
            if (!config.select_best_on_dev || report.f1 > best_f1) {
                best_f1 = report.f1;
                result.params = params;
                result.best_epoch = epoch;
            }
        } else {
            result.params = params;
            result.best_epoch = epoch;
        }
        result.history.push_back(record);
    }
    result.total_steps = step;
    return result;
}

nlohmann::json to_json(const EpochRecord& r) {
    nlohmann::json j;
    j["epoch"] = r.epoch;
    j["steps"] = r.steps;
    j["loss"] = {{"total", r.total},
                 {"pmt", r.parts.pmt},
                 {"em", r.parts.em},
                 {"scl", r.parts.scl},
                 {"lt", r.parts.lt},
                 {"sampled_neg", r.parts.sampled_neg}};
    if (r.dev) {
        j["dev"] = {{"precision", r.dev->precision},
                    {"recall", r.dev->recall},
                    {"f1", r.dev->f1},
                    {"ign_f1", r.dev_ign_f1}};
    } else {
        j["dev"] = nullptr;
    }
    return j;
}

}  // namespace pemscl

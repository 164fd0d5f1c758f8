#pragma once

// Loss terms and their analytic gradients.
//
// Logit vectors hold |R| relation scores followed by the threshold score f_eta
// (last element). Every function that takes an optional `grad` span adds its
// gradient into it; pass an empty span to skip gradient work.

#include <span>
#include <string>
#include <vector>

#include "pemscl/batch.hpp"
#include "pemscl/head.hpp"
#include "pemscl/relation.hpp"

namespace pemscl {

enum class GammaMode { Unit, SetSize };

const char* to_string(GammaMode mode);
GammaMode parse_gamma_mode(const std::string& text);

struct LossConfig {
    double tau = 2.0;
    double lambda = 2.0;
    GammaMode gamma_mode = GammaMode::Unit;
    double neg_sampling_ratio = 0.1;
    bool enable_em = true;
    bool enable_scl = true;
    bool enable_neg_sampling = false;

    /// Throws Config naming the offending field.
    void validate() const;
};

struct PairwiseProbs {
    double p_r;
    double p_eta;
};

/// log(1 + exp(x)) without overflow.
double softplus(double x);

PairwiseProbs pairwise_probs(double f_r, double f_eta);

double pmt_loss(std::span<const double> logits, const LabelSet& positives,
                const LabelSet& negatives, std::span<double> grad = {});

double pair_entropy(double f_r, double f_eta);
/// dH/df_r; dH/df_eta is its negation.
double pair_entropy_slope(double f_r, double f_eta);

double em_loss(std::span<const double> logits, const LabelSet& positives, const LabelSet& negatives,
               const LossConfig& config, std::span<double> grad = {});

double scl_loss(std::size_t anchor, std::span<const Vector> embeddings,
                const std::vector<std::size_t>& positives, double tau,
                std::span<Vector> grad = {});

double lt_loss(std::size_t anchor, std::span<const Vector> embeddings, double tau,
               std::span<Vector> grad = {});

struct ContrastiveParts {
    double scl = 0.0;
    double lt = 0.0;
    double total() const { return scl + lt; }
};

/// Sum over B_P anchors of the supervised contrastive term (|S| > 0) or the
/// long-tail term (|S| = 0). NA members only appear in denominators.
ContrastiveParts l2_loss(const Batch& batch, std::span<const Vector> embeddings, double tau,
                         std::span<Vector> grad = {});

/// Sampled-negative objective for one NA example: -log P_eta(r) plus the
/// entropy term (when enabled) over the sampled set.
double sampled_negative_loss(std::span<const double> logits, const LabelSet& sampled,
                             const LabelSet& negatives, const LossConfig& config,
                             std::span<double> grad = {});

struct LossParts {
    double pmt = 0.0;
    double em = 0.0;
    double scl = 0.0;
    double lt = 0.0;
    double sampled_neg = 0.0;
};

struct BatchLossOutput {
    double total = 0.0;
    LossParts parts;
    std::vector<Vector> grad_logits;      // per batch position
    std::vector<Vector> grad_embeddings;  // per batch position, w.r.t. x_unit
};

/// `positives[i]` and `forwards[i]` belong to batch position i.
BatchLossOutput batch_loss(const Batch& batch, std::span<const LabelSet> positives,
                           std::span<const PairForward> forwards, const LossConfig& config);

}  // namespace pemscl

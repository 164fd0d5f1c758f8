#include "pemscl/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pemscl/error.hpp"

namespace pemscl {

const char* to_string(GammaMode mode) {
    return mode == GammaMode::Unit ? "unit" : "set-size";
}

GammaMode parse_gamma_mode(const std::string& text) {
    if (text == "unit" || text == "Unit") return GammaMode::Unit;
    if (text == "set-size" || text == "SetSize" || text == "set_size") return GammaMode::SetSize;
    fail(ErrorKind::Config, "unknown gamma mode '" + text + "' (unit|set-size)");
}

void LossConfig::validate() const {
    require(std::isfinite(tau) && tau > 0.0, ErrorKind::Config,
            "loss.tau must be > 0, got " + std::to_string(tau));
    require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::Config,
            "loss.lambda must be >= 0, got " + std::to_string(lambda));
    require(neg_sampling_ratio > 0.0 && neg_sampling_ratio <= 1.0, ErrorKind::Config,
            "loss.neg_sampling_ratio must be in (0, 1], got " + std::to_string(neg_sampling_ratio));
}

double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

namespace {

void check_finite(double a, double b) {
    require(std::isfinite(a) && std::isfinite(b), ErrorKind::NumericInput,
            "non-finite logit (" + std::to_string(a) + ", " + std::to_string(b) + ")");
}

}  // namespace

PairwiseProbs pairwise_probs(double f_r, double f_eta) {
    check_finite(f_r, f_eta);
    const double gap = f_r - f_eta;
    if (gap >= 0.0) {
        const double e = std::exp(-gap);
        return {1.0 / (1.0 + e), e / (1.0 + e)};
    }
    const double e = std::exp(gap);
    return {e / (1.0 + e), 1.0 / (1.0 + e)};
}

double pair_entropy(double f_r, double f_eta) {
    const PairwiseProbs p = pairwise_probs(f_r, f_eta);
    const double gap = f_r - f_eta;
    // -log p_r = softplus(-gap), -log p_eta = softplus(gap); a zero probability
    // contributes exactly 0.
    const double a = p.p_r > 0.0 ? p.p_r * softplus(-gap) : 0.0;
    const double b = p.p_eta > 0.0 ? p.p_eta * softplus(gap) : 0.0;
    return a + b;
}

double pair_entropy_slope(double f_r, double f_eta) {
    const PairwiseProbs p = pairwise_probs(f_r, f_eta);
    return (f_eta - f_r) * p.p_r * p.p_eta;
}

namespace {

struct ThresholdTerms {
    double pmt = 0.0;
    double em = 0.0;
};

void check_label_sets(std::size_t logit_dim, const LabelSet& positives, const LabelSet& negatives) {
    require(logit_dim >= 1, ErrorKind::Shape, "empty logit vector");
    const std::size_t na = logit_dim - 1;
    for (const LabelSet* set : {&positives, &negatives}) {
        for (RelationIndex r : *set) {
            require(r != na, ErrorKind::InvalidLabel, "the threshold class cannot be a label");
            require(r < na, ErrorKind::InvalidLabel,
                    "relation " + std::to_string(r) + " outside logit vector of size " +
                        std::to_string(logit_dim));
        }
    }
    require(!intersects(positives, negatives), ErrorKind::InvalidLabel,
            "positive and negative label sets overlap");
}

double gamma_for(GammaMode mode, std::size_t set_size) {
    return mode == GammaMode::Unit ? 1.0 : static_cast<double>(set_size);
}

// Shared by pmt_loss, em_loss, sampled_negative_loss and batch_loss so that
// the full-set and sampled objectives agree bit for bit at ratio 1.
ThresholdTerms threshold_terms(std::span<const double> f, const LabelSet& positives,
                               const LabelSet& negatives, double gamma1, double gamma2,
                               bool with_pmt, bool with_em, std::span<double> grad) {
    const std::size_t na = f.size() - 1;
    const double f_eta = f[na];
    const bool want_grad = !grad.empty();
    if (want_grad) {
        require(grad.size() == f.size(), ErrorKind::Shape, "gradient span size mismatch");
    }

    double pos_loss = 0.0;
    double pos_entropy = 0.0;
    for (RelationIndex r : positives) {
        check_finite(f[r], f_eta);
        const PairwiseProbs p = pairwise_probs(f[r], f_eta);
        if (with_pmt) pos_loss += softplus(f_eta - f[r]);
        if (with_em) pos_entropy += pair_entropy(f[r], f_eta);
        if (want_grad) {
            double g = 0.0;
            if (with_pmt) g -= p.p_eta;
            if (with_em) g += (f_eta - f[r]) * p.p_r * p.p_eta / gamma1;
            grad[r] += g;
            grad[na] -= g;
        }
    }
    double neg_loss = 0.0;
    double neg_entropy = 0.0;
    for (RelationIndex r : negatives) {
        check_finite(f[r], f_eta);
        const PairwiseProbs p = pairwise_probs(f[r], f_eta);
        if (with_pmt) neg_loss += softplus(f[r] - f_eta);
        if (with_em) neg_entropy += pair_entropy(f[r], f_eta);
        if (want_grad) {
            double g = 0.0;
            if (with_pmt) g += p.p_r;
            if (with_em) g += (f_eta - f[r]) * p.p_r * p.p_eta / gamma2;
            grad[r] += g;
            grad[na] -= g;
        }
    }

    ThresholdTerms out;
    out.pmt = pos_loss + neg_loss;
    const double pos_em = positives.empty() ? 0.0 : pos_entropy / gamma1;
    const double neg_em = negatives.empty() ? 0.0 : neg_entropy / gamma2;
    out.em = pos_em + neg_em;
    return out;
}

}  // namespace

double pmt_loss(std::span<const double> logits, const LabelSet& positives,
                const LabelSet& negatives, std::span<double> grad) {
    check_label_sets(logits.size(), positives, negatives);
    return threshold_terms(logits, positives, negatives, 1.0, 1.0, true, false, grad).pmt;
}

double em_loss(std::span<const double> logits, const LabelSet& positives, const LabelSet& negatives,
               const LossConfig& config, std::span<double> grad) {
    check_label_sets(logits.size(), positives, negatives);
    return threshold_terms(logits, positives, negatives,
                           gamma_for(config.gamma_mode, positives.size()),
                           gamma_for(config.gamma_mode, negatives.size()), false, true, grad)
        .em;
}

double sampled_negative_loss(std::span<const double> logits, const LabelSet& sampled,
                             const LabelSet& negatives, const LossConfig& config,
                             std::span<double> grad) {
    require(!sampled.empty(), ErrorKind::InvalidSample, "sampled negative set is empty");
    require(std::includes(negatives.begin(), negatives.end(), sampled.begin(), sampled.end()),
            ErrorKind::InvalidSample, "sampled relation is not a negative of the example");
    check_label_sets(logits.size(), {}, sampled);
    const ThresholdTerms t =
        threshold_terms(logits, {}, sampled, 1.0, gamma_for(config.gamma_mode, sampled.size()),
                        true, config.enable_em, grad);
    return t.pmt + (config.enable_em ? t.em : 0.0);
}

namespace {

void check_contrast_inputs(std::size_t anchor, std::span<const Vector> embeddings,
                           std::span<Vector> grad) {
    require(embeddings.size() >= 2, ErrorKind::DegenerateBatch,
            "contrastive terms need a batch of >= 2, got " + std::to_string(embeddings.size()));
    require(anchor < embeddings.size(), ErrorKind::Shape, "anchor index out of range");
    require(grad.empty() || grad.size() == embeddings.size(), ErrorKind::Shape,
            "embedding gradient span size mismatch");
}

double log_sum_exp(const std::vector<double>& values) {
    double shift = -std::numeric_limits<double>::infinity();
    for (double v : values) shift = std::max(shift, v);
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - shift);
    return shift + std::log(sum);
}

// Applies dL/ds_d for s_d = x_anchor . x_d.
void scatter_similarity_grad(std::size_t anchor, std::span<const Vector> embeddings,
                             const std::vector<double>& slope, std::span<Vector> grad) {
    for (std::size_t d = 0; d < embeddings.size(); ++d) {
        if (d == anchor || slope[d] == 0.0) continue;
        grad[anchor] += slope[d] * embeddings[d];
        grad[d] += slope[d] * embeddings[anchor];
    }
}

}  // namespace

double scl_loss(std::size_t anchor, std::span<const Vector> embeddings,
                const std::vector<std::size_t>& positives, double tau, std::span<Vector> grad) {
    check_contrast_inputs(anchor, embeddings, grad);
    require(!positives.empty(), ErrorKind::Contract,
            "scl_loss needs a non-empty positive set; empty sets take the long-tail term");
    require(tau > 0.0, ErrorKind::Config, "tau must be > 0");

    const std::size_t n = embeddings.size();
    std::vector<double> logits(n, 0.0);
    std::vector<double> denom_terms;
    denom_terms.reserve(n - 1);
    for (std::size_t d = 0; d < n; ++d) {
        if (d == anchor) continue;
        logits[d] = embeddings[anchor].dot(embeddings[d]) / tau;
        denom_terms.push_back(logits[d]);
    }
    std::vector<double> numer_terms;
    numer_terms.reserve(positives.size());
    for (std::size_t p : positives) {
        require(p < n && p != anchor, ErrorKind::Contract,
                "positive index " + std::to_string(p) + " is the anchor or out of range");
        numer_terms.push_back(logits[p]);
    }
    const double lse_denom = log_sum_exp(denom_terms);
    const double lse_numer = log_sum_exp(numer_terms);
    const double loss =
        -(lse_numer - std::log(static_cast<double>(positives.size()))) + lse_denom;

    if (!grad.empty()) {
        std::vector<double> slope(n, 0.0);
        for (std::size_t d = 0; d < n; ++d) {
            if (d != anchor) slope[d] = std::exp(logits[d] - lse_denom) / tau;
        }
        for (std::size_t p : positives) {
            slope[p] -= std::exp(logits[p] - lse_numer) / tau;
        }
        scatter_similarity_grad(anchor, embeddings, slope, grad);
    }
    return loss;
}

double lt_loss(std::size_t anchor, std::span<const Vector> embeddings, double tau,
               std::span<Vector> grad) {
    check_contrast_inputs(anchor, embeddings, grad);
    require(tau > 0.0, ErrorKind::Config, "tau must be > 0");
    const std::size_t n = embeddings.size();
    std::vector<double> logits(n, 0.0);
    std::vector<double> terms;
    terms.reserve(n - 1);
    for (std::size_t d = 0; d < n; ++d) {
        if (d == anchor) continue;
        logits[d] = embeddings[anchor].dot(embeddings[d]) / tau;
        terms.push_back(logits[d]);
    }
    const double lse = log_sum_exp(terms);
    if (!grad.empty()) {
        std::vector<double> slope(n, 0.0);
        for (std::size_t d = 0; d < n; ++d) {
            if (d != anchor) slope[d] = std::exp(logits[d] - lse) / tau;
        }
        scatter_similarity_grad(anchor, embeddings, slope, grad);
    }
    return lse;
}

ContrastiveParts l2_loss(const Batch& batch, std::span<const Vector> embeddings, double tau,
                         std::span<Vector> grad) {
    require(embeddings.size() == batch.size(), ErrorKind::Shape,
            "embedding count does not match batch size");
    ContrastiveParts parts;
    // A single-member batch has no contrast members at all.
    if (batch.size() < 2) return parts;
    for (std::size_t anchor : batch.bp_indices) {
        auto it = batch.s_sets.find(anchor);
        require(it != batch.s_sets.end(), ErrorKind::Contract,
                "batch has no positive set for anchor " + std::to_string(anchor));
        if (it->second.empty()) {
            parts.lt += lt_loss(anchor, embeddings, tau, grad);
        } else {
            parts.scl += scl_loss(anchor, embeddings, it->second, tau, grad);
        }
    }
    return parts;
}

BatchLossOutput batch_loss(const Batch& batch, std::span<const LabelSet> positives,
                           std::span<const PairForward> forwards, const LossConfig& config) {
    config.validate();
    const std::size_t n = batch.size();
    require(positives.size() == n && forwards.size() == n, ErrorKind::Shape,
            "batch_loss inputs misaligned: batch " + std::to_string(n) + ", labels " +
                std::to_string(positives.size()) + ", forwards " + std::to_string(forwards.size()));

    BatchLossOutput out;
    out.grad_logits.reserve(n);
    out.grad_embeddings.reserve(n);
    std::vector<bool> is_na(n, false);
    for (std::size_t pos : batch.bn_indices) is_na.at(pos) = true;

    double threshold_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vector& f = forwards[i].f;
        require(i == 0 || f.size() == forwards[0].f.size(), ErrorKind::Shape,
                "logit vectors differ in length within a batch");
        const std::size_t num_relations = static_cast<std::size_t>(f.size()) - 1;
        require(is_na[i] == positives[i].empty(), ErrorKind::Shape,
                "batch NA membership disagrees with labels at position " + std::to_string(i));
        out.grad_logits.push_back(Vector::Zero(f.size()));
        out.grad_embeddings.push_back(Vector::Zero(forwards[i].x_unit.size()));
        std::span<double> grad(out.grad_logits.back().data(), static_cast<std::size_t>(f.size()));
        std::span<const double> logits(f.data(), static_cast<std::size_t>(f.size()));

        const bool sampled = config.enable_neg_sampling && is_na[i];
        const LabelSet negatives = complement(positives[i], num_relations);
        double value = 0.0;
        if (sampled) {
            auto it = batch.sampled_negatives.find(i);
            require(it != batch.sampled_negatives.end(), ErrorKind::Contract,
                    "negative sampling enabled but position " + std::to_string(i) +
                        " has no sampled labels");
            value = sampled_negative_loss(logits, it->second, negatives, config, grad);
            out.parts.sampled_neg += value;
        } else {
            check_label_sets(logits.size(), positives[i], negatives);
            const ThresholdTerms t = threshold_terms(
                logits, positives[i], negatives, gamma_for(config.gamma_mode, positives[i].size()),
                gamma_for(config.gamma_mode, negatives.size()), true, config.enable_em, grad);
            value = t.pmt + (config.enable_em ? t.em : 0.0);
            out.parts.pmt += t.pmt;
            if (config.enable_em) out.parts.em += t.em;
        }
        threshold_total += value;
    }

    double contrastive = 0.0;
    if (config.enable_scl && config.lambda != 0.0) {
        std::vector<Vector> embeddings;
        embeddings.reserve(n);
        for (const PairForward& fw : forwards) embeddings.push_back(fw.x_unit);
        std::vector<Vector> grad_unit(n, Vector::Zero(embeddings.empty() ? 0 : embeddings[0].size()));
        const ContrastiveParts parts = l2_loss(batch, embeddings, config.tau, grad_unit);
        out.parts.scl = parts.scl;
        out.parts.lt = parts.lt;
        contrastive = parts.total();
        for (std::size_t i = 0; i < n; ++i) {
            out.grad_embeddings[i] += config.lambda * grad_unit[i];
        }
    }
    out.total = threshold_total + config.lambda * contrastive;
    return out;
}

}  // namespace pemscl

#pragma once

// Group-bilinear classification head.
//
//   h_e  = logsumexp over the entity's mention embeddings (componentwise)
//   z_h  = tanh(W_h h_head + W_c1 c)        z_t = tanh(W_t h_tail + W_c2 c)
//   x    = concat over groups p of flatten(z_h^p (outer) z_t^p)
//   f    = W_o x + b_o
//
// Logits use the raw pair embedding x; the contrastive loss consumes
// x_unit = x / |x|.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pemscl/relation.hpp"

namespace pemscl {

struct HeadParams {
    Matrix w_h;   // d1 x d
    Matrix w_t;   // d1 x d
    Matrix w_c1;  // d1 x d
    Matrix w_c2;  // d1 x d
    Matrix w_o;   // (|R|+1) x d_x
    Vector b_o;   // |R|+1
    std::size_t group_count = 1;

    std::size_t input_dim() const { return static_cast<std::size_t>(w_h.cols()); }
    std::size_t hidden_dim() const { return static_cast<std::size_t>(w_h.rows()); }
    std::size_t pair_dim() const { return static_cast<std::size_t>(w_o.cols()); }
    std::size_t logit_dim() const { return static_cast<std::size_t>(w_o.rows()); }

    /// Shape and finiteness checks; throws Shape / NonFinite.
    void validate() const;

    /// Zero tensors with the shapes implied by the arguments.
    static HeadParams zeros(std::size_t input_dim, std::size_t hidden_dim, std::size_t group_count,
                            std::size_t logit_dim);

    /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per matrix, b_o = 0.
    static HeadParams initialize(std::size_t input_dim, std::size_t hidden_dim,
                                 std::size_t group_count, std::size_t logit_dim,
                                 std::uint64_t seed);

    bool operator==(const HeadParams& other) const;
};

/// Gradient container with the same layout as HeadParams.
using HeadGradients = HeadParams;

struct PoolResult {
    Vector pooled;
    std::vector<Vector> weights;  // softmax weight of each mention, per component
};

Vector logsumexp_pool(std::span<const Vector> mention_embeddings);
PoolResult logsumexp_pool_with_weights(std::span<const Vector> mention_embeddings);

struct ForwardCache {
    std::vector<Vector> head_pool_weights;
    std::vector<Vector> tail_pool_weights;
    Vector head_entity;
    Vector tail_entity;
    Vector context;
    Vector z_h;
    Vector z_t;
    double x_norm = 0.0;
};

struct PairForward {
    Vector x;
    Vector x_unit;
    Vector f;
    std::optional<ForwardCache> cache;
};

PairForward head_forward(const PairExample& example, const HeadParams& params);

struct HeadBackward {
    HeadGradients params;
    std::vector<Vector> head_mentions;
    std::vector<Vector> tail_mentions;
    Vector context;
};

/// Gradients of a scalar objective given its gradients w.r.t. x_unit and f.
HeadBackward head_backward(const PairForward& forward, const Vector& grad_x_unit,
                           const Vector& grad_f, const HeadParams& params);

/// Adds the parameter gradients of one example into `accum` (same shapes).
void accumulate_head_gradients(const PairForward& forward, const Vector& grad_x_unit,
                               const Vector& grad_f, const HeadParams& params,
                               HeadGradients& accum);

}  // namespace pemscl

#include "pemscl/head.hpp"

#include <cmath>
#include <iostream>

#include "pemscl/error.hpp"
#include "pemscl/rng.hpp"

namespace pemscl {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
    require(m.rows() == rows && m.cols() == cols, ErrorKind::Shape,
            std::string(name) + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

void fill_uniform(Matrix& m, double bound, CounterRng rng) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = rng.uniform(-bound, bound);
    }
}

using ConstMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

void HeadParams::validate() const {
    const Eigen::Index d = w_h.cols();
    const Eigen::Index d1 = w_h.rows();
    require(group_count >= 1, ErrorKind::Shape, "group_count must be >= 1");
    require(d1 % static_cast<Eigen::Index>(group_count) == 0, ErrorKind::Shape,
            "hidden dim " + std::to_string(d1) + " not divisible by group count " +
                std::to_string(group_count));
    const Eigen::Index dx = d1 * d1 / static_cast<Eigen::Index>(group_count);
    check_shape(w_t, d1, d, "W_t");
    check_shape(w_c1, d1, d, "W_c1");
    check_shape(w_c2, d1, d, "W_c2");
    check_shape(w_o, w_o.rows(), dx, "W_o");
    require(b_o.size() == w_o.rows(), ErrorKind::Shape, "b_o length does not match W_o rows");
    require(all_finite(w_h) && all_finite(w_t) && all_finite(w_c1) && all_finite(w_c2) &&
                all_finite(w_o) && b_o.allFinite(),
            ErrorKind::NonFinite, "head parameters contain NaN or Inf");
}

HeadParams HeadParams::zeros(std::size_t input_dim, std::size_t hidden_dim,
                             std::size_t group_count, std::size_t logit_dim) {
    require(group_count >= 1 && hidden_dim % group_count == 0, ErrorKind::Shape,
            "hidden dim " + std::to_string(hidden_dim) + " not divisible by group count " +
                std::to_string(group_count));
    const auto d = static_cast<Eigen::Index>(input_dim);
    const auto d1 = static_cast<Eigen::Index>(hidden_dim);
    const auto dx = static_cast<Eigen::Index>(hidden_dim * hidden_dim / group_count);
    HeadParams p;
    p.w_h = Matrix::Zero(d1, d);
    p.w_t = Matrix::Zero(d1, d);
    p.w_c1 = Matrix::Zero(d1, d);
    p.w_c2 = Matrix::Zero(d1, d);
    p.w_o = Matrix::Zero(static_cast<Eigen::Index>(logit_dim), dx);
    p.b_o = Vector::Zero(static_cast<Eigen::Index>(logit_dim));
    p.group_count = group_count;
    return p;
}

HeadParams HeadParams::initialize(std::size_t input_dim, std::size_t hidden_dim,
                                  std::size_t group_count, std::size_t logit_dim,
                                  std::uint64_t seed) {
    HeadParams p = zeros(input_dim, hidden_dim, group_count, logit_dim);
    const CounterRng root(seed, 0, "head-init");
    const double in_bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(p.pair_dim()));
    fill_uniform(p.w_h, in_bound, root.split(0));
    fill_uniform(p.w_t, in_bound, root.split(1));
    fill_uniform(p.w_c1, in_bound, root.split(2));
    fill_uniform(p.w_c2, in_bound, root.split(3));
    fill_uniform(p.w_o, out_bound, root.split(4));
    return p;
}

bool HeadParams::operator==(const HeadParams& other) const {
    return group_count == other.group_count && w_h == other.w_h && w_t == other.w_t &&
           w_c1 == other.w_c1 && w_c2 == other.w_c2 && w_o == other.w_o && b_o == other.b_o;
}

PoolResult logsumexp_pool_with_weights(std::span<const Vector> mentions) {
    require(!mentions.empty(), ErrorKind::EmptyMentions, "logsumexp pooling needs >= 1 mention");
    const Eigen::Index d = mentions.front().size();
    Vector shift = mentions.front();
    for (const Vector& m : mentions) {
        require(m.size() == d, ErrorKind::Shape,
                "mention dimension " + std::to_string(m.size()) + " != " + std::to_string(d));
        shift = shift.cwiseMax(m);
    }
    PoolResult out;
    out.weights.reserve(mentions.size());
    Vector total = Vector::Zero(d);
    for (const Vector& m : mentions) {
        out.weights.push_back((m - shift).array().exp().matrix());
        total += out.weights.back();
    }
    for (Vector& w : out.weights) {
        w = w.cwiseQuotient(total);
    }
    out.pooled = shift + total.array().log().matrix();
    return out;
}

Vector logsumexp_pool(std::span<const Vector> mentions) {
    return logsumexp_pool_with_weights(mentions).pooled;
}

namespace {

std::vector<Vector> embeddings_of(const std::vector<Mention>& mentions) {
    std::vector<Vector> out;
    out.reserve(mentions.size());
    for (const Mention& m : mentions) out.push_back(m.embedding);
    return out;
}

}  // namespace

PairForward head_forward(const PairExample& example, const HeadParams& params) {
    const auto d = static_cast<Eigen::Index>(params.input_dim());
    require(example.context.size() == d, ErrorKind::Shape,
            "context dimension " + std::to_string(example.context.size()) +
                " does not match head input dimension " + std::to_string(d));

    PoolResult head_pool = logsumexp_pool_with_weights(embeddings_of(example.head_mentions));
    PoolResult tail_pool = logsumexp_pool_with_weights(embeddings_of(example.tail_mentions));
    require(head_pool.pooled.size() == d && tail_pool.pooled.size() == d, ErrorKind::Shape,
            "mention dimension does not match head input dimension " + std::to_string(d));

    ForwardCache cache;
    cache.z_h = (params.w_h * head_pool.pooled + params.w_c1 * example.context).array().tanh().matrix();
    cache.z_t = (params.w_t * tail_pool.pooled + params.w_c2 * example.context).array().tanh().matrix();

    const auto d1 = static_cast<Eigen::Index>(params.hidden_dim());
    const auto groups = static_cast<Eigen::Index>(params.group_count);
    const Eigen::Index g = d1 / groups;

    PairForward out;
    out.x.resize(d1 * g);
    for (Eigen::Index p = 0; p < groups; ++p) {
        for (Eigen::Index i = 0; i < g; ++i) {
            const double zh = cache.z_h[p * g + i];
            for (Eigen::Index j = 0; j < g; ++j) {
                out.x[p * g * g + i * g + j] = zh * cache.z_t[p * g + j];
            }
        }
    }
    out.f = params.w_o * out.x + params.b_o;

    cache.x_norm = out.x.norm();
    if (cache.x_norm > 0.0) {
        out.x_unit = out.x / cache.x_norm;
    } else {
#ifndef NDEBUG
        static bool warned = false;
        if (!warned) {
            std::cerr << "pemscl: zero pair embedding, unit embedding set to 0\n";
            warned = true;
        }
#endif
        out.x_unit = Vector::Zero(out.x.size());
    }

    cache.head_pool_weights = std::move(head_pool.weights);
    cache.tail_pool_weights = std::move(tail_pool.weights);
    cache.head_entity = std::move(head_pool.pooled);
    cache.tail_entity = std::move(tail_pool.pooled);
    cache.context = example.context;
    out.cache = std::move(cache);
    return out;
}

namespace {

struct CoreGrads {
    Vector grad_x;
    Vector pre_h;  // gradient at the tanh input of z_h
    Vector pre_t;
};

CoreGrads backprop_core(const PairForward& forward, const Vector& grad_x_unit, const Vector& grad_f,
                        const HeadParams& params) {
    require(forward.cache.has_value(), ErrorKind::InvalidState,
            "head_backward called on a forward result without cached intermediates");
    const ForwardCache& c = *forward.cache;
    require(grad_f.size() == params.w_o.rows(), ErrorKind::Shape, "grad_f length mismatch");
    require(grad_x_unit.size() == forward.x.size(), ErrorKind::Shape, "grad_x_unit length mismatch");

    CoreGrads out;
    out.grad_x = params.w_o.transpose() * grad_f;
    if (c.x_norm > 0.0) {
        // Jacobian of x / |x| is (I - u u^T) / |x|.
        const double along = forward.x_unit.dot(grad_x_unit);
        out.grad_x += (grad_x_unit - along * forward.x_unit) / c.x_norm;
    }

    const auto d1 = static_cast<Eigen::Index>(params.hidden_dim());
    const auto groups = static_cast<Eigen::Index>(params.group_count);
    const Eigen::Index g = d1 / groups;
    Vector grad_zh = Vector::Zero(d1);
    Vector grad_zt = Vector::Zero(d1);
    for (Eigen::Index p = 0; p < groups; ++p) {
        const ConstMap block(out.grad_x.data() + p * g * g, g, g);
        grad_zh.segment(p * g, g) = block * c.z_t.segment(p * g, g);
        grad_zt.segment(p * g, g) = block.transpose() * c.z_h.segment(p * g, g);
    }
    out.pre_h = grad_zh.cwiseProduct((1.0 - c.z_h.array().square()).matrix());
    out.pre_t = grad_zt.cwiseProduct((1.0 - c.z_t.array().square()).matrix());
    return out;
}

}  // namespace

void accumulate_head_gradients(const PairForward& forward, const Vector& grad_x_unit,
                               const Vector& grad_f, const HeadParams& params,
                               HeadGradients& accum) {
    const CoreGrads core = backprop_core(forward, grad_x_unit, grad_f, params);
    const ForwardCache& c = *forward.cache;
    accum.w_o.noalias() += grad_f * forward.x.transpose();
    accum.b_o += grad_f;
    accum.w_h.noalias() += core.pre_h * c.head_entity.transpose();
    accum.w_c1.noalias() += core.pre_h * c.context.transpose();
    accum.w_t.noalias() += core.pre_t * c.tail_entity.transpose();
    accum.w_c2.noalias() += core.pre_t * c.context.transpose();
}

HeadBackward head_backward(const PairForward& forward, const Vector& grad_x_unit,
                           const Vector& grad_f, const HeadParams& params) {
    HeadBackward out;
    out.params = HeadParams::zeros(params.input_dim(), params.hidden_dim(), params.group_count,
                                   params.logit_dim());
    accumulate_head_gradients(forward, grad_x_unit, grad_f, params, out.params);

    const CoreGrads core = backprop_core(forward, grad_x_unit, grad_f, params);
    const ForwardCache& c = *forward.cache;
    const Vector grad_head_entity = params.w_h.transpose() * core.pre_h;
    const Vector grad_tail_entity = params.w_t.transpose() * core.pre_t;
    out.context = params.w_c1.transpose() * core.pre_h + params.w_c2.transpose() * core.pre_t;
    for (const Vector& w : c.head_pool_weights) {
        out.head_mentions.push_back(grad_head_entity.cwiseProduct(w));
    }
    for (const Vector& w : c.tail_pool_weights) {
        out.tail_mentions.push_back(grad_tail_entity.cwiseProduct(w));
    }
    return out;
}

}  // namespace pemscl

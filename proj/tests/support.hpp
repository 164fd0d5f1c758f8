#pragma once

#include <cmath>

#include "pemscl/data.hpp"
#include "pemscl/train.hpp"

namespace pemscl::test {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline SyntheticConfig tiny_data(std::uint64_t seed = 3) {
    SyntheticConfig c;
    c.num_relations = 8;
    c.train_documents = 12;
    c.dev_documents = 4;
    c.test_documents = 4;
    c.min_pairs_per_document = 4;
    c.max_pairs_per_document = 8;
    c.embedding_dim = 8;
    c.entity_pool_size = 60;
    c.seed = seed;
    return c;
}

inline TrainConfig tiny_train() {
    TrainConfig t;
    t.epochs = 3;
    t.learning_rate = 0.01;
    t.model.hidden_dim = 8;
    t.model.group_count = 2;
    return t;
}

inline Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

}  // namespace pemscl::test

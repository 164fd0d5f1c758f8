#pragma once
// Direct-evaluation reference for the batch objective. Works on plain
// std::vector data in long double, builds B_P, B_N and S from the labels
// itself, and evaluates each probability and entropy from its defining
// exponential form. Intended for tiny instances only (no overflow guards).

#include <cstddef>
#include <map>
#include <vector>

namespace pemscl::verify {

struct OracleInstance {
    std::size_t num_relations = 0;
    std::vector<std::vector<double>> logits;      // per example, |R|+1 with f_eta last
    std::vector<std::vector<double>> embeddings;  // per example, unit length
    std::vector<std::vector<std::size_t>> positives;
    std::map<std::size_t, std::vector<std::size_t>> sampled;  // NA position -> N'
    double tau = 1.0;
    double lambda = 1.0;
    bool gamma_set_size = false;
    bool enable_em = true;
    bool enable_scl = true;
    bool enable_neg_sampling = false;
};

struct OracleParts {
    long double pmt = 0.0L;
    long double em = 0.0L;
    long double scl = 0.0L;
    long double lt = 0.0L;
    long double sampled_neg = 0.0L;
    long double total = 0.0L;
};

OracleParts oracle_batch_loss(const OracleInstance& instance);

}  // namespace pemscl::verify

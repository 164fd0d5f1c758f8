#include "pemscl/verify/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace pemscl::verify {

namespace {

using Real = long double;

Real prob_relation(Real f_r, Real f_eta) { return std::exp(f_r) / (std::exp(f_r) + std::exp(f_eta)); }
Real prob_threshold(Real f_r, Real f_eta) { return std::exp(f_eta) / (std::exp(f_r) + std::exp(f_eta)); }

Real entropy(Real f_r, Real f_eta) {
    const Real pr = prob_relation(f_r, f_eta);
    const Real pe = prob_threshold(f_r, f_eta);
    Real h = 0.0L;
    if (pr > 0.0L) h -= pr * std::log(pr);
    if (pe > 0.0L) h -= pe * std::log(pe);
    return h;
}

Real dot(const std::vector<double>& a, const std::vector<double>& b) {
    Real s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<Real>(a[i]) * static_cast<Real>(b[i]);
    return s;
}

bool shares_label(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    for (std::size_t r : a) {
        if (std::find(b.begin(), b.end(), r) != b.end()) return true;
    }
    return false;
}

}  // namespace

OracleParts oracle_batch_loss(const OracleInstance& in) {
    OracleParts out;
    const std::size_t n = in.logits.size();
    const std::size_t eta = in.num_relations;

    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double>& f = in.logits[i];
        const std::vector<std::size_t>& pos = in.positives[i];
        std::vector<std::size_t> neg;
        for (std::size_t r = 0; r < in.num_relations; ++r) {
            if (std::find(pos.begin(), pos.end(), r) == pos.end()) neg.push_back(r);
        }
        const bool is_na = pos.empty();

        if (is_na && in.enable_neg_sampling) {
            // L' = sum over N' of -log P_eta(r) + (1/gamma2) sum over N' of H(r)
            const std::vector<std::size_t>& sub = in.sampled.at(i);
            Real nll = 0.0L;
            Real ent = 0.0L;
            for (std::size_t r : sub) {
                nll += -std::log(prob_threshold(f[r], f[eta]));
                ent += entropy(f[r], f[eta]);
            }
            const Real gamma2 = in.gamma_set_size ? static_cast<Real>(sub.size()) : 1.0L;
            Real term = nll;
            if (in.enable_em) term += ent / gamma2;
            out.sampled_neg += term;
            continue;
        }

        // L_pmt = -sum_P log P_r(r) - sum_N log P_eta(r)
        Real pmt = 0.0L;
        for (std::size_t r : pos) pmt += -std::log(prob_relation(f[r], f[eta]));
        for (std::size_t r : neg) pmt += -std::log(prob_threshold(f[r], f[eta]));
        out.pmt += pmt;

        if (in.enable_em) {
            Real hp = 0.0L;
            Real hn = 0.0L;
            for (std::size_t r : pos) hp += entropy(f[r], f[eta]);
            for (std::size_t r : neg) hn += entropy(f[r], f[eta]);
            const Real gamma1 = in.gamma_set_size ? static_cast<Real>(pos.size()) : 1.0L;
            const Real gamma2 = in.gamma_set_size ? static_cast<Real>(neg.size()) : 1.0L;
            if (!pos.empty()) out.em += hp / gamma1;
            if (!neg.empty()) out.em += hn / gamma2;
        }
    }

    if (in.enable_scl && n >= 2) {
        const Real tau = in.tau;
        for (std::size_t a = 0; a < n; ++a) {
            if (in.positives[a].empty()) continue;  // anchors come from B_P only
            Real denom = 0.0L;
            for (std::size_t d = 0; d < n; ++d) {
                if (d != a) denom += std::exp(dot(in.embeddings[a], in.embeddings[d]) / tau);
            }
            std::vector<std::size_t> s_set;
            for (std::size_t p = 0; p < n; ++p) {
                if (p != a && shares_label(in.positives[a], in.positives[p])) s_set.push_back(p);
            }
            if (s_set.empty()) {
                out.lt += std::log(denom);
            } else {
                Real avg = 0.0L;
                for (std::size_t p : s_set) avg += std::exp(dot(in.embeddings[a], in.embeddings[p]) / tau) / denom;
                avg /= static_cast<Real>(s_set.size());
                out.scl += -std::log(avg);
            }
        }
    }

    out.total = out.pmt + out.em + out.sampled_neg;
    if (in.enable_scl) out.total += static_cast<Real>(in.lambda) * (out.scl + out.lt);
    return out;
}

}  // namespace pemscl::verify

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "pemscl/batch.hpp"
#include "pemscl/head.hpp"
#include "pemscl/loss.hpp"
#include "pemscl/rng.hpp"
#include "pemscl/verify/suites.hpp"

namespace pemscl::verify {

void SuiteResult::record(bool ok, double error, const std::string& what) {
    ++checks;
    worst = std::max(worst, error);
    if (!ok) {
        ++failures;
        if (notes.size() < 8) notes.push_back(what);
    }
}

std::string summary_line(const SuiteResult& r) {
    std::ostringstream out;
    out << r.name << ": " << (r.passed() ? "PASS" : "FAIL") << " (" << r.checks << " checks, "
        << r.failures << " failures, worst " << r.worst << ", " << r.seconds << " s)";
    return out.str();
}

namespace {

// Five-point central difference of `eval` with respect to `x`.
double central_difference(const std::function<double()>& eval, double& x) {
    const double h = 1e-3 * std::max(1.0, std::abs(x));
    const double x0 = x;
    x = x0 + 2 * h;
    const double f2 = eval();
    x = x0 + h;
    const double f1 = eval();
    x = x0 - h;
    const double fm1 = eval();
    x = x0 - 2 * h;
    const double fm2 = eval();
    x = x0;
    return (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * h);
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double scale = std::max(std::sqrt(na), std::sqrt(nb));
    return scale < 1e-8 ? std::sqrt(diff) : std::sqrt(diff) / scale;
}

// Collects analytic and numeric gradients for a set of scalar slots.
struct GradCheck {
    std::vector<double> analytic;
    std::vector<double> numeric;

    void add(double a, const std::function<double()>& eval, double& slot) {
        analytic.push_back(a);
        numeric.push_back(central_difference(eval, slot));
    }
    double error() const { return relative_error(analytic, numeric); }
};

void check(SuiteResult& suite, const GradCheck& g, const std::string& label) {
    const double err = g.error();
    std::ostringstream what;
    what << label << ": relative error " << err;
    suite.record(std::isfinite(err) && err < kGradientTolerance, err, what.str());
}

std::vector<double> random_logits(CounterRng& rng, std::size_t n, double scale) {
    std::vector<double> f(n);
    for (double& v : f) v = scale * rng.normal();
    return f;
}

Vector random_unit(CounterRng& rng, std::size_t dim) {
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    return v / v.norm();
}

LabelSet random_subset(CounterRng& rng, const LabelSet& pool, std::size_t k) {
    LabelSet items = pool;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(items.size() - i));
        std::swap(items[i], items[j]);
    }
    items.resize(k);
    return make_label_set(std::move(items));
}

LabelSet iota_set(std::size_t n) {
    LabelSet s(n);
    std::iota(s.begin(), s.end(), std::size_t{0});
    return s;
}

std::string describe(const char* term, std::size_t p, std::size_t n, double scale) {
    std::ostringstream out;
    out << term << " |P|=" << p << " |N|=" << n << " scale=" << scale;
    return out.str();
}

// Logit-space terms over every (|P|, |N|) combination and logit scale.
void check_logit_terms(SuiteResult& suite, CounterRng& rng) {
    const std::size_t sizes[] = {0, 1, 5, 95};
    const double scales[] = {0.1, 1.0, 10.0};
    for (std::size_t p : sizes) {
        for (std::size_t n : sizes) {
            if (p + n == 0 || (p == 95 && n == 95)) continue;
            for (double scale : scales) {
                const std::size_t num_rel = p + n;
                const LabelSet positives = random_subset(rng, iota_set(num_rel), p);
                const LabelSet negatives = complement(positives, num_rel);
                std::vector<double> f = random_logits(rng, num_rel + 1, scale);

                {
                    std::vector<double> grad(f.size(), 0.0);
                    pmt_loss(f, positives, negatives, grad);
                    GradCheck g;
                    auto eval = [&] { return pmt_loss(f, positives, negatives); };
                    for (std::size_t i = 0; i < f.size(); ++i) g.add(grad[i], eval, f[i]);
                    check(suite, g, describe("pmt", p, n, scale));
                }
                for (GammaMode mode : {GammaMode::Unit, GammaMode::SetSize}) {
                    LossConfig cfg;
                    cfg.gamma_mode = mode;
                    std::vector<double> grad(f.size(), 0.0);
                    em_loss(f, positives, negatives, cfg, grad);
                    GradCheck g;
                    auto eval = [&] { return em_loss(f, positives, negatives, cfg); };
                    for (std::size_t i = 0; i < f.size(); ++i) g.add(grad[i], eval, f[i]);
                    check(suite, g, describe(mode == GammaMode::Unit ? "em(unit)" : "em(set-size)", p, n, scale));
                }
                if (p == 0) {
                    for (GammaMode mode : {GammaMode::Unit, GammaMode::SetSize}) {
                        for (bool em : {true, false}) {
                            LossConfig cfg;
                            cfg.gamma_mode = mode;
                            cfg.enable_em = em;
                            const LabelSet sampled =
                                random_subset(rng, negatives, negative_sample_size(n, 0.1));
                            std::vector<double> grad(f.size(), 0.0);
                            sampled_negative_loss(f, sampled, negatives, cfg, grad);
                            GradCheck g;
                            auto eval = [&] { return sampled_negative_loss(f, sampled, negatives, cfg); };
                            for (std::size_t i = 0; i < f.size(); ++i) g.add(grad[i], eval, f[i]);
                            check(suite, g, describe(em ? "sampled(em)" : "sampled", p, n, scale));
                        }
                    }
                }
            }
        }
    }
}

// Random labels over `num_rel` relations for a batch; about a third NA.
std::vector<LabelSet> random_batch_labels(CounterRng& rng, std::size_t batch, std::size_t num_rel) {
    std::vector<LabelSet> labels(batch);
    for (LabelSet& l : labels) {
        if (rng.bernoulli(0.35)) continue;
        const std::size_t k = 1 + static_cast<std::size_t>(rng.below(std::min<std::size_t>(3, num_rel)));
        l = random_subset(rng, iota_set(num_rel), k);
    }
    return labels;
}

Batch batch_from_labels(const std::vector<LabelSet>& labels) {
    Batch b;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        b.example_indices.push_back(i);
        (labels[i].empty() ? b.bn_indices : b.bp_indices).push_back(i);
    }
    b.s_sets = compute_positive_sets(std::span<const LabelSet>(labels));
    return b;
}

void attach_samples(Batch& b, const std::vector<LabelSet>& labels, std::size_t num_rel, double ratio,
                    CounterRng& rng) {
    for (std::size_t i : b.bn_indices) {
        b.sampled_negatives[i] = random_subset(rng, complement(labels[i], num_rel),
                                               negative_sample_size(num_rel, ratio));
    }
}

void check_contrastive_terms(SuiteResult& suite, CounterRng& rng) {
    const std::size_t batch_sizes[] = {2, 4, 16};
    const double taus[] = {0.1, 1.0, 10.0};
    const std::size_t dim = 6;
    for (std::size_t n : batch_sizes) {
        for (double tau : taus) {
            std::vector<Vector> x;
            for (std::size_t i = 0; i < n; ++i) x.push_back(random_unit(rng, dim));
            const std::string tag = " batch=" + std::to_string(n) + " tau=" + std::to_string(tau);

            auto run = [&](const char* name, const std::function<double(std::span<Vector>)>& fn) {
                std::vector<Vector> grad(n, Vector::Zero(dim));
                fn(grad);
                GradCheck g;
                auto eval = [&] { return fn({}); };
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t k = 0; k < dim; ++k) g.add(grad[i][k], eval, x[i][k]);
                }
                check(suite, g, name + tag);
            };

            std::vector<std::size_t> positives;
            for (std::size_t i = 1; i < n; ++i) {
                if (rng.bernoulli(0.5)) positives.push_back(i);
            }
            if (positives.empty()) positives.push_back(n - 1);
            run("scl", [&](std::span<Vector> g) { return scl_loss(0, x, positives, tau, g); });
            run("lt", [&](std::span<Vector> g) { return lt_loss(0, x, tau, g); });

            const std::vector<LabelSet> labels = random_batch_labels(rng, n, 4);
            const Batch batch = batch_from_labels(labels);
            run("l2", [&](std::span<Vector> g) { return l2_loss(batch, x, tau, g).total(); });
        }
    }
}

void check_batch_objectives(SuiteResult& suite, CounterRng& rng) {
    const std::size_t batch_sizes[] = {2, 4, 16};
    const double scales[] = {0.1, 1.0, 10.0};
    for (std::size_t n : batch_sizes) {
        for (double scale : scales) {
            for (bool sampling : {false, true}) {
                for (GammaMode mode : {GammaMode::Unit, GammaMode::SetSize}) {
                    // Large label sets are covered term by term above; keep the batch cost bounded.
                    const std::size_t num_rel = rng.bernoulli(0.5) ? 5 : 24;
                    std::vector<LabelSet> labels = random_batch_labels(rng, n, num_rel);
                    labels[0].clear();  // keep at least one NA for the sampled objective
                    if (labels.size() > 1 && labels[1].empty()) labels[1] = {0};
                    Batch batch = batch_from_labels(labels);
                    attach_samples(batch, labels, num_rel, 0.1, rng);

                    LossConfig cfg;
                    cfg.gamma_mode = mode;
                    cfg.enable_neg_sampling = sampling;
                    cfg.tau = 0.5;
                    cfg.lambda = 0.7;

                    std::vector<PairForward> fw(n);
                    for (PairForward& p : fw) {
                        const std::vector<double> f = random_logits(rng, num_rel + 1, scale);
                        p.f = Eigen::Map<const Vector>(f.data(), static_cast<Eigen::Index>(f.size()));
                        p.x_unit = random_unit(rng, 6);
                        p.x = p.x_unit;
                    }
                    const BatchLossOutput out = batch_loss(batch, labels, fw, cfg);
                    GradCheck g;
                    auto eval = [&] { return batch_loss(batch, labels, fw, cfg).total; };
                    for (std::size_t i = 0; i < n; ++i) {
                        for (Eigen::Index k = 0; k < fw[i].f.size(); ++k) g.add(out.grad_logits[i][k], eval, fw[i].f[k]);
                        for (Eigen::Index k = 0; k < fw[i].x_unit.size(); ++k) {
                            g.add(out.grad_embeddings[i][k], eval, fw[i].x_unit[k]);
                        }
                    }
                    std::ostringstream label;
                    label << (sampling ? "L^NA" : "L") << " batch=" << n << " |R|=" << num_rel
                          << " scale=" << scale << " gamma=" << to_string(mode);
                    check(suite, g, label.str());
                }
            }
        }
    }
}

PairExample random_example(CounterRng& rng, std::size_t dim, const LabelSet& labels) {
    PairExample ex;
    ex.doc_id = "grad";
    ex.head_id = 1;
    ex.tail_id = 2;
    ex.head_name = "E1";
    ex.tail_name = "E2";
    const std::size_t hm = 1 + static_cast<std::size_t>(rng.below(3));
    const std::size_t tm = 1 + static_cast<std::size_t>(rng.below(3));
    for (std::size_t i = 0; i < hm; ++i) ex.head_mentions.push_back({1, random_unit(rng, dim)});
    for (std::size_t i = 0; i < tm; ++i) ex.tail_mentions.push_back({2, random_unit(rng, dim)});
    ex.context = random_unit(rng, dim);
    ex.positive_relations = labels;
    ex.gold_positive_relations = labels;
    return ex;
}

void for_each_param(HeadParams& p, const std::function<void(double&, const double&)>& fn,
                    const HeadGradients& g) {
    auto visit = [&](auto& m, const auto& gm) {
        for (Eigen::Index i = 0; i < m.size(); ++i) fn(m.data()[i], gm.data()[i]);
    };
    visit(p.w_h, g.w_h);
    visit(p.w_t, g.w_t);
    visit(p.w_c1, g.w_c1);
    visit(p.w_c2, g.w_c2);
    visit(p.w_o, g.w_o);
    visit(p.b_o, g.b_o);
}

void check_head(SuiteResult& suite, CounterRng& rng) {
    const std::size_t batch_sizes[] = {2, 4, 16};
    const std::size_t dim = 5, hidden = 4, groups = 2, num_rel = 4;
    for (std::size_t n : batch_sizes) {
        for (bool sampling : {false, true}) {
            for (int rep = 0; rep < 2; ++rep) {
                HeadParams params = HeadParams::initialize(dim, hidden, groups, num_rel + 1, rng());
                for (Eigen::Index i = 0; i < params.w_o.size(); ++i) params.w_o.data()[i] *= 3.0;
                for (Eigen::Index i = 0; i < params.b_o.size(); ++i) params.b_o[i] = 0.3 * rng.normal();

                std::vector<LabelSet> labels = random_batch_labels(rng, n, num_rel);
                labels[0].clear();
                if (n > 1 && labels[1].empty()) labels[1] = {1};
                std::vector<PairExample> examples;
                for (const LabelSet& l : labels) examples.push_back(random_example(rng, dim, l));
                Batch batch = batch_from_labels(labels);
                attach_samples(batch, labels, num_rel, 0.5, rng);

                LossConfig cfg;
                cfg.enable_neg_sampling = sampling;
                cfg.gamma_mode = rep == 0 ? GammaMode::Unit : GammaMode::SetSize;
                cfg.tau = 0.5;
                cfg.lambda = 1.0;

                auto objective = [&] {
                    std::vector<PairForward> fw;
                    for (const PairExample& ex : examples) fw.push_back(head_forward(ex, params));
                    return batch_loss(batch, labels, fw, cfg).total;
                };

                std::vector<PairForward> fw;
                for (const PairExample& ex : examples) fw.push_back(head_forward(ex, params));
                const BatchLossOutput out = batch_loss(batch, labels, fw, cfg);
                HeadGradients total = HeadParams::zeros(dim, hidden, groups, num_rel + 1);
                std::vector<HeadBackward> back;
                for (std::size_t i = 0; i < n; ++i) {
                    back.push_back(head_backward(fw[i], out.grad_embeddings[i], out.grad_logits[i], params));
                    accumulate_head_gradients(fw[i], out.grad_embeddings[i], out.grad_logits[i], params, total);
                }

                GradCheck g;
                for_each_param(params, [&](double& slot, const double& a) { g.add(a, objective, slot); }, total);
                for (std::size_t i = 0; i < n; ++i) {
                    PairExample& ex = examples[i];
                    for (std::size_t m = 0; m < ex.head_mentions.size(); ++m) {
                        for (std::size_t k = 0; k < dim; ++k) {
                            g.add(back[i].head_mentions[m][k], objective, ex.head_mentions[m].embedding[k]);
                        }
                    }
                    for (std::size_t m = 0; m < ex.tail_mentions.size(); ++m) {
                        for (std::size_t k = 0; k < dim; ++k) {
                            g.add(back[i].tail_mentions[m][k], objective, ex.tail_mentions[m].embedding[k]);
                        }
                    }
                    for (std::size_t k = 0; k < dim; ++k) g.add(back[i].context[k], objective, ex.context[k]);
                }
                std::ostringstream label;
                label << "head+" << (sampling ? "L^NA" : "L") << " batch=" << n << " rep=" << rep;
                check(suite, g, label.str());
            }
        }
    }
}

}  // namespace

SuiteResult run_gradient_checks(std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult suite;
    suite.name = "gradient-check";
    CounterRng rng(seed, 0, "gradient-check");
    check_logit_terms(suite, rng);
    check_contrastive_terms(suite, rng);
    check_batch_objectives(suite, rng);
    check_head(suite, rng);
    suite.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return suite;
}

}  // namespace pemscl::verify

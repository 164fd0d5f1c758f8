#include <doctest.h>

#include <cmath>
#include <vector>

#include "pemscl/batch.hpp"
#include "pemscl/error.hpp"
#include "pemscl/loss.hpp"
#include "support.hpp"

using namespace pemscl;
using pemscl::test::vec;

TEST_CASE("pairwise probabilities") {
    const PairwiseProbs a = pairwise_probs(2.0, 0.0);
    CHECK(a.p_r == doctest::Approx(0.8807971).epsilon(1e-7));
    CHECK(a.p_eta == doctest::Approx(0.1192029).epsilon(1e-7));
    const PairwiseProbs b = pairwise_probs(-3.0, 1.0);
    CHECK(b.p_r == doctest::Approx(0.0179862).epsilon(1e-6));
    CHECK(b.p_eta == doctest::Approx(0.9820138).epsilon(1e-7));
    const PairwiseProbs c = pairwise_probs(800.0, -800.0);
    CHECK(c.p_r == 1.0);
    CHECK(c.p_eta == 0.0);
    CHECK(softplus(1000.0) == 1000.0);
    CHECK(softplus(2.0) == doctest::Approx(2.126928).epsilon(1e-7));
}

TEST_CASE("pairwise moving-threshold loss") {
    const std::vector<double> f{5.0, -5.0, 0.0};
    CHECK(pmt_loss(f, {0}, {1}) == doctest::Approx(0.0134307).epsilon(1e-6));
    const std::vector<double> tie{0.0, 0.0};
    CHECK(pmt_loss(tie, {0}, {}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // Shifting every logit leaves the loss unchanged.
    const std::vector<double> g{3.1, -0.4, 1.2, 0.7};
    const std::vector<double> h{13.1, 9.6, 11.2, 10.7};
    CHECK(pmt_loss(g, {0, 2}, {1}) == doctest::Approx(pmt_loss(h, {0, 2}, {1})).epsilon(1e-12));

    CHECK_THROWS_AS(pmt_loss(g, {0, 1}, {1}), Error);
    CHECK_THROWS_AS(pmt_loss(g, {3}, {}), Error);
    const std::vector<double> bad{std::nan(""), 0.0};
    CHECK_THROWS_AS(pmt_loss(bad, {0}, {}), Error);
}

TEST_CASE("pair entropy") {
    CHECK(pair_entropy(2.0, 0.0) == doctest::Approx(0.3653339).epsilon(1e-7));
    CHECK(pair_entropy(0.4, 0.4) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(pair_entropy(60.0, 0.0) == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(pair_entropy(-900.0, 0.0) == 0.0);
    CHECK(pair_entropy_slope(1.0, 1.0) == 0.0);
    CHECK(pair_entropy_slope(2.0, 0.0) < 0.0);
}

TEST_CASE("entropy term normalisation") {
    const std::vector<double> f{2.0, 2.0, 0.0};
    LossConfig unit;
    unit.gamma_mode = GammaMode::Unit;
    LossConfig set_size;
    set_size.gamma_mode = GammaMode::SetSize;
    const double h = pair_entropy(2.0, 0.0);
    CHECK(em_loss(f, {0, 1}, {}, unit) == doctest::Approx(2 * h));
    CHECK(em_loss(f, {0, 1}, {}, set_size) == doctest::Approx(h));
    CHECK(parse_gamma_mode("set-size") == GammaMode::SetSize);
    CHECK_THROWS_AS(parse_gamma_mode("nope"), Error);
}

TEST_CASE("sampled negative objective") {
    const std::vector<double> f{3.0, -1.0, 0.0};
    LossConfig cfg;
    cfg.gamma_mode = GammaMode::Unit;
    cfg.enable_em = false;
    CHECK(sampled_negative_loss(f, {0}, {0, 1}, cfg) == doctest::Approx(3.0485874).epsilon(1e-7));
    cfg.enable_em = true;
    CHECK(sampled_negative_loss(f, {0}, {0, 1}, cfg) == doctest::Approx(3.0485874 + 0.1908650).epsilon(1e-7));
    try {
        sampled_negative_loss(f, {}, {0, 1}, cfg);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidSample);
    }
}

TEST_CASE("contrastive terms") {
    SUBCASE("orthogonal anchor") {
        const std::vector<Vector> x{vec({1, 0, 0, 0}), vec({0, 1, 0, 0}), vec({0, 0, 1, 0}), vec({0, 0, 0, 1})};
        CHECK(scl_loss(0, x, {1}, 1.0) == doctest::Approx(1.0986123).epsilon(1e-7));
        CHECK(lt_loss(0, x, 1.0) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    }
    SUBCASE("identical embeddings") {
        for (std::size_t n : {2, 3, 7}) {
            std::vector<Vector> x(n, vec({0.6, 0.8}));
            CHECK(scl_loss(0, x, {1}, 1.0) == doctest::Approx(std::log(double(n - 1))).epsilon(1e-12));
        }
    }
    SUBCASE("degenerate inputs") {
        const std::vector<Vector> one{vec({1, 0})};
        try {
            lt_loss(0, one, 1.0);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateBatch);
        }
        const std::vector<Vector> two{vec({1, 0}), vec({0, 1})};
        CHECK_THROWS_AS(scl_loss(0, two, {}, 1.0), Error);
        CHECK_THROWS_AS(scl_loss(0, two, {0}, 1.0), Error);
        CHECK_THROWS_AS(lt_loss(0, two, 0.0), Error);
    }
}

TEST_CASE("batch contrastive loss uses positives as anchors only") {
    const std::vector<LabelSet> labels{{0}, {0, 1}, {}, {2}};
    Batch b;
    b.example_indices = {0, 1, 2, 3};
    b.bp_indices = {0, 1, 3};
    b.bn_indices = {2};
    b.s_sets = compute_positive_sets(labels);
    const std::vector<Vector> x{vec({1, 0}), vec({0.6, 0.8}), vec({0, 1}), vec({-1, 0})};
    const ContrastiveParts parts = l2_loss(b, x, 0.5);
    const double expect_scl = scl_loss(0, x, {1}, 0.5) + scl_loss(1, x, {0}, 0.5);
    CHECK(parts.scl == doctest::Approx(expect_scl).epsilon(1e-14));
    CHECK(parts.lt == doctest::Approx(lt_loss(3, x, 0.5)).epsilon(1e-14));
}

TEST_CASE("batch loss combines the terms with lambda") {
    const std::vector<LabelSet> labels{{0}, {0}, {}};
    Batch b;
    b.example_indices = {0, 1, 2};
    b.bp_indices = {0, 1};
    b.bn_indices = {2};
    b.s_sets = compute_positive_sets(labels);
    std::vector<PairForward> fw(3);
    const double logits[3][3] = {{1.0, -0.5, 0.2}, {0.3, 0.1, -0.4}, {-1.0, 0.5, 0.0}};
    const Vector x[3] = {vec({1, 0}), vec({0.6, 0.8}), vec({0, 1})};
    for (int i = 0; i < 3; ++i) {
        fw[i].f = vec({logits[i][0], logits[i][1], logits[i][2]});
        fw[i].x_unit = x[i];
        fw[i].x = x[i];
    }
    LossConfig cfg;
    cfg.lambda = 0.25;
    cfg.tau = 1.0;
    const BatchLossOutput out = batch_loss(b, labels, fw, cfg);
    const double threshold = out.parts.pmt + out.parts.em;
    CHECK(out.total == doctest::Approx(threshold + 0.25 * (out.parts.scl + out.parts.lt)).epsilon(1e-14));

    cfg.enable_scl = false;
    cfg.enable_em = false;
    const BatchLossOutput pmt_only = batch_loss(b, labels, fw, cfg);
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) {
        const std::vector<double> f(fw[i].f.data(), fw[i].f.data() + 3);
        expect += pmt_loss(f, labels[i], complement(labels[i], 2));
    }
    CHECK(pmt_only.total == doctest::Approx(expect).epsilon(1e-14));
    for (const Vector& g : pmt_only.grad_embeddings) CHECK(g.norm() == 0.0);
}

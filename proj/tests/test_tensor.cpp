#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "ximp/errors.hpp"
#include "ximp/nn/optim.hpp"
#include "ximp/nn/tensor.hpp"
#include "ximp/rng.hpp"

using namespace ximp;
using namespace ximp::nn;

namespace {

// Central finite differences over every entry of every parameter.
// Returns the max relative error against the analytic gradients.
double max_grad_error(ParameterStore& store, const std::function<double()>& f,
                      double h) {
    // analytic pass: caller is expected to have populated gradients already
    double worst = 0.0;
    for (auto& [name, p] : store.map()) {
        for (size_t i = 0; i < p.v.size(); ++i) {
            double keep = p.v[i];
            p.v[i] = keep + h;
            double fp = f();
            p.v[i] = keep - h;
            double fm = f();
            p.v[i] = keep;
            double fd = (fp - fm) / (2 * h);
            double denom = std::max({std::abs(fd), std::abs(p.g[i]), 1e-8});
            worst = std::max(worst, std::abs(fd - p.g[i]) / denom);
        }
    }
    return worst;
}

TensorRef scalarize(Tape& t, TensorRef x) {
    TensorRef pooled = mean_rows(t, x);
    std::vector<double> ones(pooled->cols, 1.0);
    return matmul(t, pooled, t.constant(pooled->cols, 1, ones));
}

}  // namespace

TEST_CASE("relu forward and backward at the definition points") {
    Rng rng(1);
    ParameterStore store;
    auto& p = store.add("x", 1, 2, ParameterStore::Init::Zero, rng);
    p.v = {-1.0, 2.0};
    Tape t;
    TensorRef x = t.leaf(p);
    TensorRef y = relu(t, x);
    CHECK(y->v[0] == 0.0);
    CHECK(y->v[1] == 2.0);
    t.backward(scalarize(t, y));
    CHECK(p.g[0] == 0.0);
    CHECK(p.g[1] == doctest::Approx(1.0));
}

TEST_CASE("matmul gradients match central differences") {
    Rng rng(7);
    ParameterStore store;
    store.add("a", 2, 3, ParameterStore::Init::Uniform, rng);
    store.add("b", 3, 2, ParameterStore::Init::Uniform, rng);
    auto f = [&] {
        Tape t;
        TensorRef c = matmul(t, t.leaf(store.at("a")), t.leaf(store.at("b")));
        return scalarize(t, c)->v[0];
    };
    store.zero_grad();
    {
        Tape t;
        TensorRef c = matmul(t, t.leaf(store.at("a")), t.leaf(store.at("b")));
        t.backward(scalarize(t, c));
    }
    CHECK(max_grad_error(store, f, 1e-6) < 1e-6);
}

TEST_CASE("mean_rows distributes upstream gradient evenly") {
    Rng rng(3);
    ParameterStore store;
    auto& p = store.add("x", 4, 3, ParameterStore::Init::Uniform, rng);
    Tape t;
    TensorRef m = mean_rows(t, t.leaf(p));
    std::vector<double> ones(3, 1.0);
    t.backward(matmul(t, m, t.constant(3, 1, ones)));
    for (size_t i = 0; i < p.g.size(); ++i) CHECK(p.g[i] == doctest::Approx(0.25));
}

TEST_CASE("composite graph with every op passes a finite-difference check") {
    Rng rng(11);
    ParameterStore store;
    store.add("w1", 5, 4, ParameterStore::Init::Uniform, rng);
    store.add("w2", 8, 4, ParameterStore::Init::Uniform, rng);
    store.add("bias", 1, 4, ParameterStore::Init::Uniform, rng);
    store.add("eps", 1, 1, ParameterStore::Init::Uniform, rng);
    std::vector<int> gather_idx = {0, 2, 1, 2, 0};
    std::vector<int> scatter_idx = {1, 0, 2, 2, 1};
    std::vector<double> mask(24, 1.0 / 0.9);
    mask[3] = 0.0;
    mask[7] = 0.0;
    std::vector<double> targets = {0.3, -0.7, 1.1};

    // gather -> (1+eps)-scale -> scatter -> +bias -> relu/scale -> concat
    // -> dropout -> two projection paths -> mae loss
    auto build = [&](Tape& t) {
        TensorRef x = t.constant(
            {{0.5, -1.0, 2.0, 0.25}, {1.0, 1.0, -2.0, 0.5}, {-0.5, 2.0, 1.0, -1.0}});
        TensorRef w1 = t.leaf(store.at("w1"));
        TensorRef g5 = gather_rows(t, x, gather_idx);  // 5x4
        TensorRef scaled =
            smul(t, add_const(t, t.leaf(store.at("eps")), 1.0), add(t, g5, w1));
        TensorRef sc = scatter_add_rows(t, scaled, scatter_idx, 3);
        TensorRef biased = add_rowvec(t, sc, t.leaf(store.at("bias")));
        TensorRef fused = concat_cols(t, relu(t, biased), scale(t, biased, 0.5));
        TensorRef dropped = dropout(t, fused, mask);
        TensorRef pooled =
            matmul(t, dropped, t.constant(8, 1, std::vector<double>(8, 0.125)));
        TensorRef w2 = t.leaf(store.at("w2"));
        TensorRef extra =
            matmul(t, dropped, matmul(t, w2, t.constant(4, 1, {1, -1, 0.5, 2})));
        TensorRef pred = add(t, pooled, extra);  // 3x1
        return mae_loss(t, pred, targets);
    };

    store.zero_grad();
    double base;
    {
        Tape t;
        TensorRef loss = build(t);
        base = loss->v[0];
        t.backward(loss);
    }
    auto value_only = [&] {
        Tape t;
        return build(t)->v[0];
    };
    CHECK(base == doctest::Approx(value_only()));
    CHECK(max_grad_error(store, value_only, 1e-6) < 1e-5);
}

TEST_CASE("adam: zero gradient with zero decay keeps parameters") {
    Rng rng(5);
    ParameterStore store;
    auto& p = store.add("w", 2, 2, ParameterStore::Init::Uniform, rng);
    auto before = p.v;
    p.grad_set = true;  // zero gradient, explicitly marked populated
    AdamConfig cfg;
    cfg.weight_decay = 0.0;
    adam_step(store, cfg);
    CHECK(p.v == before);
}

TEST_CASE("adam: hand-stepped scalar recurrence") {
    Rng rng(5);
    ParameterStore store;
    auto& p = store.add("w", 1, 1, ParameterStore::Init::Zero, rng);
    p.v[0] = 1.0;
    AdamConfig cfg;
    cfg.lr = 1e-3;
    cfg.weight_decay = 0.0;

    p.g[0] = 1.0;
    p.grad_set = true;
    adam_step(store, cfg);
    // step 1: mhat = vhat = 1 -> w = 1 - lr/(1 + eps)
    double expect1 = 1.0 - 1e-3 / (1.0 + 1e-8);
    CHECK(p.v[0] == doctest::Approx(expect1).epsilon(1e-12));

    // step 2 with the same gradient, recurrences in closed form
    p.g[0] = 1.0;
    adam_step(store, cfg);
    double m = 0.9 * 0.1 + 0.1;           // beta1*m + (1-beta1)*g
    double v = 0.999 * 0.001 + 0.001;
    double mhat = m / (1 - 0.9 * 0.9);
    double vhat = v / (1 - 0.999 * 0.999);
    double expect2 = expect1 - 1e-3 * (mhat / (std::sqrt(vhat) + 1e-8));
    CHECK(p.v[0] == doctest::Approx(expect2).epsilon(1e-12));
}

TEST_CASE("adam: missing gradient is an error") {
    Rng rng(5);
    ParameterStore store;
    store.add("w", 1, 1, ParameterStore::Init::Uniform, rng);
    AdamConfig cfg;
    CHECK_THROWS_AS(adam_step(store, cfg), MissingGradient);
}

TEST_CASE("shape and finiteness violations throw") {
    Tape t;
    TensorRef a = t.constant(2, 2, {1, 2, 3, 4});
    TensorRef b = t.constant(3, 2, {1, 2, 3, 4, 5, 6});
    CHECK_THROWS_AS(matmul(t, a, b), ShapeMismatch);
    CHECK_THROWS_AS(add(t, a, b), ShapeMismatch);
    CHECK_THROWS_AS(t.constant(1, 1, {std::numeric_limits<double>::infinity()}),
                    NonFiniteValue);
    CHECK_THROWS_AS(mae_loss(t, a, {1, 2}), ShapeMismatch);
}

TEST_CASE("tape replay determinism") {
    auto run = [] {
        Rng rng(42);
        ParameterStore store;
        store.add("w", 4, 4, ParameterStore::Init::Uniform, rng);
        store.add("b", 1, 4, ParameterStore::Init::Uniform, rng);
        Tape t;
        TensorRef x = t.constant({{1, 0, -1, 2}, {0.5, 0.25, 0, -2}});
        TensorRef h = relu(t, add_rowvec(t, matmul(t, x, t.leaf(store.at("w"))),
                                         t.leaf(store.at("b"))));
        TensorRef pred = matmul(t, mean_rows(t, h), t.constant(4, 1, {1, 1, 1, 1}));
        TensorRef loss = mae_loss(t, pred, {0.123});
        t.backward(loss);
        return std::make_pair(loss->v[0], store.at("w").g);
    };
    auto [l1, g1] = run();
    auto [l2, g2] = run();
    CHECK(l1 == l2);  // bit-identical
    CHECK(g1 == g2);
}

#include <cmath>

#include "doctest.h"
#include "ginn/layers.hpp"
#include "test_support.hpp"

using namespace ginn;
using test_support::dense_oracle_forward;
using test_support::random_layer;
using test_support::random_matrix;
using test_support::shared_ahat;

TEST_SUITE_BEGIN("layers");

namespace {

Graph path4() { return Graph(4, {{0, 1}, {1, 2}, {2, 3}}); }

const ActivationKind kAllActs[] = {ActivationKind::elu, ActivationKind::swish,
                                   ActivationKind::softplus, ActivationKind::linear};

/// Scalar loss sum(Y^2)/2 of the layer output; gradient oracle target.
double half_sq_loss(const Layer& layer, const DenseMatrix& x) {
    DenseMatrix z, y;
    layer_forward(layer, x, z, y);
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) s += y.data()[i] * y.data()[i];
    return 0.5 * s;
}

std::vector<double> pack_layer(const Layer& layer, const DenseMatrix& x) {
    std::vector<double> theta;
    theta.insert(theta.end(), layer.w_out.begin(), layer.w_out.end());
    theta.insert(theta.end(), layer.w_in.begin(), layer.w_in.end());
    theta.insert(theta.end(), layer.bias.begin(), layer.bias.end());
    theta.insert(theta.end(), x.data(), x.data() + x.size());
    return theta;
}

void unpack_layer(std::span<const double> theta, Layer& layer, DenseMatrix& x) {
    size_t off = 0;
    std::copy_n(theta.begin(), layer.w_out.size(), layer.w_out.begin());
    off += layer.w_out.size();
    std::copy_n(theta.begin() + off, layer.w_in.size(), layer.w_in.begin());
    off += layer.w_in.size();
    std::copy_n(theta.begin() + off, layer.bias.size(), layer.bias.begin());
    off += layer.bias.size();
    std::copy_n(theta.begin() + off, x.size(), x.data());
}

}  // namespace

TEST_CASE("gi forward: zero input yields the bias through a linear layer") {
    const Graph g = erdos_renyi(5, 0.5, 2);
    Layer layer = random_layer(LayerKind::gi, g, 2, 3, ActivationKind::linear, 7);
    const DenseMatrix x(5, 2);
    DenseMatrix z, y;
    layer_forward(layer, x, z, y);
    for (int j = 0; j < 5; ++j)
        for (int l = 0; l < 3; ++l) CHECK(y(j, l) == layer.bias_at(j, l));
}

TEST_CASE("gi forward on the empty graph is an element-wise affine map") {
    const Graph g(4, {});
    Layer layer = random_layer(LayerKind::gi, g, 1, 1, ActivationKind::linear, 3);
    DenseMatrix x = random_matrix(4, 1, 5), z, y;
    layer_forward(layer, x, z, y);
    for (int i = 0; i < 4; ++i)
        CHECK(y(i, 0) == doctest::Approx(layer.w_out_at(0, 0, i) * x(i, 0) + layer.bias_at(i, 0))
                             .epsilon(1e-15));
}

TEST_CASE("gi forward node-wise sums on the 4-node path") {
    Layer layer = make_layer(LayerKind::gi, 1, 1, ActivationKind::linear, shared_ahat(path4()));
    for (int i = 0; i < 4; ++i) layer.w_out_at(0, 0, i) = i + 1.0;
    DenseMatrix x(4, 1, 1.0), z, y;
    layer_forward(layer, x, z, y);
    CHECK(y(0, 0) == 3.0);
    CHECK(y(1, 0) == 6.0);
    CHECK(y(2, 0) == 9.0);
    CHECK(y(3, 0) == 7.0);
}

TEST_CASE("ewgi forward rescales the received sum per node") {
    Layer layer = make_layer(LayerKind::ewgi, 1, 1, ActivationKind::linear, shared_ahat(path4()));
    const double win[] = {1.0, 10.0, 100.0, 1000.0};
    for (int i = 0; i < 4; ++i) {
        layer.w_out_at(0, 0, i) = i + 1.0;
        layer.w_in_at(0, 0, i) = win[i];
    }
    DenseMatrix x(4, 1, 1.0), z, y;
    layer_forward(layer, x, z, y);
    CHECK(y(0, 0) == 3.0);
    CHECK(y(1, 0) == 60.0);
    CHECK(y(2, 0) == 900.0);
    CHECK(y(3, 0) == 7000.0);
}

TEST_CASE("ewgi with unit incoming weights reproduces gi bit for bit") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        const Graph g = erdos_renyi(6 + static_cast<int>(seed % 5), 0.4, seed);
        Layer gi = random_layer(LayerKind::gi, g, 2, 2, ActivationKind::swish, seed * 31);
        Layer ew = make_layer(LayerKind::ewgi, 2, 2, ActivationKind::swish, gi.ahat);
        ew.w_out = gi.w_out;
        ew.bias = gi.bias;
        std::fill(ew.w_in.begin(), ew.w_in.end(), 1.0);
        const DenseMatrix x = random_matrix(g.node_count(), 2, seed * 77);
        DenseMatrix z1, y1, z2, y2;
        layer_forward(gi, x, z1, y1);
        layer_forward(ew, x, z2, y2);
        CHECK(y1 == y2);  // bitwise
    }
}

TEST_CASE("ewgi zero input still yields the bias") {
    const Graph g = erdos_renyi(5, 0.5, 2);
    Layer layer = random_layer(LayerKind::ewgi, g, 2, 2, ActivationKind::linear, 9);
    DenseMatrix x(5, 2), z, y;
    layer_forward(layer, x, z, y);
    for (int j = 0; j < 5; ++j)
        for (int l = 0; l < 2; ++l) CHECK(y(j, l) == layer.bias_at(j, l));
}

TEST_CASE("forward equals the materialized dense operator") {
    int instance = 0;
    for (uint64_t seed = 1; instance < 50; ++seed) {
        const int n = 3 + static_cast<int>(seed % 10);
        const Graph g = erdos_renyi(n, 0.45, seed);
        const int K = 1 + static_cast<int>(seed % 3);
        const int F = 1 + static_cast<int>((seed / 3) % 3);
        const ActivationKind act = kAllActs[seed % 4];
        const LayerKind kind = seed % 2 ? LayerKind::gi : LayerKind::ewgi;
        const Layer layer = random_layer(kind, g, K, F, act, seed * 13);
        const DenseMatrix x = random_matrix(n, K, seed * 17);
        DenseMatrix z, y;
        layer_forward(layer, x, z, y);
        const DenseMatrix oracle = dense_oracle_forward(layer, x);
        for (size_t i = 0; i < y.size(); ++i)
            CHECK(std::abs(y.data()[i] - oracle.data()[i]) < 1e-12);
        ++instance;
    }
}

TEST_CASE("materialize_dense special cases") {
    const Graph empty(3, {});
    Layer diag = random_layer(LayerKind::gi, empty, 1, 1, ActivationKind::linear, 4);
    const DenseMatrix m = materialize_dense(diag);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(m(i, j) == (i == j ? diag.w_out_at(0, 0, i) : 0.0));

    const Graph g = erdos_renyi(5, 0.5, 3);
    Layer gi = random_layer(LayerKind::gi, g, 2, 2, ActivationKind::linear, 6);
    Layer ew = make_layer(LayerKind::ewgi, 2, 2, ActivationKind::linear, gi.ahat);
    ew.w_out = gi.w_out;
    ew.bias = gi.bias;
    std::fill(ew.w_in.begin(), ew.w_in.end(), 1.0);
    CHECK(materialize_dense(ew) == materialize_dense(gi));
}

TEST_CASE("materialize_dense refuses huge layers") {
    const Graph g = erdos_renyi(60, 0.1, 1);
    const Layer big = random_layer(LayerKind::gi, g, 42, 42, ActivationKind::linear, 1);
    CHECK_THROWS_AS(materialize_dense(big), std::invalid_argument);
}

TEST_CASE("weight counts match the closed forms") {
    const Graph g = erdos_renyi(10, 0.3, 1);
    const Layer gi = random_layer(LayerKind::gi, g, 1, 1, ActivationKind::linear, 2);
    const Layer ew = random_layer(LayerKind::ewgi, g, 1, 1, ActivationKind::linear, 2);
    CHECK(count_weights(gi) == 20);
    CHECK(count_weights(ew) == 30);
    // Single-feature form: 2n trainable weights once biases are excluded.
    CHECK(count_weights(ew) - ew.bias.size() == 2 * 10);
}

TEST_CASE("backward: zero upstream gradient gives zero everywhere") {
    const Graph g = erdos_renyi(6, 0.5, 3);
    const Layer layer = random_layer(LayerKind::ewgi, g, 2, 2, ActivationKind::swish, 5);
    LayerTrace trace;
    DenseMatrix z, y;
    layer_forward(layer, random_matrix(6, 2, 8), z, y, &trace);
    LayerGradients grads = make_layer_gradients(layer);
    layer_backward(layer, trace, DenseMatrix(6, 2), grads);
    for (double v : grads.w_out) CHECK(v == 0.0);
    for (double v : grads.w_in) CHECK(v == 0.0);
    for (double v : grads.bias) CHECK(v == 0.0);
    for (size_t i = 0; i < grads.x.size(); ++i) CHECK(grads.x.data()[i] == 0.0);
}

TEST_CASE("backward: linear single-feature bias gradient is the upstream gradient") {
    const Graph g = erdos_renyi(5, 0.4, 4);
    const Layer layer = random_layer(LayerKind::gi, g, 1, 1, ActivationKind::linear, 6);
    LayerTrace trace;
    DenseMatrix z, y;
    layer_forward(layer, random_matrix(5, 1, 9), z, y, &trace);
    const DenseMatrix dy = random_matrix(5, 1, 10);
    LayerGradients grads = make_layer_gradients(layer);
    layer_backward(layer, trace, dy, grads);
    for (int j = 0; j < 5; ++j) CHECK(grads.bias[j] == dy(j, 0));
}

TEST_CASE("analytic gradients match finite differences on random instances") {
    int per_kind[2] = {0, 0};
    for (uint64_t seed = 1; per_kind[0] < 20 || per_kind[1] < 20; ++seed) {
        const LayerKind kind = seed % 2 ? LayerKind::gi : LayerKind::ewgi;
        int& counter = per_kind[kind == LayerKind::gi ? 0 : 1];
        if (counter >= 20) continue;
        ++counter;
        const int n = 4 + static_cast<int>(seed % 3);
        const Graph g = erdos_renyi(n, 0.5, seed);
        const int K = 1 + static_cast<int>(seed % 2);
        const int F = 1 + static_cast<int>((seed / 2) % 2);
        Layer layer = random_layer(kind, g, K, F, kAllActs[seed % 4], seed * 7);
        DenseMatrix x = random_matrix(n, K, seed * 11);

        LayerTrace trace;
        DenseMatrix z, y;
        layer_forward(layer, x, z, y, &trace);
        LayerGradients grads = make_layer_gradients(layer);
        layer_backward(layer, trace, y, grads);  // dL/dY = Y for L = sum(Y^2)/2

        Layer probe = layer;
        DenseMatrix xprobe = x;
        const auto f = [&](std::span<const double> theta) {
            unpack_layer(theta, probe, xprobe);
            return half_sq_loss(probe, xprobe);
        };
        const std::vector<double> theta = pack_layer(layer, x);
        const std::vector<double> fd = finite_difference_gradient(f, theta, 1e-5);

        std::vector<double> analytic;
        analytic.insert(analytic.end(), grads.w_out.begin(), grads.w_out.end());
        analytic.insert(analytic.end(), grads.w_in.begin(), grads.w_in.end());
        analytic.insert(analytic.end(), grads.bias.begin(), grads.bias.end());
        analytic.insert(analytic.end(), grads.x.data(), grads.x.data() + grads.x.size());
        REQUIRE(analytic.size() == fd.size());
        for (size_t i = 0; i < fd.size(); ++i)
            CHECK(std::abs(analytic[i] - fd[i]) / std::max(1e-2, std::abs(fd[i])) < 1e-4);
    }
}

TEST_CASE("ewgi with unit incoming weights matches gi gradients") {
    const Graph g = erdos_renyi(7, 0.4, 6);
    const Layer gi = random_layer(LayerKind::gi, g, 2, 2, ActivationKind::softplus, 8);
    Layer ew = make_layer(LayerKind::ewgi, 2, 2, ActivationKind::softplus, gi.ahat);
    ew.w_out = gi.w_out;
    ew.bias = gi.bias;
    std::fill(ew.w_in.begin(), ew.w_in.end(), 1.0);

    const DenseMatrix x = random_matrix(7, 2, 12);
    const DenseMatrix dy = random_matrix(7, 2, 13);
    LayerTrace trace_gi, trace_ew;
    DenseMatrix z, y;
    layer_forward(gi, x, z, y, &trace_gi);
    layer_forward(ew, x, z, y, &trace_ew);
    LayerGradients g1 = make_layer_gradients(gi), g2 = make_layer_gradients(ew);
    layer_backward(gi, trace_gi, dy, g1);
    layer_backward(ew, trace_ew, dy, g2);
    for (size_t i = 0; i < g1.w_out.size(); ++i)
        CHECK(std::abs(g1.w_out[i] - g2.w_out[i]) < 1e-14);
    for (size_t i = 0; i < g1.bias.size(); ++i) CHECK(std::abs(g1.bias[i] - g2.bias[i]) < 1e-14);
}

TEST_CASE("twin nodes: gi cannot tell them apart, ewgi can") {
    // Nodes 2 and 3 are non-adjacent and share the neighborhood {0, 1}.
    const Graph g(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {0, 1}});
    Layer gi = random_layer(LayerKind::gi, g, 1, 1, ActivationKind::swish, 3);
    gi.w_out_at(0, 0, 3) = gi.w_out_at(0, 0, 2);
    gi.bias_at(3, 0) = gi.bias_at(2, 0);
    DenseMatrix x = test_support::random_matrix(4, 1, 4);
    x(3, 0) = x(2, 0);
    DenseMatrix z, y;
    layer_forward(gi, x, z, y);
    CHECK(std::abs(y(2, 0) - y(3, 0)) < 1e-14);

    Layer ew = make_layer(LayerKind::ewgi, 1, 1, ActivationKind::swish, gi.ahat);
    ew.w_out = gi.w_out;
    ew.bias = gi.bias;
    std::fill(ew.w_in.begin(), ew.w_in.end(), 1.0);
    ew.w_in_at(0, 0, 2) = 0.5;
    ew.w_in_at(0, 0, 3) = 2.0;
    layer_forward(ew, x, z, y);
    CHECK(std::abs(y(2, 0) - y(3, 0)) > 1e-6);
}

TEST_CASE("sparsity: output never depends on non-neighbors") {
    const Graph g = erdos_renyi(8, 0.3, 9);
    const AugmentedAdjacency ahat = augmented_adjacency(g);
    const DenseMatrix pattern = ahat.mat.to_dense();
    for (LayerKind kind : {LayerKind::gi, LayerKind::ewgi}) {
        const Layer layer = random_layer(kind, g, 1, 1, ActivationKind::swish, 21);
        DenseMatrix x = random_matrix(8, 1, 22), z0, y0, z1, y1;
        layer_forward(layer, x, z0, y0);
        for (int i = 0; i < 8; ++i) {
            DenseMatrix bumped = x;
            bumped(i, 0) += 1.0;
            layer_forward(layer, bumped, z1, y1);
            for (int j = 0; j < 8; ++j)
                if (pattern(i, j) == 0.0) CHECK(y1(j, 0) == y0(j, 0));
        }
    }
}

TEST_CASE("pool forward and tie handling") {
    DenseMatrix y(1, 3);
    y(0, 0) = 1.0;
    y(0, 1) = 5.0;
    y(0, 2) = 3.0;
    std::vector<double> out;
    std::vector<int> argmax;
    pool_forward(y, PoolKind::reduce_max, out, &argmax);
    CHECK(out[0] == 5.0);
    CHECK(argmax[0] == 1);
    pool_forward(y, PoolKind::reduce_mean, out);
    CHECK(out[0] == doctest::Approx(3.0).epsilon(1e-15));

    DenseMatrix tie(1, 2);
    tie(0, 0) = 2.0;
    tie(0, 1) = 2.0;
    pool_forward(tie, PoolKind::reduce_max, out, &argmax);
    CHECK(argmax[0] == 0);  // lowest feature index wins ties

    DenseMatrix single(2, 1, 4.0);
    pool_forward(single, PoolKind::none, out);
    CHECK(out == std::vector<double>{4.0, 4.0});
    CHECK_THROWS_AS(pool_forward(single, PoolKind::reduce_max, out), std::invalid_argument);
    CHECK_THROWS_AS(pool_forward(y, PoolKind::none, out), std::invalid_argument);
}

TEST_CASE("pool backward routes and spreads") {
    const std::vector<double> dp = {2.0};
    DenseMatrix dy;
    pool_backward(dp, PoolKind::reduce_max, 3, {1}, dy);
    CHECK(dy(0, 0) == 0.0);
    CHECK(dy(0, 1) == 2.0);
    CHECK(dy(0, 2) == 0.0);
    pool_backward(dp, PoolKind::reduce_mean, 4, {}, dy);
    for (int l = 0; l < 4; ++l) CHECK(dy(0, l) == 0.5);
}

TEST_CASE("mask gathers and scatters") {
    const std::vector<double> values = {10.0, 11.0, 12.0, 13.0};
    std::vector<double> all(4);
    const std::vector<int> identity = {0, 1, 2, 3};
    mask_output(values, identity, all);
    CHECK(all == values);

    std::vector<double> one(1);
    const std::vector<int> third = {2};
    mask_output(values, third, one);
    CHECK(one == std::vector<double>{12.0});

    std::vector<double> dvalues(4);
    mask_backward(one, third, dvalues);
    CHECK(dvalues == std::vector<double>{0.0, 0.0, 12.0, 0.0});

    const std::vector<int> bad = {5};
    CHECK_THROWS_AS(mask_output(values, bad, one), std::out_of_range);
}

TEST_SUITE_END();

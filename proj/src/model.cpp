#include "ginn/model.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ginn {

// ---------------------------------------------------------------------
//  ModelConfig
// ---------------------------------------------------------------------

void ModelConfig::validate() const {
    if (depth < 1) throw std::invalid_argument("ModelConfig: depth must be >= 1");
    if (features < 1) throw std::invalid_argument("ModelConfig: features must be >= 1");
    if (features == 1 && pool != PoolKind::none)
        throw std::invalid_argument("ModelConfig: pooling requires features > 1");
    if (features > 1 && pool == PoolKind::none)
        throw std::invalid_argument("ModelConfig: features > 1 requires a pooling kind");
}

std::string ModelConfig::to_json() const {
    nlohmann::json j;
    j["layer_kind"] = to_string(layer_kind);
    j["depth"] = depth;
    j["features"] = features;
    j["activation"] = to_string(activation);
    j["pool"] = to_string(pool);
    j["seed"] = seed;
    return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ModelConfig cfg;
    if (j.contains("layer_kind")) cfg.layer_kind = layer_kind_from_string(j.at("layer_kind").get<std::string>());
    if (j.contains("depth")) cfg.depth = j.at("depth").get<int>();
    if (j.contains("features")) cfg.features = j.at("features").get<int>();
    if (j.contains("activation")) cfg.activation = activation_from_string(j.at("activation").get<std::string>());
    if (j.contains("pool")) cfg.pool = pool_from_string(j.at("pool").get<std::string>());
    else if (cfg.features > 1) cfg.pool = PoolKind::reduce_mean;
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------
//  Network assembly
// ---------------------------------------------------------------------

Network build_network(const ModelConfig& cfg, std::shared_ptr<const AugmentedAdjacency> ahat,
                      std::vector<int> sink_incoming, uint64_t graph_hash) {
    cfg.validate();
    if (!ahat) throw std::invalid_argument("build_network: null adjacency");
    for (size_t q = 0; q < sink_incoming.size(); ++q) {
        if (sink_incoming[q] < 0 || sink_incoming[q] >= ahat->n)
            throw std::invalid_argument("build_network: mask index out of range");
        if (q > 0 && sink_incoming[q] <= sink_incoming[q - 1])
            throw std::invalid_argument("build_network: mask indices must be strictly increasing");
    }

    Network net;
    net.kind = cfg.layer_kind;
    net.pool = cfg.pool;
    net.mask = std::move(sink_incoming);
    net.ahat = ahat;
    net.graph_hash = graph_hash;

    Rng rng(cfg.seed);
    for (int d = 0; d < cfg.depth; ++d) {
        const int k_in = d == 0 ? 1 : cfg.features;
        const bool is_head = d == cfg.depth - 1;
        Layer layer = make_layer(cfg.layer_kind, k_in, cfg.features,
                                 is_head ? ActivationKind::linear : cfg.activation, ahat);
        init_layer(layer, rng);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

size_t Network::parameter_count() const {
    size_t total = 0;
    for (const Layer& layer : layers) total += count_weights(layer);
    return total;
}

std::vector<double> Network::parameters_flat() const {
    std::vector<double> theta;
    theta.reserve(parameter_count());
    for (const Layer& layer : layers) {
        theta.insert(theta.end(), layer.w_out.begin(), layer.w_out.end());
        theta.insert(theta.end(), layer.w_in.begin(), layer.w_in.end());
        theta.insert(theta.end(), layer.bias.begin(), layer.bias.end());
    }
    return theta;
}

void Network::set_parameters_flat(std::span<const double> theta) {
    if (theta.size() != parameter_count())
        throw std::invalid_argument("set_parameters_flat: length mismatch");
    size_t off = 0;
    for (Layer& layer : layers) {
        std::copy_n(theta.begin() + off, layer.w_out.size(), layer.w_out.begin());
        off += layer.w_out.size();
        std::copy_n(theta.begin() + off, layer.w_in.size(), layer.w_in.begin());
        off += layer.w_in.size();
        std::copy_n(theta.begin() + off, layer.bias.size(), layer.bias.begin());
        off += layer.bias.size();
    }
}

// ---------------------------------------------------------------------
//  Forward / backward
// ---------------------------------------------------------------------

namespace {

DenseMatrix column_matrix(std::span<const double> v) {
    DenseMatrix m(static_cast<int>(v.size()), 1);
    std::copy(v.begin(), v.end(), m.data());
    return m;
}

}  // namespace

std::vector<double> predict(const Network& net, std::span<const double> capacities) {
    if (static_cast<int>(capacities.size()) != net.input_dim())
        throw std::invalid_argument("predict: capacity vector length mismatch");
    DenseMatrix x = column_matrix(capacities), z, y;
    for (const Layer& layer : net.layers) {
        layer_forward(layer, x, z, y);
        x = std::move(y);
    }
    std::vector<double> pooled;
    pool_forward(x, net.pool, pooled);
    std::vector<double> out(net.mask.size());
    mask_output(pooled, net.mask, out);
    return out;
}

ForwardTrace forward_trace(const Network& net, std::span<const double> capacities) {
    if (static_cast<int>(capacities.size()) != net.input_dim())
        throw std::invalid_argument("forward_trace: capacity vector length mismatch");
    ForwardTrace trace;
    trace.layers.resize(net.layers.size());
    DenseMatrix x = column_matrix(capacities), z, y;
    for (size_t d = 0; d < net.layers.size(); ++d) {
        layer_forward(net.layers[d], x, z, y, &trace.layers[d]);
        x = std::move(y);
    }
    std::vector<double> pooled;
    pool_forward(x, net.pool, pooled, &trace.pool_argmax);
    trace.prediction.resize(net.mask.size());
    mask_output(pooled, net.mask, trace.prediction);
    return trace;
}

void backward_accumulate(const Network& net, const ForwardTrace& trace,
                         std::span<const double> dloss_dpred, std::span<double> flat_grad) {
    if (trace.layers.size() != net.layers.size())
        throw std::invalid_argument("backward_accumulate: trace does not match network");
    if (dloss_dpred.size() != net.mask.size())
        throw std::invalid_argument("backward_accumulate: upstream gradient length mismatch");
    if (flat_grad.size() != net.parameter_count())
        throw std::invalid_argument("backward_accumulate: flat gradient length mismatch");

    const int n = net.input_dim();
    std::vector<double> dpooled(n);
    mask_backward(dloss_dpred, net.mask, dpooled);

    const int head_f = net.layers.back().out_features;
    DenseMatrix dy;
    pool_backward(dpooled, net.pool, head_f, trace.pool_argmax, dy);

    // Walk the flat vector backwards so each layer writes its own block.
    size_t block_end = flat_grad.size();
    for (size_t d = net.layers.size(); d-- > 0;) {
        const Layer& layer = net.layers[d];
        LayerGradients grads = make_layer_gradients(layer);
        layer_backward(layer, trace.layers[d], dy, grads, d > 0);
        const size_t block = count_weights(layer);
        const size_t base = block_end - block;
        size_t off = base;
        for (double g : grads.w_out) flat_grad[off++] += g;
        for (double g : grads.w_in) flat_grad[off++] += g;
        for (double g : grads.bias) flat_grad[off++] += g;
        block_end = base;
        if (d > 0) dy = std::move(grads.x);
    }
}

std::vector<double> model_backward(const Network& net, const ForwardTrace& trace,
                                   std::span<const double> dloss_dpred) {
    std::vector<double> grad(net.parameter_count(), 0.0);
    backward_accumulate(net, trace, dloss_dpred, grad);
    return grad;
}

// ---------------------------------------------------------------------
//  Checkpoints
// ---------------------------------------------------------------------

std::string Network::to_checkpoint_json() const {
    nlohmann::json j;
    j["format"] = "ginn-checkpoint-v1";
    j["layer_kind"] = to_string(kind);
    j["pool"] = to_string(pool);
    j["mask"] = mask;
    j["n"] = input_dim();
    j["graph_hash"] = graph_hash;
    auto layers_json = nlohmann::json::array();
    for (const Layer& layer : layers) {
        nlohmann::json lj;
        lj["in_features"] = layer.in_features;
        lj["out_features"] = layer.out_features;
        lj["activation"] = to_string(layer.activation);
        lj["w_out"] = layer.w_out;
        if (layer.kind == LayerKind::ewgi) lj["w_in"] = layer.w_in;
        lj["bias"] = layer.bias;
        layers_json.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers_json);
    return j.dump();
}

Network Network::from_checkpoint_json(const std::string& text,
                                      std::shared_ptr<const AugmentedAdjacency> ahat,
                                      uint64_t expected_graph_hash) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "ginn-checkpoint-v1")
        throw std::invalid_argument("checkpoint: unknown format");
    const uint64_t stored_hash = j.at("graph_hash").get<uint64_t>();
    if (stored_hash != expected_graph_hash)
        throw std::runtime_error("checkpoint: graph hash mismatch (model built against a different network)");
    if (!ahat || j.at("n").get<int>() != ahat->n)
        throw std::invalid_argument("checkpoint: adjacency size mismatch");

    Network net;
    net.kind = layer_kind_from_string(j.at("layer_kind").get<std::string>());
    net.pool = pool_from_string(j.at("pool").get<std::string>());
    net.mask = j.at("mask").get<std::vector<int>>();
    net.ahat = ahat;
    net.graph_hash = stored_hash;
    for (const auto& lj : j.at("layers")) {
        Layer layer = make_layer(net.kind, lj.at("in_features").get<int>(),
                                 lj.at("out_features").get<int>(),
                                 activation_from_string(lj.at("activation").get<std::string>()), ahat);
        const auto w_out = lj.at("w_out").get<std::vector<double>>();
        if (w_out.size() != layer.w_out.size()) throw std::invalid_argument("checkpoint: w_out size mismatch");
        layer.w_out = w_out;
        if (net.kind == LayerKind::ewgi) {
            const auto w_in = lj.at("w_in").get<std::vector<double>>();
            if (w_in.size() != layer.w_in.size()) throw std::invalid_argument("checkpoint: w_in size mismatch");
            layer.w_in = w_in;
        }
        const auto bias = lj.at("bias").get<std::vector<double>>();
        if (bias.size() != layer.bias.size()) throw std::invalid_argument("checkpoint: bias size mismatch");
        layer.bias = bias;
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw std::invalid_argument("checkpoint: no layers");
    return net;
}

void Network::save_checkpoint(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_checkpoint_json() << '\n';
}

}  // namespace ginn

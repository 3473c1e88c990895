#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ginn/layers.hpp"

namespace ginn {

// =====================================================================
//  Model configuration
// =====================================================================

struct ModelConfig {
    LayerKind layer_kind = LayerKind::gi;
    int depth = 3;  // total layer count H; the last layer is the linear head
    int features = 1;
    ActivationKind activation = ActivationKind::swish;
    PoolKind pool = PoolKind::none;
    uint64_t seed = 0;

    void validate() const;

    std::string to_json() const;
    /// Parses a config object; missing fields keep their defaults.
    static ModelConfig from_json(const std::string& text);
};

// =====================================================================
//  Network
// =====================================================================

/// Stack of H graph-instructed layers over one shared adjacency: the first
/// reads K=1 features, the last is linear, and the H-1 leading layers use
/// the configured activation. The head applies pooling (when F > 1) and
/// then the output mask.
///
/// Parameters flatten in canonical order: layers first to last; within a
/// layer w_out, then w_in (EWGI only), then bias, each in storage order.
struct Network {
    LayerKind kind = LayerKind::gi;
    std::vector<Layer> layers;
    PoolKind pool = PoolKind::none;
    std::vector<int> mask;  // output node indices, strictly increasing
    std::shared_ptr<const AugmentedAdjacency> ahat;
    uint64_t graph_hash = 0;

    int input_dim() const { return ahat ? ahat->n : 0; }
    int output_dim() const { return static_cast<int>(mask.size()); }

    size_t parameter_count() const;
    std::vector<double> parameters_flat() const;
    void set_parameters_flat(std::span<const double> theta);

    std::string to_checkpoint_json() const;
    static Network from_checkpoint_json(const std::string& text,
                                        std::shared_ptr<const AugmentedAdjacency> ahat,
                                        uint64_t expected_graph_hash);
    void save_checkpoint(const std::string& path) const;
};

Network build_network(const ModelConfig& cfg, std::shared_ptr<const AugmentedAdjacency> ahat,
                      std::vector<int> sink_incoming, uint64_t graph_hash);

// =====================================================================
//  Forward / backward
// =====================================================================

/// Per-sample forward state for the backward pass.
struct ForwardTrace {
    std::vector<LayerTrace> layers;
    std::vector<int> pool_argmax;
    std::vector<double> prediction;  // output_dim
};

/// Composition of layer forwards, pooling, and masking. Pure.
std::vector<double> predict(const Network& net, std::span<const double> capacities);

/// Forward that also records everything backward needs.
ForwardTrace forward_trace(const Network& net, std::span<const double> capacities);

/// Gradient of a scalar loss w.r.t. every trainable parameter, in canonical
/// flat order, given dL/d(prediction). Accumulates into `flat_grad`.
void backward_accumulate(const Network& net, const ForwardTrace& trace,
                         std::span<const double> dloss_dpred, std::span<double> flat_grad);

/// Convenience wrapper returning a fresh flat gradient.
std::vector<double> model_backward(const Network& net, const ForwardTrace& trace,
                                   std::span<const double> dloss_dpred);

}  // namespace ginn

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ginn/graph.hpp"
#include "ginn/numerics.hpp"

namespace ginn {

// =====================================================================
//  Graph-instructed layers
// =====================================================================
//
// A GI layer maps R^{n x K} -> R^{n x F} through the self-loop-augmented
// adjacency Ahat: column l of the pre-activation is
//
//     Z[:,l] = sum_k Ahat^T (w_out[k,l] (.) X[:,k]) + B[:,l]
//
// so node i contributes x_ik scaled by its own weight to every neighbor.
// The edge-wise (EWGI) variant adds receiving-side weights:
//
//     Z[:,l] = sum_k w_in[k,l] (.) ( Ahat^T (w_out[k,l] (.) X[:,k]) ) + B[:,l]
//
// giving the pair (i, j) the effective weight w_out,i * w_in,j on every
// adjacency entry. Weight counts: nKF + nF for GI, 2nKF + nF for EWGI.

enum class LayerKind { gi, ewgi };
enum class PoolKind { reduce_max, reduce_mean, none };

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);
std::string to_string(PoolKind kind);
PoolKind pool_from_string(const std::string& name);

struct Layer {
    LayerKind kind = LayerKind::gi;
    int n = 0;             // graph nodes
    int in_features = 0;   // K
    int out_features = 0;  // F
    // Weight vectors per (k, l) pair, laid out [(k*F + l)*n + i]. w_in is
    // empty for GI layers.
    std::vector<double> w_out;
    std::vector<double> w_in;
    // Biases, row-major n x F: [j*F + l].
    std::vector<double> bias;
    ActivationKind activation = ActivationKind::linear;
    std::shared_ptr<const AugmentedAdjacency> ahat;

    double& w_out_at(int k, int l, int i) { return w_out[(static_cast<size_t>(k) * out_features + l) * n + i]; }
    double& w_in_at(int k, int l, int i) { return w_in[(static_cast<size_t>(k) * out_features + l) * n + i]; }
    double& bias_at(int j, int l) { return bias[static_cast<size_t>(j) * out_features + l]; }
    double w_out_at(int k, int l, int i) const { return w_out[(static_cast<size_t>(k) * out_features + l) * n + i]; }
    double w_in_at(int k, int l, int i) const { return w_in[(static_cast<size_t>(k) * out_features + l) * n + i]; }
    double bias_at(int j, int l) const { return bias[static_cast<size_t>(j) * out_features + l]; }
};

/// Zero-initialized layer bound to a shared adjacency.
Layer make_layer(LayerKind kind, int in_features, int out_features, ActivationKind activation,
                 std::shared_ptr<const AugmentedAdjacency> ahat);

/// Glorot-fills the weight vectors (fan_in = nK, fan_out = nF) from the
/// given stream, in storage order (w_out, then w_in). Biases stay zero.
void init_layer(Layer& layer, Rng& rng);

/// Trainable scalar count: nKF + nF (GI) or 2nKF + nF (EWGI); always equal
/// to the allocated parameter array sizes.
size_t count_weights(const Layer& layer);

// ---------------------------------------------------------------------
//  Forward / backward
// ---------------------------------------------------------------------

/// Saved forward state consumed by the backward pass.
struct LayerTrace {
    DenseMatrix x;              // input, n x K
    DenseMatrix z;              // pre-activation, n x F
    std::vector<double> t_hat;  // EWGI only: Ahat^T(w_out (.) x_k), per (k,l)
};

/// Computes Z and Y = activation(Z). When trace is non-null the inputs and
/// pre-activations (and EWGI intermediates) are stored for backward.
void layer_forward(const Layer& layer, const DenseMatrix& x, DenseMatrix& z, DenseMatrix& y,
                   LayerTrace* trace = nullptr);

struct LayerGradients {
    std::vector<double> w_out;
    std::vector<double> w_in;
    std::vector<double> bias;
    DenseMatrix x;  // dL/dX, n x K
};

LayerGradients make_layer_gradients(const Layer& layer);

/// Chain rule through the layer. Accumulates parameter gradients into
/// `grads` (caller zeroes between batches) and, when want_dx is set, also
/// accumulates dL/dX.
void layer_backward(const Layer& layer, const LayerTrace& trace, const DenseMatrix& dy,
                    LayerGradients& grads, bool want_dx = true);

/// Dense (nK) x (nF) operator M with vertcat(Z - B) = M^T vertcat(X), where
/// vertcat stacks columns. Test oracle; guarded to desk scale.
DenseMatrix materialize_dense(const Layer& layer);

// ---------------------------------------------------------------------
//  Output head pieces
// ---------------------------------------------------------------------

/// Per-node reduction across the F features. `none` requires F = 1 and is
/// the identity. For reduce_max, argmax (lowest index on ties) is recorded
/// for the backward routing.
void pool_forward(const DenseMatrix& y, PoolKind kind, std::vector<double>& out,
                  std::vector<int>* argmax = nullptr);

/// Scatters d(pooled) back to d(Y): all to the argmax feature for max,
/// spread 1/F for mean.
void pool_backward(std::span<const double> dpooled, PoolKind kind, int out_features,
                   const std::vector<int>& argmax, DenseMatrix& dy);

/// Gathers the listed node outputs (indices strictly increasing).
void mask_output(std::span<const double> values, std::span<const int> indices,
                 std::span<double> out);

/// Scatters gradients back to the listed positions, zero elsewhere.
void mask_backward(std::span<const double> dmasked, std::span<const int> indices,
                   std::span<double> dvalues);

}  // namespace ginn

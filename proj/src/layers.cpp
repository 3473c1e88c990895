#include "ginn/layers.hpp"

#include <algorithm>
#include <stdexcept>

namespace ginn {

std::string to_string(LayerKind kind) {
    return kind == LayerKind::gi ? "gi" : "ewgi";
}

LayerKind layer_kind_from_string(const std::string& name) {
    if (name == "gi") return LayerKind::gi;
    if (name == "ewgi") return LayerKind::ewgi;
    throw std::invalid_argument("unknown layer kind: " + name);
}

std::string to_string(PoolKind kind) {
    switch (kind) {
        case PoolKind::reduce_max: return "reduce_max";
        case PoolKind::reduce_mean: return "reduce_mean";
        case PoolKind::none: return "none";
    }
    throw std::logic_error("to_string(PoolKind): bad kind");
}

PoolKind pool_from_string(const std::string& name) {
    if (name == "reduce_max") return PoolKind::reduce_max;
    if (name == "reduce_mean") return PoolKind::reduce_mean;
    if (name == "none") return PoolKind::none;
    throw std::invalid_argument("unknown pool kind: " + name);
}

Layer make_layer(LayerKind kind, int in_features, int out_features, ActivationKind activation,
                 std::shared_ptr<const AugmentedAdjacency> ahat) {
    if (!ahat) throw std::invalid_argument("make_layer: null adjacency");
    if (in_features < 1 || out_features < 1)
        throw std::invalid_argument("make_layer: feature counts must be positive");
    Layer layer;
    layer.kind = kind;
    layer.n = ahat->n;
    layer.in_features = in_features;
    layer.out_features = out_features;
    layer.activation = activation;
    layer.ahat = std::move(ahat);
    const size_t nkf = static_cast<size_t>(layer.n) * in_features * out_features;
    layer.w_out.assign(nkf, 0.0);
    if (kind == LayerKind::ewgi) layer.w_in.assign(nkf, 0.0);
    layer.bias.assign(static_cast<size_t>(layer.n) * out_features, 0.0);
    return layer;
}

void init_layer(Layer& layer, Rng& rng) {
    const int fan_in = layer.n * layer.in_features;
    const int fan_out = layer.n * layer.out_features;
    glorot_uniform_fill(fan_in, fan_out, layer.w_out, rng);
    if (layer.kind == LayerKind::ewgi) glorot_uniform_fill(fan_in, fan_out, layer.w_in, rng);
}

size_t count_weights(const Layer& layer) {
    const size_t allocated = layer.w_out.size() + layer.w_in.size() + layer.bias.size();
    const size_t n = layer.n, k = layer.in_features, f = layer.out_features;
    const size_t formula = (layer.kind == LayerKind::gi) ? n * k * f + n * f : 2 * n * k * f + n * f;
    if (allocated != formula) throw std::logic_error("count_weights: allocation out of sync");
    return formula;
}

// ---------------------------------------------------------------------
//  Forward
// ---------------------------------------------------------------------

void layer_forward(const Layer& layer, const DenseMatrix& x, DenseMatrix& z, DenseMatrix& y,
                   LayerTrace* trace) {
    const int n = layer.n, K = layer.in_features, F = layer.out_features;
    if (x.rows() != n || x.cols() != K) throw std::invalid_argument("layer_forward: input shape mismatch");
    z = DenseMatrix(n, F);
    y = DenseMatrix(n, F);

    std::vector<double> scaled(n), propagated(n);
    const bool edge_wise = layer.kind == LayerKind::ewgi;
    if (trace && edge_wise) trace->t_hat.assign(static_cast<size_t>(n) * K * F, 0.0);

    // Both kinds accumulate per input feature in the same order, so an
    // edge-wise layer with unit incoming weights reproduces the plain layer
    // bitwise.
    for (int l = 0; l < F; ++l) {
        for (int j = 0; j < n; ++j) z(j, l) = layer.bias_at(j, l);
        for (int k = 0; k < K; ++k) {
            const size_t off = (static_cast<size_t>(k) * F + l) * n;
            const double* wo = &layer.w_out[off];
            for (int i = 0; i < n; ++i) scaled[i] = wo[i] * x(i, k);
            spmat_t_vec(*layer.ahat, scaled, propagated);
            if (!edge_wise) {
                for (int j = 0; j < n; ++j) z(j, l) += propagated[j];
            } else {
                const double* wi = &layer.w_in[off];
                if (trace)
                    std::copy(propagated.begin(), propagated.end(), trace->t_hat.begin() + off);
                for (int j = 0; j < n; ++j) z(j, l) += wi[j] * propagated[j];
            }
        }
    }

    const double* zp = z.data();
    double* yp = y.data();
    for (size_t idx = 0; idx < z.size(); ++idx) yp[idx] = apply_activation(layer.activation, zp[idx]);

    if (trace) {
        trace->x = x;
        trace->z = z;
    }
}

// ---------------------------------------------------------------------
//  Backward
// ---------------------------------------------------------------------

LayerGradients make_layer_gradients(const Layer& layer) {
    LayerGradients g;
    g.w_out.assign(layer.w_out.size(), 0.0);
    g.w_in.assign(layer.w_in.size(), 0.0);
    g.bias.assign(layer.bias.size(), 0.0);
    g.x = DenseMatrix(layer.n, layer.in_features);
    return g;
}

void layer_backward(const Layer& layer, const LayerTrace& trace, const DenseMatrix& dy,
                    LayerGradients& grads, bool want_dx) {
    const int n = layer.n, K = layer.in_features, F = layer.out_features;
    if (dy.rows() != n || dy.cols() != F)
        throw std::invalid_argument("layer_backward: upstream gradient shape mismatch");
    if (trace.x.rows() != n || trace.x.cols() != K)
        throw std::invalid_argument("layer_backward: trace does not match layer");

    // dL/dZ = dL/dY (.) act'(Z)
    DenseMatrix dz(n, F);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < F; ++l)
            dz(j, l) = dy(j, l) * activation_derivative(layer.activation, trace.z(j, l));

    for (size_t idx = 0; idx < grads.bias.size(); ++idx) grads.bias[idx] += dz.data()[idx];

    std::vector<double> column(n), back(n);
    const bool edge_wise = layer.kind == LayerKind::ewgi;

    for (int l = 0; l < F; ++l) {
        if (!edge_wise) {
            for (int j = 0; j < n; ++j) column[j] = dz(j, l);
            spmat_vec(*layer.ahat, column, back);  // back_i = sum_j ahat_ij dZ_jl
            for (int k = 0; k < K; ++k) {
                const size_t off = (static_cast<size_t>(k) * F + l) * n;
                double* gw = &grads.w_out[off];
                const double* w = &layer.w_out[off];
                for (int i = 0; i < n; ++i) {
                    gw[i] += trace.x(i, k) * back[i];
                    if (want_dx) grads.x(i, k) += w[i] * back[i];
                }
            }
        } else {
            for (int k = 0; k < K; ++k) {
                const size_t off = (static_cast<size_t>(k) * F + l) * n;
                const double* wo = &layer.w_out[off];
                const double* wi = &layer.w_in[off];
                const double* t_hat = &trace.t_hat[off];
                double* gwo = &grads.w_out[off];
                double* gwi = &grads.w_in[off];
                for (int j = 0; j < n; ++j) {
                    const double d = dz(j, l);
                    column[j] = wi[j] * d;
                    gwi[j] += t_hat[j] * d;
                }
                spmat_vec(*layer.ahat, column, back);
                for (int i = 0; i < n; ++i) {
                    gwo[i] += trace.x(i, k) * back[i];
                    if (want_dx) grads.x(i, k) += wo[i] * back[i];
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
//  Dense materialization (oracle)
// ---------------------------------------------------------------------

DenseMatrix materialize_dense(const Layer& layer) {
    const int n = layer.n, K = layer.in_features, F = layer.out_features;
    if (static_cast<long long>(n) * K * F > 100000)
        throw std::invalid_argument("materialize_dense: size guard exceeded");
    DenseMatrix m(n * K, n * F);
    const SparseBinaryCsr& a = layer.ahat->mat;
    for (int i = 0; i < n; ++i) {
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
            const int j = a.col_idx[p];
            for (int k = 0; k < K; ++k)
                for (int l = 0; l < F; ++l) {
                    const double wij = layer.kind == LayerKind::gi
                                           ? layer.w_out_at(k, l, i)
                                           : layer.w_out_at(k, l, i) * layer.w_in_at(k, l, j);
                    m(k * n + i, l * n + j) = wij;
                }
        }
    }
    return m;
}

// ---------------------------------------------------------------------
//  Pool / mask
// ---------------------------------------------------------------------

void pool_forward(const DenseMatrix& y, PoolKind kind, std::vector<double>& out,
                  std::vector<int>* argmax) {
    const int n = y.rows(), F = y.cols();
    if (kind == PoolKind::none && F != 1)
        throw std::invalid_argument("pool_forward: 'none' requires F = 1");
    if (kind != PoolKind::none && F <= 1)
        throw std::invalid_argument("pool_forward: pooling requires F > 1");
    out.resize(n);
    if (argmax) argmax->assign(n, 0);
    for (int j = 0; j < n; ++j) {
        switch (kind) {
            case PoolKind::none:
                out[j] = y(j, 0);
                break;
            case PoolKind::reduce_mean: {
                double sum = 0.0;
                for (int l = 0; l < F; ++l) sum += y(j, l);
                out[j] = sum / F;
                break;
            }
            case PoolKind::reduce_max: {
                int arg = 0;
                double best = y(j, 0);
                for (int l = 1; l < F; ++l)
                    if (y(j, l) > best) {  // strict: ties keep the lowest index
                        best = y(j, l);
                        arg = l;
                    }
                out[j] = best;
                if (argmax) (*argmax)[j] = arg;
                break;
            }
        }
    }
}

void pool_backward(std::span<const double> dpooled, PoolKind kind, int out_features,
                   const std::vector<int>& argmax, DenseMatrix& dy) {
    const int n = static_cast<int>(dpooled.size());
    dy = DenseMatrix(n, out_features);
    for (int j = 0; j < n; ++j) {
        switch (kind) {
            case PoolKind::none:
                dy(j, 0) = dpooled[j];
                break;
            case PoolKind::reduce_mean:
                for (int l = 0; l < out_features; ++l) dy(j, l) = dpooled[j] / out_features;
                break;
            case PoolKind::reduce_max:
                dy(j, argmax[j]) = dpooled[j];
                break;
        }
    }
}

void mask_output(std::span<const double> values, std::span<const int> indices,
                 std::span<double> out) {
    if (out.size() != indices.size()) throw std::invalid_argument("mask_output: size mismatch");
    for (size_t q = 0; q < indices.size(); ++q) {
        const int idx = indices[q];
        if (idx < 0 || idx >= static_cast<int>(values.size()))
            throw std::out_of_range("mask_output: index out of range");
        if (q > 0 && indices[q] <= indices[q - 1])
            throw std::invalid_argument("mask_output: indices must be strictly increasing");
        out[q] = values[idx];
    }
}

void mask_backward(std::span<const double> dmasked, std::span<const int> indices,
                   std::span<double> dvalues) {
    std::fill(dvalues.begin(), dvalues.end(), 0.0);
    for (size_t q = 0; q < indices.size(); ++q) dvalues[indices[q]] = dmasked[q];
}

}  // namespace ginn

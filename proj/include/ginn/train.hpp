#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ginn/flownet.hpp"
#include "ginn/model.hpp"

namespace ginn {

// =====================================================================
//  Training protocol
// =====================================================================

struct TrainConfig {
    double lr = 0.002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int es_patience = 550;
    int es_start_epoch = 200;
    bool early_stop = true;
    bool restore_best = true;
    double plateau_factor = 0.5;
    int plateau_patience = 50;
    double min_lr = 1e-6;
    int max_epochs = 5000;
    int batch_size = 32;
    double val_fraction = 0.2;
    uint64_t seed = 0;

    void validate() const;

    std::string to_json() const;
    /// Missing fields keep their defaults.
    static TrainConfig from_json(const std::string& text);
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long long t = 0;

    explicit AdamState(size_t dim = 0) : m(dim, 0.0), v(dim, 0.0) {}
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<double> lr;  // rate in effect during each epoch
    int best_epoch = 0;      // 1-based; 0 when no epoch ran
    std::string stop_reason;

    int epochs() const { return static_cast<int>(val_loss.size()); }

    /// JSON lines, one object per epoch: {"epoch","train_loss","val_loss","lr"}.
    std::string to_jsonl() const;
    void save_jsonl(const std::string& path) const;
};

// =====================================================================
//  Operations
// =====================================================================

/// One Adam update: t += 1; m, v decay toward g and g^2; parameters move
/// along the bias-corrected step lr * m_hat / (sqrt(v_hat) + eps).
/// Throws on non-finite gradients.
void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad,
               double lr, const TrainConfig& cfg);

/// Mean over batch and components of the squared error; gradient w.r.t.
/// predictions is 2 (pred - target) / (batch * m).
double mse_loss(const DenseMatrix& pred, const DenseMatrix& target, DenseMatrix* dpred = nullptr);

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> val;
};

/// Seed-shuffled disjoint exhaustive split of [0, n_rows).
SplitIndices split_dataset(int n_rows, double val_fraction, uint64_t seed);

struct TrainResult {
    Network network;
    TrainHistory history;
};

/// Runs the full protocol: per-epoch reshuffled mini-batches, Adam updates,
/// reduce-on-plateau learning rate, early stopping from es_start_epoch
/// onward, and best-weight restoration. "Improved" always means strictly
/// lower than the best validation loss seen so far.
TrainResult train(Network net, const Dataset& data, std::span<const int> train_rows,
                  std::span<const int> val_rows, const TrainConfig& cfg);

/// Mean squared error of the network over the given dataset rows.
double evaluate_mse(const Network& net, const Dataset& data, std::span<const int> rows);

}  // namespace ginn

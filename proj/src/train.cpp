#include "ginn/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace ginn {

// ---------------------------------------------------------------------
//  TrainConfig
// ---------------------------------------------------------------------

void TrainConfig::validate() const {
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be positive");
    if (!(plateau_factor > 0.0 && plateau_factor < 1.0))
        throw std::invalid_argument("TrainConfig: plateau_factor must be in (0, 1)");
    if (!(min_lr <= lr)) throw std::invalid_argument("TrainConfig: min_lr must not exceed lr");
    if (es_patience < 1 || plateau_patience < 1)
        throw std::invalid_argument("TrainConfig: patience values must be positive");
    if (es_start_epoch < 0) throw std::invalid_argument("TrainConfig: es_start_epoch must be >= 0");
    if (max_epochs < 0) throw std::invalid_argument("TrainConfig: max_epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw std::invalid_argument("TrainConfig: val_fraction must be in (0, 1)");
}

std::string TrainConfig::to_json() const {
    nlohmann::json j;
    j["lr"] = lr;
    j["beta1"] = beta1;
    j["beta2"] = beta2;
    j["adam_eps"] = adam_eps;
    j["es_patience"] = es_patience;
    j["es_start_epoch"] = es_start_epoch;
    j["early_stop"] = early_stop;
    j["restore_best"] = restore_best;
    j["plateau_factor"] = plateau_factor;
    j["plateau_patience"] = plateau_patience;
    j["min_lr"] = min_lr;
    j["max_epochs"] = max_epochs;
    j["batch_size"] = batch_size;
    j["val_fraction"] = val_fraction;
    j["seed"] = seed;
    return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    TrainConfig cfg;
    if (j.contains("lr")) cfg.lr = j.at("lr").get<double>();
    if (j.contains("beta1")) cfg.beta1 = j.at("beta1").get<double>();
    if (j.contains("beta2")) cfg.beta2 = j.at("beta2").get<double>();
    if (j.contains("adam_eps")) cfg.adam_eps = j.at("adam_eps").get<double>();
    if (j.contains("es_patience")) cfg.es_patience = j.at("es_patience").get<int>();
    if (j.contains("es_start_epoch")) cfg.es_start_epoch = j.at("es_start_epoch").get<int>();
    if (j.contains("early_stop")) cfg.early_stop = j.at("early_stop").get<bool>();
    if (j.contains("restore_best")) cfg.restore_best = j.at("restore_best").get<bool>();
    if (j.contains("plateau_factor")) cfg.plateau_factor = j.at("plateau_factor").get<double>();
    if (j.contains("plateau_patience")) cfg.plateau_patience = j.at("plateau_patience").get<int>();
    if (j.contains("min_lr")) cfg.min_lr = j.at("min_lr").get<double>();
    if (j.contains("max_epochs")) cfg.max_epochs = j.at("max_epochs").get<int>();
    if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<int>();
    if (j.contains("val_fraction")) cfg.val_fraction = j.at("val_fraction").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------
//  TrainHistory
// ---------------------------------------------------------------------

std::string TrainHistory::to_jsonl() const {
    std::string out;
    for (int e = 0; e < epochs(); ++e) {
        nlohmann::json j;
        j["epoch"] = e + 1;
        j["train_loss"] = train_loss[e];
        j["val_loss"] = val_loss[e];
        j["lr"] = lr[e];
        out += j.dump();
        out += '\n';
    }
    return out;
}

void TrainHistory::save_jsonl(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_jsonl();
}

// ---------------------------------------------------------------------
//  Adam
// ---------------------------------------------------------------------

void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad,
               double lr, const TrainConfig& cfg) {
    if (theta.size() != grad.size() || state.m.size() != theta.size() || state.v.size() != theta.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    for (double g : grad)
        if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");

    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        theta[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
}

// ---------------------------------------------------------------------
//  Loss
// ---------------------------------------------------------------------

double mse_loss(const DenseMatrix& pred, const DenseMatrix& target, DenseMatrix* dpred) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols())
        throw std::invalid_argument("mse_loss: shape mismatch");
    const size_t count = pred.size();
    if (count == 0) throw std::invalid_argument("mse_loss: empty batch");
    if (dpred) *dpred = DenseMatrix(pred.rows(), pred.cols());
    double sum = 0.0;
    for (size_t i = 0; i < count; ++i) {
        const double diff = pred.data()[i] - target.data()[i];
        sum += diff * diff;
        if (dpred) dpred->data()[i] = 2.0 * diff / static_cast<double>(count);
    }
    return sum / static_cast<double>(count);
}

// ---------------------------------------------------------------------
//  Split
// ---------------------------------------------------------------------

SplitIndices split_dataset(int n_rows, double val_fraction, uint64_t seed) {
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw std::invalid_argument("split_dataset: val_fraction must be in (0, 1)");
    const int val_count = static_cast<int>(std::llround(n_rows * val_fraction));
    if (val_count < 1 || val_count >= n_rows)
        throw std::invalid_argument("split_dataset: degenerate split");
    std::vector<int> order(n_rows);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    SplitIndices split;
    split.train.assign(order.begin(), order.end() - val_count);
    split.val.assign(order.end() - val_count, order.end());
    return split;
}

// ---------------------------------------------------------------------
//  Training loop
// ---------------------------------------------------------------------

double evaluate_mse(const Network& net, const Dataset& data, std::span<const int> rows) {
    if (rows.empty()) throw std::invalid_argument("evaluate_mse: empty row set");
    const int m = net.output_dim();
    double sum = 0.0;
    for (int r : rows) {
        const std::vector<double> pred = predict(net, data.capacities.row(r));
        for (int c = 0; c < m; ++c) {
            const double diff = pred[c] - data.flows(r, c);
            sum += diff * diff;
        }
    }
    return sum / (static_cast<double>(rows.size()) * m);
}

TrainResult train(Network net, const Dataset& data, std::span<const int> train_rows,
                  std::span<const int> val_rows, const TrainConfig& cfg) {
    cfg.validate();
    if (train_rows.empty() || val_rows.empty())
        throw std::invalid_argument("train: train and validation sets must be nonempty");
    if (net.output_dim() != data.flows.cols())
        throw std::invalid_argument("train: network output does not match dataset targets");

    const int m = net.output_dim();
    const int n_train = static_cast<int>(train_rows.size());
    std::vector<double> theta = net.parameters_flat();
    AdamState adam(theta.size());
    std::vector<double> grad(theta.size());

    TrainResult result;
    result.history.stop_reason = "max_epochs";
    double best_vl = std::numeric_limits<double>::infinity();
    std::vector<double> best_theta = theta;
    double lr = cfg.lr;
    int es_counter = 0;
    int plateau_counter = 0;

    std::vector<int> order(train_rows.begin(), train_rows.end());
    std::vector<ForwardTrace> traces(std::min<size_t>(cfg.batch_size, order.size()));

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        Rng shuffle_rng = Rng::derive(cfg.seed, static_cast<uint64_t>(epoch));
        shuffle_rng.shuffle(order);

        double epoch_loss_sum = 0.0;
        for (int start = 0; start < n_train; start += cfg.batch_size) {
            const int batch_n = std::min(cfg.batch_size, n_train - start);
            DenseMatrix preds(batch_n, m), targets(batch_n, m);
            for (int b = 0; b < batch_n; ++b) {
                const int r = order[start + b];
                traces[b] = forward_trace(net, data.capacities.row(r));
                for (int c = 0; c < m; ++c) {
                    preds(b, c) = traces[b].prediction[c];
                    targets(b, c) = data.flows(r, c);
                }
            }
            DenseMatrix dpred;
            const double loss = mse_loss(preds, targets, &dpred);
            if (!std::isfinite(loss))
                throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
            epoch_loss_sum += loss * batch_n;

            std::fill(grad.begin(), grad.end(), 0.0);
            for (int b = 0; b < batch_n; ++b)
                backward_accumulate(net, traces[b], dpred.row(b), grad);
            adam_step(adam, theta, grad, lr, cfg);
            net.set_parameters_flat(theta);
        }

        const double train_loss = epoch_loss_sum / n_train;
        const double val_loss = evaluate_mse(net, data, val_rows);
        if (!std::isfinite(val_loss))
            throw std::runtime_error("train: non-finite validation loss at epoch " + std::to_string(epoch));
        result.history.train_loss.push_back(train_loss);
        result.history.val_loss.push_back(val_loss);
        result.history.lr.push_back(lr);

        const bool improved = val_loss < best_vl;
        if (improved) {
            best_vl = val_loss;
            best_theta = theta;
            result.history.best_epoch = epoch;
            es_counter = 0;
            plateau_counter = 0;
        } else {
            // The early-stopping window only opens after es_start_epoch.
            if (epoch > cfg.es_start_epoch) ++es_counter;
            ++plateau_counter;
        }

        if (plateau_counter >= cfg.plateau_patience) {
            lr = std::max(lr * cfg.plateau_factor, cfg.min_lr);
            plateau_counter = 0;
        }
        if (cfg.early_stop && es_counter >= cfg.es_patience) {
            result.history.stop_reason = "early_stop";
            break;
        }
    }

    if (cfg.restore_best && result.history.best_epoch > 0) net.set_parameters_flat(best_theta);
    result.network = std::move(net);
    return result;
}

}  // namespace ginn

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ginn/flownet.hpp"
#include "ginn/metrics.hpp"
#include "ginn/model.hpp"
#include "ginn/train.hpp"

namespace ginn {

inline constexpr const char* kVersion = "0.1.0";

// =====================================================================
//  Configuration grid
// =====================================================================

/// Cartesian configuration grid. Pools apply only when features > 1
/// (features = 1 forces pool = none), so the default grid expands to
/// |activations| * |depths| * 5 = 60 configurations per layer kind.
struct GridSpec {
    std::vector<LayerKind> kinds = {LayerKind::gi, LayerKind::ewgi};
    std::vector<ActivationKind> activations = {ActivationKind::elu, ActivationKind::swish,
                                               ActivationKind::softplus};
    std::vector<int> depths = {3, 5, 7, 9};
    std::vector<int> features = {1, 5, 10};
    std::vector<PoolKind> pools = {PoolKind::reduce_max, PoolKind::reduce_mean};
    std::vector<uint64_t> seeds = {0, 1, 2, 3, 4};

    void validate() const;
    std::string to_json() const;
    /// Missing fields keep their defaults.
    static GridSpec from_json(const std::string& text);
};

struct RunSpec {
    std::string config_id;
    ModelConfig config;  // seed field carries the run seed
    uint64_t seed = 0;
};

/// Deterministic lexicographic expansion: kind, activation, depth,
/// features, pool, seed.
std::vector<RunSpec> expand_grid(const GridSpec& spec);

std::string config_id_of(const ModelConfig& cfg);

// =====================================================================
//  Evaluation
// =====================================================================

/// Metrics of a model over dataset rows [row_begin, row_end).
ErrorPoint evaluate(const Network& net, const Dataset& data, int row_begin, int row_end,
                    const std::string& config_id = "", uint64_t seed = 0);

/// Loads a checkpoint against the dataset's network (the stored graph hash
/// must match) and evaluates it.
ErrorPoint evaluate_checkpoint(const std::string& checkpoint_path, const Dataset& data,
                               int row_begin, int row_end);

std::string error_point_to_json(const ErrorPoint& point);

// =====================================================================
//  Grid runner
// =====================================================================

struct ExperimentOptions {
    int train_rows = 500;  // rows [0, train_rows) feed training + validation
    int test_rows = 3000;  // rows [train_rows, train_rows + test_rows)
    int workers = 1;
    bool verbose = false;
};

struct RunRecord {
    std::string config_id;
    uint64_t seed = 0;
    ModelConfig config;
    std::string status;  // "ok" or "failed"
    std::string error;
    double mre_av = 0.0;
    double mre_phi = 0.0;
    size_t n_params = 0;
    bool is_median = false;
    bool reused = false;  // satisfied from a previous run's outputs
    std::string dir;      // run directory, relative to the output dir
};

struct Manifest {
    uint64_t dataset_hash = 0;
    int train_rows = 0;
    int test_rows = 0;
    std::string train_config_json;
    std::vector<RunRecord> runs;

    std::string to_json() const;
    static Manifest from_json(const std::string& text);
    static Manifest load(const std::string& path);
};

/// Trains and evaluates every run of the grid. Each run writes
/// checkpoint.json, history.jsonl, and result.json into its own directory
/// under out_dir/runs/; completed runs whose recorded dataset/config hashes
/// still match are skipped. The manifest (out_dir/manifest.json) lists runs
/// in expansion order and marks the median model of each configuration, so
/// reruns with identical inputs produce byte-identical manifests.
Manifest run_experiment(const Dataset& data, const GridSpec& spec, const TrainConfig& base_train_cfg,
                        const ExperimentOptions& opts, const std::string& out_dir);

/// Error-plane CSV: config_id, layer_kind, seed, activation, H, F, pool,
/// n_params, mre_av, mre_phi, is_median.
void export_plane_csv(const Manifest& manifest, const std::string& csv_path);

}  // namespace ginn

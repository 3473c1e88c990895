#include "ginn/experiment.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace fs = std::filesystem;

namespace ginn {

// ---------------------------------------------------------------------
//  GridSpec
// ---------------------------------------------------------------------

void GridSpec::validate() const {
    if (kinds.empty() || activations.empty() || depths.empty() || features.empty() || seeds.empty())
        throw std::invalid_argument("GridSpec: empty dimension");
    for (int d : depths)
        if (d < 1) throw std::invalid_argument("GridSpec: depth must be >= 1");
    for (int f : features)
        if (f < 1) throw std::invalid_argument("GridSpec: features must be >= 1");
    bool has_multi = false;
    for (int f : features) has_multi = has_multi || f > 1;
    if (has_multi && pools.empty())
        throw std::invalid_argument("GridSpec: features > 1 requires at least one pool kind");
    for (PoolKind p : pools)
        if (p == PoolKind::none) throw std::invalid_argument("GridSpec: 'none' is implied by F = 1");
}

std::string GridSpec::to_json() const {
    nlohmann::json j;
    auto names = [](const auto& xs, auto f) {
        auto arr = nlohmann::json::array();
        for (const auto& x : xs) arr.push_back(f(x));
        return arr;
    };
    j["kinds"] = names(kinds, [](LayerKind k) { return to_string(k); });
    j["activations"] = names(activations, [](ActivationKind a) { return to_string(a); });
    j["depths"] = depths;
    j["features"] = features;
    j["pools"] = names(pools, [](PoolKind p) { return to_string(p); });
    j["seeds"] = seeds;
    return j.dump();
}

GridSpec GridSpec::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    GridSpec spec;
    if (j.contains("kinds")) {
        spec.kinds.clear();
        for (const auto& s : j.at("kinds")) spec.kinds.push_back(layer_kind_from_string(s.get<std::string>()));
    }
    if (j.contains("activations")) {
        spec.activations.clear();
        for (const auto& s : j.at("activations"))
            spec.activations.push_back(activation_from_string(s.get<std::string>()));
    }
    if (j.contains("depths")) spec.depths = j.at("depths").get<std::vector<int>>();
    if (j.contains("features")) spec.features = j.at("features").get<std::vector<int>>();
    if (j.contains("pools")) {
        spec.pools.clear();
        for (const auto& s : j.at("pools")) spec.pools.push_back(pool_from_string(s.get<std::string>()));
    }
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    spec.validate();
    return spec;
}

std::string config_id_of(const ModelConfig& cfg) {
    return to_string(cfg.layer_kind) + "-" + to_string(cfg.activation) + "-H" +
           std::to_string(cfg.depth) + "-F" + std::to_string(cfg.features) + "-" +
           to_string(cfg.pool);
}

std::vector<RunSpec> expand_grid(const GridSpec& spec) {
    spec.validate();
    std::vector<RunSpec> runs;
    for (LayerKind kind : spec.kinds)
        for (ActivationKind act : spec.activations)
            for (int depth : spec.depths)
                for (int f : spec.features) {
                    const std::vector<PoolKind> pool_choices =
                        f == 1 ? std::vector<PoolKind>{PoolKind::none} : spec.pools;
                    for (PoolKind pool : pool_choices)
                        for (uint64_t seed : spec.seeds) {
                            RunSpec run;
                            run.config.layer_kind = kind;
                            run.config.activation = act;
                            run.config.depth = depth;
                            run.config.features = f;
                            run.config.pool = pool;
                            run.config.seed = seed;
                            run.seed = seed;
                            run.config_id = config_id_of(run.config);
                            runs.push_back(std::move(run));
                        }
                }
    return runs;
}

// ---------------------------------------------------------------------
//  Evaluation
// ---------------------------------------------------------------------

ErrorPoint evaluate(const Network& net, const Dataset& data, int row_begin, int row_end,
                    const std::string& config_id, uint64_t seed) {
    if (row_begin < 0 || row_end > data.sample_count() || row_begin >= row_end)
        throw std::invalid_argument("evaluate: bad row range");
    const int m = data.flows.cols();
    if (net.output_dim() != m) throw std::invalid_argument("evaluate: output dimension mismatch");
    const int rows = row_end - row_begin;
    DenseMatrix preds(rows, m), targets(rows, m);
    for (int r = 0; r < rows; ++r) {
        const std::vector<double> pred = predict(net, data.capacities.row(row_begin + r));
        for (int c = 0; c < m; ++c) {
            preds(r, c) = pred[c];
            targets(r, c) = data.flows(row_begin + r, c);
        }
    }
    ErrorPoint point;
    point.mre_av = mre_av(preds, targets).value;
    point.mre_phi = mre_phi(preds, targets).value;
    point.config_id = config_id;
    point.seed = seed;
    point.n_params = net.parameter_count();
    return point;
}

ErrorPoint evaluate_checkpoint(const std::string& checkpoint_path, const Dataset& data,
                               int row_begin, int row_end) {
    std::ifstream in(checkpoint_path);
    if (!in) throw std::runtime_error("cannot open: " + checkpoint_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const Graph lg = line_graph(data.network);
    auto ahat = std::make_shared<const AugmentedAdjacency>(augmented_adjacency(lg));
    const Network net =
        Network::from_checkpoint_json(text, ahat, network_context_hash(data.network));
    return evaluate(net, data, row_begin, row_end);
}

std::string error_point_to_json(const ErrorPoint& point) {
    nlohmann::json j;
    j["mre_av"] = point.mre_av;
    j["mre_phi"] = point.mre_phi;
    j["config_id"] = point.config_id;
    j["seed"] = point.seed;
    j["n_params"] = point.n_params;
    return j.dump();
}

// ---------------------------------------------------------------------
//  Manifest
// ---------------------------------------------------------------------

namespace {

nlohmann::json record_to_json(const RunRecord& rec) {
    nlohmann::json j;
    j["config_id"] = rec.config_id;
    j["seed"] = rec.seed;
    j["layer_kind"] = to_string(rec.config.layer_kind);
    j["activation"] = to_string(rec.config.activation);
    j["depth"] = rec.config.depth;
    j["features"] = rec.config.features;
    j["pool"] = to_string(rec.config.pool);
    j["status"] = rec.status;
    if (!rec.error.empty()) j["error"] = rec.error;
    j["mre_av"] = rec.mre_av;
    j["mre_phi"] = rec.mre_phi;
    j["n_params"] = rec.n_params;
    j["is_median"] = rec.is_median;
    j["dir"] = rec.dir;
    return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
    RunRecord rec;
    rec.config_id = j.at("config_id").get<std::string>();
    rec.seed = j.at("seed").get<uint64_t>();
    rec.config.layer_kind = layer_kind_from_string(j.at("layer_kind").get<std::string>());
    rec.config.activation = activation_from_string(j.at("activation").get<std::string>());
    rec.config.depth = j.at("depth").get<int>();
    rec.config.features = j.at("features").get<int>();
    rec.config.pool = pool_from_string(j.at("pool").get<std::string>());
    rec.config.seed = rec.seed;
    rec.status = j.at("status").get<std::string>();
    if (j.contains("error")) rec.error = j.at("error").get<std::string>();
    rec.mre_av = j.at("mre_av").get<double>();
    rec.mre_phi = j.at("mre_phi").get<double>();
    rec.n_params = j.at("n_params").get<size_t>();
    rec.is_median = j.at("is_median").get<bool>();
    rec.dir = j.at("dir").get<std::string>();
    return rec;
}

}  // namespace

std::string Manifest::to_json() const {
    nlohmann::json j;
    j["format"] = "ginn-manifest-v1";
    j["version"] = kVersion;
    j["dataset_hash"] = dataset_hash;
    j["train_rows"] = train_rows;
    j["test_rows"] = test_rows;
    j["train_config"] = nlohmann::json::parse(train_config_json);
    auto arr = nlohmann::json::array();
    for (const RunRecord& rec : runs) arr.push_back(record_to_json(rec));
    j["runs"] = std::move(arr);
    return j.dump(2);
}

Manifest Manifest::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "ginn-manifest-v1")
        throw std::invalid_argument("manifest: unknown format");
    Manifest man;
    man.dataset_hash = j.at("dataset_hash").get<uint64_t>();
    man.train_rows = j.at("train_rows").get<int>();
    man.test_rows = j.at("test_rows").get<int>();
    man.train_config_json = j.at("train_config").dump();
    for (const auto& rj : j.at("runs")) man.runs.push_back(record_from_json(rj));
    return man;
}

Manifest Manifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

// ---------------------------------------------------------------------
//  Grid runner
// ---------------------------------------------------------------------

namespace {

uint64_t dataset_content_hash(const Dataset& data) {
    // Cheap but stable: network context plus sample count and seed.
    uint64_t h = network_context_hash(data.network);
    h ^= 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(data.sample_count());
    h ^= data.seed * 0xbf58476d1ce4e5b9ull;
    return h;
}

struct RunOutcome {
    RunRecord record;
};

RunRecord execute_run(const RunSpec& run, const Dataset& data,
                      const std::shared_ptr<const AugmentedAdjacency>& ahat, uint64_t graph_hash,
                      uint64_t data_hash, const TrainConfig& base_cfg,
                      const ExperimentOptions& opts, const fs::path& run_dir) {
    RunRecord rec;
    rec.config_id = run.config_id;
    rec.seed = run.seed;
    rec.config = run.config;
    rec.dir = "runs/" + run_dir.filename().string();

    TrainConfig cfg = base_cfg;
    cfg.seed = run.seed;

    const fs::path result_path = run_dir / "result.json";
    if (fs::exists(result_path)) {
        try {
            std::ifstream in(result_path);
            std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            const auto j = nlohmann::json::parse(text);
            if (j.at("dataset_hash").get<uint64_t>() == data_hash &&
                j.at("config").dump() == nlohmann::json::parse(run.config.to_json()).dump() &&
                j.at("train_config").dump() == nlohmann::json::parse(cfg.to_json()).dump() &&
                j.at("train_rows").get<int>() == opts.train_rows &&
                j.at("test_rows").get<int>() == opts.test_rows) {
                rec.status = j.at("status").get<std::string>();
                if (j.contains("error")) rec.error = j.at("error").get<std::string>();
                rec.mre_av = j.at("mre_av").get<double>();
                rec.mre_phi = j.at("mre_phi").get<double>();
                rec.n_params = j.at("n_params").get<size_t>();
                rec.reused = true;
                return rec;
            }
        } catch (const std::exception&) {
            // Unreadable or stale result: fall through and retrain.
        }
    }

    fs::create_directories(run_dir);
    nlohmann::json result;
    result["config_id"] = run.config_id;
    result["seed"] = run.seed;
    result["dataset_hash"] = data_hash;
    result["config"] = nlohmann::json::parse(run.config.to_json());
    result["train_config"] = nlohmann::json::parse(cfg.to_json());
    result["train_rows"] = opts.train_rows;
    result["test_rows"] = opts.test_rows;
    result["version"] = kVersion;

    try {
        Network net = build_network(run.config, ahat, data.network.sink_incoming, graph_hash);
        const SplitIndices split = split_dataset(opts.train_rows, cfg.val_fraction, cfg.seed);
        TrainResult trained = train(std::move(net), data, split.train, split.val, cfg);
        trained.network.save_checkpoint((run_dir / "checkpoint.json").string());
        trained.history.save_jsonl((run_dir / "history.jsonl").string());
        const ErrorPoint point = evaluate(trained.network, data, opts.train_rows,
                                          opts.train_rows + opts.test_rows, run.config_id, run.seed);
        rec.status = "ok";
        rec.mre_av = point.mre_av;
        rec.mre_phi = point.mre_phi;
        rec.n_params = point.n_params;
        result["best_epoch"] = trained.history.best_epoch;
        result["epochs"] = trained.history.epochs();
        result["stop_reason"] = trained.history.stop_reason;
    } catch (const std::exception& err) {
        rec.status = "failed";
        rec.error = err.what();
    }

    result["status"] = rec.status;
    if (!rec.error.empty()) result["error"] = rec.error;
    result["mre_av"] = rec.mre_av;
    result["mre_phi"] = rec.mre_phi;
    result["n_params"] = rec.n_params;
    std::ofstream out(result_path);
    out << result.dump(2) << '\n';
    return rec;
}

void mark_medians(std::vector<RunRecord>& runs) {
    std::map<std::string, std::vector<size_t>> by_config;
    for (size_t i = 0; i < runs.size(); ++i)
        if (runs[i].status == "ok") by_config[runs[i].config_id].push_back(i);
    for (const auto& [config_id, indices] : by_config) {
        if (indices.size() % 2 == 0) continue;  // no median rule for even counts
        std::vector<ErrorPoint> points;
        for (size_t i : indices) {
            ErrorPoint p;
            p.mre_av = runs[i].mre_av;
            p.mre_phi = runs[i].mre_phi;
            p.config_id = config_id;
            p.seed = runs[i].seed;
            points.push_back(p);
        }
        const ErrorPoint med = median_model(std::move(points));
        for (size_t i : indices)
            if (runs[i].seed == med.seed) runs[i].is_median = true;
    }
}

}  // namespace

Manifest run_experiment(const Dataset& data, const GridSpec& spec, const TrainConfig& base_train_cfg,
                        const ExperimentOptions& opts, const std::string& out_dir) {
    base_train_cfg.validate();
    if (opts.train_rows < 2 || opts.test_rows < 1)
        throw std::invalid_argument("run_experiment: need at least 2 train rows and 1 test row");
    if (data.sample_count() < opts.train_rows + opts.test_rows)
        throw std::invalid_argument("run_experiment: dataset smaller than train + test budget");

    const std::vector<RunSpec> runs = expand_grid(spec);
    const Graph lg = line_graph(data.network);
    auto ahat = std::make_shared<const AugmentedAdjacency>(augmented_adjacency(lg));
    const uint64_t graph_hash = network_context_hash(data.network);
    const uint64_t data_hash = dataset_content_hash(data);

    const fs::path root(out_dir);
    fs::create_directories(root / "runs");

    std::vector<RunRecord> records(runs.size());
    std::atomic<size_t> next{0};
    std::atomic<size_t> done{0};
    std::mutex log_mutex;
    const int workers = std::clamp(opts.workers, 1, 64);

    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= runs.size()) break;
            const RunSpec& run = runs[i];
            const fs::path run_dir =
                root / "runs" / (run.config_id + "-s" + std::to_string(run.seed));
            records[i] = execute_run(run, data, ahat, graph_hash, data_hash, base_train_cfg, opts,
                                     run_dir);
            const size_t finished = done.fetch_add(1) + 1;
            if (opts.verbose) {
                std::lock_guard<std::mutex> lock(log_mutex);
                std::fprintf(stderr, "[%zu/%zu] %s seed=%" PRIu64 " %s mre_av=%.4f mre_phi=%.4f%s\n",
                             finished, runs.size(), run.config_id.c_str(), run.seed,
                             records[i].status.c_str(), records[i].mre_av, records[i].mre_phi,
                             records[i].reused ? " (reused)" : "");
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    mark_medians(records);

    Manifest manifest;
    manifest.dataset_hash = data_hash;
    manifest.train_rows = opts.train_rows;
    manifest.test_rows = opts.test_rows;
    manifest.train_config_json = base_train_cfg.to_json();
    manifest.runs = std::move(records);

    std::ofstream out(root / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest under " + out_dir);
    out << manifest.to_json() << '\n';
    return manifest;
}

void export_plane_csv(const Manifest& manifest, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + csv_path);
    out << "config_id,layer_kind,seed,activation,H,F,pool,n_params,mre_av,mre_phi,is_median\n";
    char buf[64];
    for (const RunRecord& rec : manifest.runs) {
        if (rec.status != "ok") continue;
        out << rec.config_id << ',' << to_string(rec.config.layer_kind) << ',' << rec.seed << ','
            << to_string(rec.config.activation) << ',' << rec.config.depth << ','
            << rec.config.features << ',' << to_string(rec.config.pool) << ',' << rec.n_params;
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,", rec.mre_av, rec.mre_phi);
        out << buf << (rec.is_median ? 1 : 0) << '\n';
    }
}

}  // namespace ginn

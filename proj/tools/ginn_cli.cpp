// Command-line front end. Everything goes through the shared-library C API;
// config files are plain JSON objects and any flag given here overrides the
// file value.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ginn.h"
#include "json.hpp"

namespace {

using nlohmann::json;

int die(const char* what) {
    std::fprintf(stderr, "error: %s: %s\n", what, ginn_last_error());
    return 1;
}

json load_json_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("config", "cannot open " + path);
    json j;
    in >> j;
    if (!j.is_object()) throw CLI::ValidationError("config", path + " is not a JSON object");
    return j;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    for (char c : csv) {
        if (c == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-instructed network toolkit: stochastic max-flow data synthesis, "
                 "GI/EWGI model training, and the configuration-grid experiment runner"};
    app.require_subcommand(1);

    // ----- gen-graph -----
    auto* gen_graph = app.add_subcommand("gen-graph", "Generate a random graph (JSON)");
    std::string gg_kind = "ba", gg_out;
    int gg_n = 20, gg_m_attach = 2;
    double gg_p = -1.0;
    uint64_t gg_seed = 0;
    bool gg_allow_disconnected = false;
    gen_graph->add_option("--kind", gg_kind, "Generator: ba or er")->check(CLI::IsMember({"ba", "er"}));
    gen_graph->add_option("--n", gg_n, "Node count");
    gen_graph->add_option("--m-attach", gg_m_attach, "BA: edges per new node");
    gen_graph->add_option("--p", gg_p, "ER: edge probability (default 4/(n-1))");
    gen_graph->add_option("--seed", gg_seed, "RNG seed")->required();
    gen_graph->add_flag("--allow-disconnected", gg_allow_disconnected,
                        "ER: keep disconnected draws instead of resampling");
    gen_graph->add_option("--out", gg_out, "Output graph JSON path")->required();

    // ----- gen-dataset -----
    auto* gen_dataset = app.add_subcommand(
        "gen-dataset", "Orient a graph into a flow network and synthesize capacity/flow samples");
    std::string gd_graph, gd_out;
    int gd_samples = 0;
    uint64_t gd_seed = 0;
    gen_dataset->add_option("--graph", gd_graph, "Input graph JSON")->required();
    gen_dataset->add_option("--samples", gd_samples, "Sample count")->required();
    gen_dataset->add_option("--seed", gd_seed, "RNG seed")->required();
    gen_dataset->add_option("--out", gd_out, "Output dataset JSON path")->required();

    // ----- shared train-config flags -----
    const auto add_train_flags = [](CLI::App* cmd, auto& opts) {
        cmd->add_option("--train-config", opts.file, "Train config JSON file");
        cmd->add_option("--lr", opts.lr, "Initial learning rate");
        cmd->add_option("--max-epochs", opts.max_epochs, "Epoch budget");
        cmd->add_option("--batch-size", opts.batch_size, "Mini-batch size");
        cmd->add_option("--val-fraction", opts.val_fraction, "Validation fraction of the train rows");
        cmd->add_option("--es-patience", opts.es_patience, "Early-stopping patience (epochs)");
        cmd->add_option("--es-start-epoch", opts.es_start_epoch, "Epochs before early stopping monitors");
        cmd->add_option("--plateau-patience", opts.plateau_patience, "Plateau scheduler patience");
        cmd->add_option("--plateau-factor", opts.plateau_factor, "Plateau reduction factor");
        cmd->add_option("--min-lr", opts.min_lr, "Learning-rate floor");
        cmd->add_flag("--no-early-stop", opts.no_early_stop, "Disable early stopping");
        cmd->add_flag("--no-restore-best", opts.no_restore_best, "Keep last-epoch weights");
    };
    struct TrainFlags {
        std::string file;
        std::optional<double> lr, val_fraction, plateau_factor, min_lr;
        std::optional<int> max_epochs, batch_size, es_patience, es_start_epoch, plateau_patience;
        bool no_early_stop = false, no_restore_best = false;
        json merged(std::optional<uint64_t> seed) const {
            json j = load_json_file(file);
            if (lr) j["lr"] = *lr;
            if (max_epochs) j["max_epochs"] = *max_epochs;
            if (batch_size) j["batch_size"] = *batch_size;
            if (val_fraction) j["val_fraction"] = *val_fraction;
            if (es_patience) j["es_patience"] = *es_patience;
            if (es_start_epoch) j["es_start_epoch"] = *es_start_epoch;
            if (plateau_patience) j["plateau_patience"] = *plateau_patience;
            if (plateau_factor) j["plateau_factor"] = *plateau_factor;
            if (min_lr) j["min_lr"] = *min_lr;
            if (no_early_stop) j["early_stop"] = false;
            if (no_restore_best) j["restore_best"] = false;
            if (seed) j["seed"] = *seed;
            return j;
        }
    };

    // ----- train -----
    auto* train = app.add_subcommand("train", "Train one model and write checkpoint + history");
    std::string tr_dataset, tr_model_cfg_file, tr_checkpoint = "checkpoint.json", tr_history;
    std::string tr_kind, tr_activation, tr_pool;
    std::optional<int> tr_depth, tr_features;
    int tr_train_rows = 0;
    uint64_t tr_seed = 0;
    TrainFlags tr_flags;
    train->add_option("--dataset", tr_dataset, "Dataset JSON")->required();
    train->add_option("--model-config", tr_model_cfg_file, "Model config JSON file");
    train->add_option("--layer-kind", tr_kind, "gi or ewgi");
    train->add_option("--depth", tr_depth, "Total layer count H");
    train->add_option("--features", tr_features, "Per-node features F");
    train->add_option("--activation", tr_activation, "elu, swish, or softplus");
    train->add_option("--pool", tr_pool, "reduce_max, reduce_mean, or none");
    train->add_option("--seed", tr_seed, "Seed for init, split, and shuffling")->required();
    train->add_option("--train-rows", tr_train_rows, "Rows used for training (default: all)");
    train->add_option("--checkpoint-out", tr_checkpoint, "Checkpoint output path");
    train->add_option("--history-out", tr_history, "Epoch history JSONL path");
    add_train_flags(train, tr_flags);

    // ----- grid -----
    auto* grid = app.add_subcommand("grid", "Run the full configuration grid on a dataset");
    std::string gr_dataset, gr_spec_file, gr_out_dir;
    std::string gr_kinds, gr_activations, gr_pools, gr_depths, gr_features, gr_seeds;
    int gr_train_rows = 500, gr_test_rows = 3000, gr_workers = 1;
    bool gr_verbose = false;
    TrainFlags gr_flags;
    grid->add_option("--dataset", gr_dataset, "Dataset JSON")->required();
    grid->add_option("--grid-spec", gr_spec_file, "Grid spec JSON file");
    grid->add_option("--kinds", gr_kinds, "Comma list, e.g. gi,ewgi");
    grid->add_option("--activations", gr_activations, "Comma list, e.g. elu,swish,softplus");
    grid->add_option("--depths", gr_depths, "Comma list, e.g. 3,5,7,9");
    grid->add_option("--features", gr_features, "Comma list, e.g. 1,5,10");
    grid->add_option("--pools", gr_pools, "Comma list, e.g. reduce_max,reduce_mean");
    grid->add_option("--seeds", gr_seeds, "Comma list of run seeds, e.g. 0,1,2,3,4");
    grid->add_option("--train-rows", gr_train_rows, "Leading rows used for training");
    grid->add_option("--test-rows", gr_test_rows, "Rows after the training block used for testing");
    grid->add_option("--workers", gr_workers, "Parallel training workers");
    grid->add_flag("--verbose", gr_verbose, "Log per-run progress to stderr");
    grid->add_option("--out-dir", gr_out_dir, "Output directory")->required();
    add_train_flags(grid, gr_flags);

    // ----- eval -----
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on dataset rows");
    std::string ev_checkpoint, ev_dataset, ev_out;
    int ev_begin = 0, ev_end = 0;
    eval->add_option("--checkpoint", ev_checkpoint, "Checkpoint JSON")->required();
    eval->add_option("--dataset", ev_dataset, "Dataset JSON")->required();
    eval->add_option("--row-begin", ev_begin, "First row (inclusive)");
    eval->add_option("--row-end", ev_end, "Last row (exclusive; default: all rows)");
    eval->add_option("--out", ev_out, "Write the error-point JSON here instead of stdout");

    // ----- export-plane -----
    auto* export_plane = app.add_subcommand("export-plane", "Manifest -> error-plane CSV");
    std::string xp_manifest, xp_csv;
    export_plane->add_option("--manifest", xp_manifest, "manifest.json path")->required();
    export_plane->add_option("--csv", xp_csv, "Output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_graph->parsed()) {
            ginn_graph* g = nullptr;
            int rc;
            if (gg_kind == "ba") {
                rc = ginn_graph_barabasi_albert(gg_n, gg_m_attach, gg_seed, &g);
            } else {
                const double p = gg_p >= 0.0 ? gg_p : 4.0 / (gg_n - 1);
                rc = ginn_graph_erdos_renyi(gg_n, p, gg_seed, gg_allow_disconnected ? 0 : 1, &g);
            }
            if (rc != GINN_OK) return die("gen-graph");
            rc = ginn_graph_save_json(g, gg_out.c_str());
            int nodes = 0, edges = 0;
            ginn_graph_node_count(g, &nodes);
            ginn_graph_edge_count(g, &edges);
            ginn_graph_free(g);
            if (rc != GINN_OK) return die("gen-graph");
            std::printf("wrote %s (%d nodes, %d edges)\n", gg_out.c_str(), nodes, edges);
        } else if (gen_dataset->parsed()) {
            ginn_graph* g = nullptr;
            if (ginn_graph_load_json(gd_graph.c_str(), &g) != GINN_OK) return die("gen-dataset");
            ginn_network* net = nullptr;
            int rc = ginn_network_from_graph(g, &net);
            ginn_graph_free(g);
            if (rc != GINN_OK) return die("gen-dataset");
            ginn_dataset* ds = nullptr;
            rc = ginn_dataset_generate(net, gd_samples, gd_seed, &ds);
            if (rc == GINN_OK) rc = ginn_dataset_save_json(ds, gd_out.c_str());
            int n_edges = 0, m = 0;
            ginn_network_edge_count(net, &n_edges);
            ginn_network_sink_edge_count(net, &m);
            ginn_dataset_free(ds);
            ginn_network_free(net);
            if (rc != GINN_OK) return die("gen-dataset");
            std::printf("wrote %s (%d samples, %d edges, %d sink edges)\n", gd_out.c_str(),
                        gd_samples, n_edges, m);
        } else if (train->parsed()) {
            json model_cfg = load_json_file(tr_model_cfg_file);
            if (!tr_kind.empty()) model_cfg["layer_kind"] = tr_kind;
            if (tr_depth) model_cfg["depth"] = *tr_depth;
            if (tr_features) model_cfg["features"] = *tr_features;
            if (!tr_activation.empty()) model_cfg["activation"] = tr_activation;
            if (!tr_pool.empty()) model_cfg["pool"] = tr_pool;
            model_cfg["seed"] = tr_seed;
            const json train_cfg = tr_flags.merged(tr_seed);
            const int rc = ginn_train_run(tr_dataset.c_str(), model_cfg.dump().c_str(),
                                          train_cfg.dump().c_str(), tr_train_rows,
                                          tr_checkpoint.c_str(),
                                          tr_history.empty() ? nullptr : tr_history.c_str());
            if (rc != GINN_OK) return die("train");
            std::printf("wrote %s%s%s\n", tr_checkpoint.c_str(), tr_history.empty() ? "" : " and ",
                        tr_history.c_str());
        } else if (grid->parsed()) {
            json spec = load_json_file(gr_spec_file);
            if (!gr_kinds.empty()) spec["kinds"] = split_list(gr_kinds);
            if (!gr_activations.empty()) spec["activations"] = split_list(gr_activations);
            if (!gr_pools.empty()) spec["pools"] = split_list(gr_pools);
            const auto int_list = [](const std::string& csv) {
                json arr = json::array();
                for (const std::string& s : split_list(csv)) arr.push_back(std::stoll(s));
                return arr;
            };
            if (!gr_depths.empty()) spec["depths"] = int_list(gr_depths);
            if (!gr_features.empty()) spec["features"] = int_list(gr_features);
            if (!gr_seeds.empty()) spec["seeds"] = int_list(gr_seeds);
            const json train_cfg = gr_flags.merged(std::nullopt);
            const int rc = ginn_grid_run(gr_dataset.c_str(), spec.dump().c_str(),
                                         train_cfg.dump().c_str(), gr_train_rows, gr_test_rows,
                                         gr_workers, gr_verbose ? 1 : 0, gr_out_dir.c_str());
            if (rc != GINN_OK) return die("grid");
            std::printf("wrote %s/manifest.json\n", gr_out_dir.c_str());
        } else if (eval->parsed()) {
            const int rc = ginn_eval_run(ev_checkpoint.c_str(), ev_dataset.c_str(), ev_begin, ev_end,
                                         ev_out.empty() ? nullptr : ev_out.c_str());
            if (rc != GINN_OK) return die("eval");
        } else if (export_plane->parsed()) {
            const int rc = ginn_export_plane(xp_manifest.c_str(), xp_csv.c_str());
            if (rc != GINN_OK) return die("export-plane");
            std::printf("wrote %s\n", xp_csv.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

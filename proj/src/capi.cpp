#include "ginn.h"

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "ginn/experiment.hpp"
#include "ginn/flownet.hpp"
#include "ginn/graph.hpp"
#include "ginn/model.hpp"
#include "ginn/train.hpp"

// Opaque handle definitions: each wraps the corresponding core value.
struct ginn_graph {
    ginn::Graph value;
};
struct ginn_network {
    ginn::FlowNetwork value;
};
struct ginn_dataset {
    ginn::Dataset value;
};
struct ginn_model {
    ginn::Network value;
};

namespace {

thread_local std::string g_last_error = "no error";

int fail(int code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(GINN_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(GINN_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(GINN_ERR_RUNTIME, e.what());
    }
}

int require(const void* p, const char* what) {
    if (p) return GINN_OK;
    return fail(GINN_ERR_NULL_POINTER, std::string("null pointer: ") + what);
}

std::string text_or_empty(const char* s) {
    return s ? std::string(s) : std::string();
}

ginn::ModelConfig parse_model_config(const char* json) {
    const std::string text = text_or_empty(json);
    return text.empty() ? ginn::ModelConfig{} : ginn::ModelConfig::from_json(text);
}

ginn::TrainConfig parse_train_config(const char* json) {
    const std::string text = text_or_empty(json);
    return text.empty() ? ginn::TrainConfig{} : ginn::TrainConfig::from_json(text);
}

ginn::GridSpec parse_grid_spec(const char* json) {
    const std::string text = text_or_empty(json);
    return text.empty() ? ginn::GridSpec{} : ginn::GridSpec::from_json(text);
}

}  // namespace

extern "C" {

const char* ginn_version(void) { return ginn::kVersion; }

const char* ginn_last_error(void) { return g_last_error.c_str(); }

/* ----- graphs ----- */

int ginn_graph_barabasi_albert(int n, int m_attach, uint64_t seed, ginn_graph** out) {
    if (int rc = require(out, "out")) return rc;
    return guarded([&] {
        *out = new ginn_graph{ginn::barabasi_albert(n, m_attach, seed)};
        return GINN_OK;
    });
}

int ginn_graph_erdos_renyi(int n, double p, uint64_t seed, int require_connected, ginn_graph** out) {
    if (int rc = require(out, "out")) return rc;
    return guarded([&] {
        *out = new ginn_graph{require_connected ? ginn::erdos_renyi_connected(n, p, seed)
                                                : ginn::erdos_renyi(n, p, seed)};
        return GINN_OK;
    });
}

int ginn_graph_save_json(const ginn_graph* g, const char* path) {
    if (int rc = require(g, "graph")) return rc;
    if (int rc = require(path, "path")) return rc;
    return guarded([&] {
        g->value.save_json(path);
        return GINN_OK;
    });
}

int ginn_graph_load_json(const char* path, ginn_graph** out) {
    if (int rc = require(path, "path")) return rc;
    if (int rc = require(out, "out")) return rc;
    return guarded([&] {
        *out = new ginn_graph{ginn::Graph::load_json(path)};
        return GINN_OK;
    });
}

int ginn_graph_node_count(const ginn_graph* g, int* out) {
    if (int rc = require(g, "graph")) return rc;
    if (int rc = require(out, "out")) return rc;
    *out = g->value.node_count();
    return GINN_OK;
}

int ginn_graph_edge_count(const ginn_graph* g, int* out) {
    if (int rc = require(g, "graph")) return rc;
    if (int rc = require(out, "out")) return rc;
    *out = g->value.edge_count();
    return GINN_OK;
}

void ginn_graph_free(ginn_graph* g) { delete g; }

/* ----- flow networks ----- */

int ginn_network_from_graph(const ginn_graph* g, ginn_network** out) {
    if (int rc = require(g, "graph")) return rc;
    if (int rc = require(out, "out")) return rc;
    return guarded([&] {
        *out = new ginn_network{ginn::orient_network(g->value)};
        return GINN_OK;
    });
}

int ginn_network_edge_count(const ginn_network* net, int* out) {
    if (int rc = require(net, "network")) return rc;
    if (int rc = require(out, "out")) return rc;
    *out = net->value.edge_count();
    return GINN_OK;
}

int ginn_network_sink_edge_count(const ginn_network* net, int* out) {
    if (int rc = require(net, "network")) return rc;
    if (int rc = require(out, "out")) return rc;
    *out = net->value.sink_edge_count();
    return GINN_OK;
}

int ginn_network_line_graph(const ginn_network* net, ginn_graph** out) {
    if (int rc = require(net, "network")) return rc;
    if (int rc = require(out, "out")) return rc;
    return guarded([&] {
        *out = new ginn_graph{ginn::line_graph(net->value)};
        return GINN_OK;
    });
}

int ginn_network_max_flow(const ginn_network* net, const double* capacities, int n_capacities,
                          double* phi, double* phi_vec) {
    if (int rc = require(net, "network")) return rc;
    if (int rc = require(capacities, "capacities")) return rc;
    if (int rc = require(phi, "phi")) return rc;
    return guarded([&] {
        const ginn::FlowLabel label =
            ginn::max_flow(net->value, {capacities, static_cast<size_t>(n_capacities)});
        *phi = label.phi;
        if (phi_vec)
            std::copy(label.phi_vec.begin(), label.phi_vec.end(), phi_vec);
        return GINN_OK;
    });
}

void ginn_network_free(ginn_network* net) { delete net; }

/* ----- datasets ----- */

int ginn_dataset_generate(const ginn_network* net, int n_samples, uint64_t seed, ginn_dataset** out) {
    if (int rc = require(net, "network")) return rc;
    if (int rc = require(out, "out")) return rc;
    return guarded([&] {
        *out = new ginn_dataset{ginn::generate_dataset(net->value, n_samples, seed)};
        return GINN_OK;
    });
}

int ginn_dataset_save_json(const ginn_dataset* ds, const char* path) {
    if (int rc = require(ds, "dataset")) return rc;
    if (int rc = require(path, "path")) return rc;
    return guarded([&] {
        ds->value.save_json(path);
        return GINN_OK;
    });
}

int ginn_dataset_load_json(const char* path, ginn_dataset** out) {
    if (int rc = require(path, "path")) return rc;
    if (int rc = require(out, "out")) return rc;
    return guarded([&] {
        *out = new ginn_dataset{ginn::Dataset::load_json(path)};
        return GINN_OK;
    });
}

int ginn_dataset_sample_count(const ginn_dataset* ds, int* out) {
    if (int rc = require(ds, "dataset")) return rc;
    if (int rc = require(out, "out")) return rc;
    *out = ds->value.sample_count();
    return GINN_OK;
}

int ginn_dataset_input_dim(const ginn_dataset* ds, int* out) {
    if (int rc = require(ds, "dataset")) return rc;
    if (int rc = require(out, "out")) return rc;
    *out = ds->value.network.edge_count();
    return GINN_OK;
}

int ginn_dataset_output_dim(const ginn_dataset* ds, int* out) {
    if (int rc = require(ds, "dataset")) return rc;
    if (int rc = require(out, "out")) return rc;
    *out = ds->value.network.sink_edge_count();
    return GINN_OK;
}

void ginn_dataset_free(ginn_dataset* ds) { delete ds; }

/* ----- training and evaluation ----- */

int ginn_train_run(const char* dataset_path, const char* model_config_json,
                   const char* train_config_json, int train_rows, const char* checkpoint_out,
                   const char* history_out) {
    if (int rc = require(dataset_path, "dataset_path")) return rc;
    if (int rc = require(checkpoint_out, "checkpoint_out")) return rc;
    return guarded([&] {
        const ginn::Dataset data = ginn::Dataset::load_json(dataset_path);
        const ginn::ModelConfig model_cfg = parse_model_config(model_config_json);
        const ginn::TrainConfig train_cfg = parse_train_config(train_config_json);
        const int rows = train_rows > 0 ? train_rows : data.sample_count();
        if (rows > data.sample_count())
            throw std::invalid_argument("train_rows exceeds dataset size");

        const ginn::Graph lg = ginn::line_graph(data.network);
        auto ahat = std::make_shared<const ginn::AugmentedAdjacency>(ginn::augmented_adjacency(lg));
        ginn::Network net = ginn::build_network(model_cfg, ahat, data.network.sink_incoming,
                                                ginn::network_context_hash(data.network));
        const ginn::SplitIndices split =
            ginn::split_dataset(rows, train_cfg.val_fraction, train_cfg.seed);
        ginn::TrainResult result = ginn::train(std::move(net), data, split.train, split.val, train_cfg);
        result.network.save_checkpoint(checkpoint_out);
        if (history_out) result.history.save_jsonl(history_out);
        return GINN_OK;
    });
}

int ginn_model_load(const char* checkpoint_path, const ginn_dataset* ds, ginn_model** out) {
    if (int rc = require(checkpoint_path, "checkpoint_path")) return rc;
    if (int rc = require(ds, "dataset")) return rc;
    if (int rc = require(out, "out")) return rc;
    return guarded([&] {
        std::ifstream in(checkpoint_path);
        if (!in) throw std::runtime_error(std::string("cannot open: ") + checkpoint_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const ginn::Graph lg = ginn::line_graph(ds->value.network);
        auto ahat = std::make_shared<const ginn::AugmentedAdjacency>(ginn::augmented_adjacency(lg));
        *out = new ginn_model{ginn::Network::from_checkpoint_json(
            text, ahat, ginn::network_context_hash(ds->value.network))};
        return GINN_OK;
    });
}

int ginn_model_parameter_count(const ginn_model* model, size_t* out) {
    if (int rc = require(model, "model")) return rc;
    if (int rc = require(out, "out")) return rc;
    *out = model->value.parameter_count();
    return GINN_OK;
}

int ginn_model_predict(const ginn_model* model, const double* capacities, int n_capacities,
                       double* out, int out_len) {
    if (int rc = require(model, "model")) return rc;
    if (int rc = require(capacities, "capacities")) return rc;
    if (int rc = require(out, "out")) return rc;
    return guarded([&] {
        if (out_len < model->value.output_dim())
            throw std::invalid_argument("output buffer too small");
        const std::vector<double> pred =
            ginn::predict(model->value, {capacities, static_cast<size_t>(n_capacities)});
        std::copy(pred.begin(), pred.end(), out);
        return GINN_OK;
    });
}

int ginn_model_evaluate(const ginn_model* model, const ginn_dataset* ds, int row_begin, int row_end,
                        double* mre_av, double* mre_phi) {
    if (int rc = require(model, "model")) return rc;
    if (int rc = require(ds, "dataset")) return rc;
    if (int rc = require(mre_av, "mre_av")) return rc;
    if (int rc = require(mre_phi, "mre_phi")) return rc;
    return guarded([&] {
        const ginn::ErrorPoint point = ginn::evaluate(model->value, ds->value, row_begin, row_end);
        *mre_av = point.mre_av;
        *mre_phi = point.mre_phi;
        return GINN_OK;
    });
}

void ginn_model_free(ginn_model* model) { delete model; }

/* ----- experiment grid ----- */

int ginn_grid_run(const char* dataset_path, const char* grid_spec_json,
                  const char* train_config_json, int train_rows, int test_rows, int workers,
                  int verbose, const char* out_dir) {
    if (int rc = require(dataset_path, "dataset_path")) return rc;
    if (int rc = require(out_dir, "out_dir")) return rc;
    return guarded([&] {
        const ginn::Dataset data = ginn::Dataset::load_json(dataset_path);
        const ginn::GridSpec spec = parse_grid_spec(grid_spec_json);
        const ginn::TrainConfig train_cfg = parse_train_config(train_config_json);
        ginn::ExperimentOptions opts;
        if (train_rows > 0) opts.train_rows = train_rows;
        if (test_rows > 0) opts.test_rows = test_rows;
        opts.workers = workers > 0 ? workers : 1;
        opts.verbose = verbose != 0;
        ginn::run_experiment(data, spec, train_cfg, opts, out_dir);
        return GINN_OK;
    });
}

int ginn_eval_run(const char* checkpoint_path, const char* dataset_path, int row_begin, int row_end,
                  const char* result_out) {
    if (int rc = require(checkpoint_path, "checkpoint_path")) return rc;
    if (int rc = require(dataset_path, "dataset_path")) return rc;
    return guarded([&] {
        const ginn::Dataset data = ginn::Dataset::load_json(dataset_path);
        const int end = row_end > 0 ? row_end : data.sample_count();
        const ginn::ErrorPoint point = ginn::evaluate_checkpoint(checkpoint_path, data, row_begin, end);
        const std::string text = ginn::error_point_to_json(point) + "\n";
        if (result_out) {
            std::ofstream out(result_out);
            if (!out) throw std::runtime_error(std::string("cannot open for writing: ") + result_out);
            out << text;
        } else {
            std::fputs(text.c_str(), stdout);
        }
        return GINN_OK;
    });
}

int ginn_export_plane(const char* manifest_path, const char* csv_path) {
    if (int rc = require(manifest_path, "manifest_path")) return rc;
    if (int rc = require(csv_path, "csv_path")) return rc;
    return guarded([&] {
        const ginn::Manifest manifest = ginn::Manifest::load(manifest_path);
        ginn::export_plane_csv(manifest, csv_path);
        return GINN_OK;
    });
}

}  // extern "C"

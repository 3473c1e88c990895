/*
 * C API for the graph-instructed network library. All functions return
 * GINN_OK (0) on success or a negative error code; ginn_last_error() holds
 * a thread-local message describing the most recent failure. Objects are
 * opaque handles released with their matching *_free function.
 */

#ifndef GINN_H
#define GINN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GINN_API __declspec(dllexport)
#else
#define GINN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum ginn_status {
    GINN_OK = 0,
    GINN_ERR_INVALID_ARGUMENT = -1,
    GINN_ERR_IO = -2,
    GINN_ERR_RUNTIME = -3,
    GINN_ERR_NULL_POINTER = -4
};

typedef struct ginn_graph ginn_graph;
typedef struct ginn_network ginn_network;
typedef struct ginn_dataset ginn_dataset;
typedef struct ginn_model ginn_model;

GINN_API const char* ginn_version(void);
/* Message for the most recent failure on this thread; never NULL. */
GINN_API const char* ginn_last_error(void);

/* ----- graphs ----- */

GINN_API int ginn_graph_barabasi_albert(int n, int m_attach, uint64_t seed, ginn_graph** out);
/* require_connected != 0 resamples (bounded) until the draw is connected. */
GINN_API int ginn_graph_erdos_renyi(int n, double p, uint64_t seed, int require_connected,
                                    ginn_graph** out);
GINN_API int ginn_graph_save_json(const ginn_graph* g, const char* path);
GINN_API int ginn_graph_load_json(const char* path, ginn_graph** out);
GINN_API int ginn_graph_node_count(const ginn_graph* g, int* out);
GINN_API int ginn_graph_edge_count(const ginn_graph* g, int* out);
GINN_API void ginn_graph_free(ginn_graph* g);

/* ----- flow networks ----- */

/* Orients a connected graph into an acyclic single-source/single-sink
 * capacitated network (deterministic rule; see the CLI docs). */
GINN_API int ginn_network_from_graph(const ginn_graph* g, ginn_network** out);
GINN_API int ginn_network_edge_count(const ginn_network* net, int* out);
GINN_API int ginn_network_sink_edge_count(const ginn_network* net, int* out);
/* Line graph of the network: one node per edge. */
GINN_API int ginn_network_line_graph(const ginn_network* net, ginn_graph** out);
/* Exact max flow under the given capacities (length = edge count). phi_vec
 * may be NULL; otherwise it receives the sink-incoming edge flows. */
GINN_API int ginn_network_max_flow(const ginn_network* net, const double* capacities,
                                   int n_capacities, double* phi, double* phi_vec);
GINN_API void ginn_network_free(ginn_network* net);

/* ----- datasets ----- */

GINN_API int ginn_dataset_generate(const ginn_network* net, int n_samples, uint64_t seed,
                                   ginn_dataset** out);
GINN_API int ginn_dataset_save_json(const ginn_dataset* ds, const char* path);
GINN_API int ginn_dataset_load_json(const char* path, ginn_dataset** out);
GINN_API int ginn_dataset_sample_count(const ginn_dataset* ds, int* out);
GINN_API int ginn_dataset_input_dim(const ginn_dataset* ds, int* out);
GINN_API int ginn_dataset_output_dim(const ginn_dataset* ds, int* out);
GINN_API void ginn_dataset_free(ginn_dataset* ds);

/* ----- training and evaluation ----- */

/* Trains one model on dataset rows [0, train_rows) (validation split per
 * the train config) and writes the checkpoint and epoch history. Config
 * arguments are JSON object texts; NULL or "" means all defaults. */
GINN_API int ginn_train_run(const char* dataset_path, const char* model_config_json,
                            const char* train_config_json, int train_rows,
                            const char* checkpoint_out, const char* history_out);

/* Loads a checkpoint against the dataset's network; fails if the stored
 * graph hash does not match. */
GINN_API int ginn_model_load(const char* checkpoint_path, const ginn_dataset* ds, ginn_model** out);
GINN_API int ginn_model_parameter_count(const ginn_model* model, size_t* out);
GINN_API int ginn_model_predict(const ginn_model* model, const double* capacities, int n_capacities,
                                double* out, int out_len);
/* Metrics over dataset rows [row_begin, row_end). */
GINN_API int ginn_model_evaluate(const ginn_model* model, const ginn_dataset* ds, int row_begin,
                                 int row_end, double* mre_av, double* mre_phi);
GINN_API void ginn_model_free(ginn_model* model);

/* ----- experiment grid ----- */

/* Expands the grid spec (JSON text, NULL/"" = defaults), trains every
 * (configuration, seed) run on the dataset, and writes per-run outputs plus
 * out_dir/manifest.json. Completed runs are skipped. */
GINN_API int ginn_grid_run(const char* dataset_path, const char* grid_spec_json,
                           const char* train_config_json, int train_rows, int test_rows,
                           int workers, int verbose, const char* out_dir);

/* Evaluates a checkpoint on dataset rows [row_begin, row_end) and writes an
 * error-point JSON object to result_out (or stdout when NULL). */
GINN_API int ginn_eval_run(const char* checkpoint_path, const char* dataset_path, int row_begin,
                           int row_end, const char* result_out);

/* manifest.json -> error-plane CSV. */
GINN_API int ginn_export_plane(const char* manifest_path, const char* csv_path);

#ifdef __cplusplus
}
#endif

#endif /* GINN_H */

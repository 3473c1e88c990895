#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ginn/graph.hpp"
#include "ginn/numerics.hpp"

namespace ginn {

// =====================================================================
//  Types
// =====================================================================

/// Directed capacitated network with a single source and sink. Invariants:
/// no edge enters the source, no edge leaves the sink, every node lies on
/// some source->sink path, and sink_incoming lists (in increasing order) the
/// indices of the edges whose head is the sink.
struct FlowNetwork {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;  // (tail, head), fixed order
    int source = 0;
    int sink = 0;
    std::vector<int> sink_incoming;

    int edge_count() const { return static_cast<int>(edges.size()); }
    int sink_edge_count() const { return static_cast<int>(sink_incoming.size()); }

    void validate() const;
};

/// Flows on the sink-incoming edges of a maximum flow plus its value.
/// phi is exactly the sum of the stored phi_vec entries.
struct FlowLabel {
    std::vector<double> phi_vec;
    double phi = 0.0;
};

/// Capacity/flow sample pairs for one network.
struct Dataset {
    FlowNetwork network;
    uint64_t seed = 0;
    DenseMatrix capacities;  // N x edge_count
    DenseMatrix flows;       // N x sink_edge_count
    std::string provenance;

    int sample_count() const { return capacities.rows(); }

    std::string to_json() const;
    static Dataset from_json(const std::string& text);
    void save_json(const std::string& path) const;
    static Dataset load_json(const std::string& path);
};

// =====================================================================
//  Operations
// =====================================================================

/// Turns a connected undirected graph into a flow network. The source is
/// node 0 and the sink the node with maximum BFS distance from it (lowest
/// index on ties). Edges are oriented from the endpoint nearer the source
/// to the farther one; same-layer ties orient lower index -> higher index,
/// except edges incident to the sink, which orient into the sink. Nodes on
/// no source->sink path are pruned and the rest relabeled in index order.
/// The result is acyclic. Throws if no source->sink path exists.
FlowNetwork orient_network(const Graph& g);

/// One capacity vector per sample, each edge drawn Uniform(0, 1]. Sample i
/// uses the stream derived from (seed, i), so results are independent of
/// batching.
DenseMatrix sample_capacities(const FlowNetwork& net, int n_samples, uint64_t seed);

/// Exact maximum flow via Dinic's algorithm with edges scanned in edge-list
/// order; the returned per-edge flow assignment is deterministic.
FlowLabel max_flow(const FlowNetwork& net, std::span<const double> capacities);

/// Full per-edge flow of the same solve (for conservation checks).
std::vector<double> max_flow_edge_flows(const FlowNetwork& net, std::span<const double> capacities);

/// Samples capacities and labels each row with its maximum flow.
Dataset generate_dataset(const FlowNetwork& net, int n_samples, uint64_t seed);

/// FNV-1a over the line-graph structure and sink-incoming indices; ties a
/// model checkpoint to the network it was trained against.
uint64_t network_context_hash(const FlowNetwork& net);

}  // namespace ginn

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ginn/numerics.hpp"

namespace ginn {

struct FlowNetwork;  // flownet.hpp

// =====================================================================
//  Graph
// =====================================================================

/// Undirected simple graph. Edges are canonicalized to (i, j) with i < j,
/// deduplicated and sorted; the adjacency pattern is kept in CSR form.
class Graph {
public:
    Graph() = default;

    /// Validates no self-loops and index bounds, canonicalizes pair order,
    /// deduplicates, and builds the symmetric adjacency.
    Graph(int n, std::vector<std::pair<int, int>> edges);

    int node_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const SparseBinaryCsr& adjacency() const { return adj_; }

    bool has_edge(int i, int j) const;
    int degree(int i) const { return adj_.row_ptr[i + 1] - adj_.row_ptr[i]; }
    std::span<const int> neighbors(int i) const {
        return {adj_.col_idx.data() + adj_.row_ptr[i],
                static_cast<size_t>(adj_.row_ptr[i + 1] - adj_.row_ptr[i])};
    }

    bool connected() const;

    std::string to_json() const;
    static Graph from_json(const std::string& text);
    void save_json(const std::string& path) const;
    static Graph load_json(const std::string& path);

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    SparseBinaryCsr adj_;
};

/// Adjacency with self-loops added: unit diagonal, off-diagonal pattern
/// equal to the graph adjacency.
struct AugmentedAdjacency {
    int n = 0;
    SparseBinaryCsr mat;
};

AugmentedAdjacency augmented_adjacency(const Graph& g);

/// y = Ahat^T x
void spmat_t_vec(const AugmentedAdjacency& ahat, std::span<const double> x, std::span<double> y);
/// y = Ahat x
void spmat_vec(const AugmentedAdjacency& ahat, std::span<const double> x, std::span<double> y);

// =====================================================================
//  Generators
// =====================================================================

/// Barabasi-Albert preferential attachment. The first m_attach+1 nodes form
/// a clique; each later node attaches to m_attach distinct existing nodes
/// with probability proportional to their degree at the time the node is
/// added. Requires 1 <= m_attach < n. Always connected.
Graph barabasi_albert(int n, int m_attach, uint64_t seed);

/// Erdos-Renyi G(n, p): each of the n(n-1)/2 pairs included independently
/// with probability p.
Graph erdos_renyi(int n, double p, uint64_t seed);

/// Resamples erdos_renyi (seed, seed+1, ...) until the draw is connected.
/// Throws after max_retries failures.
Graph erdos_renyi_connected(int n, double p, uint64_t seed, int max_retries = 100);

/// Line graph of a flow network: one node per network edge, in the network's
/// edge order; nodes adjacent iff the corresponding edges share an endpoint.
Graph line_graph(const FlowNetwork& network);

}  // namespace ginn

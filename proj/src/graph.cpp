#include "ginn/graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>

#include "ginn/flownet.hpp"
#include "json.hpp"

namespace ginn {

// ---------------------------------------------------------------------
//  Graph
// ---------------------------------------------------------------------

Graph::Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
    if (n < 0) throw std::invalid_argument("Graph: negative node count");
    for (auto& [i, j] : edges) {
        if (i == j) throw std::invalid_argument("Graph: self-loop at node " + std::to_string(i));
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::invalid_argument("Graph: edge index out of range");
        if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    std::vector<int> deg(n, 0);
    for (const auto& [i, j] : edges_) {
        ++deg[i];
        ++deg[j];
    }
    adj_.rows = adj_.cols = n;
    adj_.row_ptr.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) adj_.row_ptr[i + 1] = adj_.row_ptr[i] + deg[i];
    adj_.col_idx.resize(adj_.row_ptr[n]);
    std::vector<int> cursor(adj_.row_ptr.begin(), adj_.row_ptr.end() - 1);
    for (const auto& [i, j] : edges_) {
        adj_.col_idx[cursor[i]++] = j;
        adj_.col_idx[cursor[j]++] = i;
    }
    for (int i = 0; i < n; ++i)
        std::sort(adj_.col_idx.begin() + adj_.row_ptr[i], adj_.col_idx.begin() + adj_.row_ptr[i + 1]);
}

bool Graph::has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(i, j));
}

bool Graph::connected() const {
    if (n_ == 0) return true;
    std::vector<char> seen(n_, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : neighbors(u)) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                q.push(v);
            }
        }
    }
    return reached == n_;
}

std::string Graph::to_json() const {
    nlohmann::json j;
    j["n"] = n_;
    auto arr = nlohmann::json::array();
    for (const auto& [a, b] : edges_) arr.push_back({a, b});
    j["edges"] = std::move(arr);
    return j.dump();
}

Graph Graph::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const int n = j.at("n").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("graph json: bad edge entry");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Graph(n, std::move(edges));
}

void Graph::save_json(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_json() << '\n';
}

Graph Graph::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

// ---------------------------------------------------------------------
//  Augmented adjacency
// ---------------------------------------------------------------------

AugmentedAdjacency augmented_adjacency(const Graph& g) {
    const int n = g.node_count();
    const SparseBinaryCsr& a = g.adjacency();
    AugmentedAdjacency out;
    out.n = n;
    out.mat.rows = out.mat.cols = n;
    out.mat.row_ptr.assign(n + 1, 0);
    for (int i = 0; i < n; ++i)
        out.mat.row_ptr[i + 1] = out.mat.row_ptr[i] + (a.row_ptr[i + 1] - a.row_ptr[i]) + 1;
    out.mat.col_idx.resize(out.mat.row_ptr[n]);
    for (int i = 0; i < n; ++i) {
        int w = out.mat.row_ptr[i];
        bool placed = false;
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
            const int j = a.col_idx[p];
            if (!placed && j > i) {
                out.mat.col_idx[w++] = i;
                placed = true;
            }
            out.mat.col_idx[w++] = j;
        }
        if (!placed) out.mat.col_idx[w++] = i;
    }
    return out;
}

void spmat_t_vec(const AugmentedAdjacency& ahat, std::span<const double> x, std::span<double> y) {
    ahat.mat.multiply_transpose(x, y);
}

void spmat_vec(const AugmentedAdjacency& ahat, std::span<const double> x, std::span<double> y) {
    ahat.mat.multiply(x, y);
}

// ---------------------------------------------------------------------
//  Generators
// ---------------------------------------------------------------------

Graph barabasi_albert(int n, int m_attach, uint64_t seed) {
    if (m_attach < 1 || m_attach >= n)
        throw std::invalid_argument("barabasi_albert: need 1 <= m_attach < n");
    Rng rng(seed);
    std::vector<std::pair<int, int>> edges;
    // One entry per degree unit; sampling an entry uniformly is sampling a
    // node proportional to its degree.
    std::vector<int> repeated;
    for (int i = 0; i <= m_attach; ++i)
        for (int j = i + 1; j <= m_attach; ++j) {
            edges.emplace_back(i, j);
            repeated.push_back(i);
            repeated.push_back(j);
        }
    std::vector<int> targets;
    for (int v = m_attach + 1; v < n; ++v) {
        targets.clear();
        // Degrees are frozen while one node picks its m_attach targets.
        while (static_cast<int>(targets.size()) < m_attach) {
            const int t = repeated[rng.uniform_below(repeated.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end())
                targets.push_back(t);
        }
        for (int t : targets) {
            edges.emplace_back(t, v);
            repeated.push_back(t);
            repeated.push_back(v);
        }
    }
    return Graph(n, std::move(edges));
}

Graph erdos_renyi(int n, double p, uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("erdos_renyi: p must be in [0, 1]");
    if (n < 0) throw std::invalid_argument("erdos_renyi: negative n");
    Rng rng(seed);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform_unit() < p) edges.emplace_back(i, j);
    return Graph(n, std::move(edges));
}

Graph erdos_renyi_connected(int n, double p, uint64_t seed, int max_retries) {
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        Graph g = erdos_renyi(n, p, seed + static_cast<uint64_t>(attempt));
        if (g.connected()) return g;
    }
    throw std::runtime_error("erdos_renyi_connected: no connected draw within retry budget");
}

Graph line_graph(const FlowNetwork& network) {
    const int m = network.edge_count();
    if (m < 1) throw std::invalid_argument("line_graph: network has no edges");
    // Edges incident to a shared network node form a clique among the
    // corresponding line-graph nodes.
    std::vector<std::vector<int>> incident(network.node_count);
    for (int e = 0; e < m; ++e) {
        incident[network.edges[e].first].push_back(e);
        incident[network.edges[e].second].push_back(e);
    }
    std::vector<std::pair<int, int>> pairs;
    for (const auto& bucket : incident)
        for (size_t a = 0; a < bucket.size(); ++a)
            for (size_t b = a + 1; b < bucket.size(); ++b)
                pairs.emplace_back(bucket[a], bucket[b]);
    return Graph(m, std::move(pairs));
}

}  // namespace ginn

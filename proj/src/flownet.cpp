#include "ginn/flownet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

#include "json.hpp"

namespace ginn {

// ---------------------------------------------------------------------
//  FlowNetwork
// ---------------------------------------------------------------------

void FlowNetwork::validate() const {
    if (node_count <= 0) throw std::invalid_argument("FlowNetwork: empty node set");
    if (source == sink) throw std::invalid_argument("FlowNetwork: source equals sink");
    if (sink_incoming.empty()) throw std::invalid_argument("FlowNetwork: sink has no incoming edge");
    for (const auto& [tail, head] : edges) {
        if (tail < 0 || head < 0 || tail >= node_count || head >= node_count)
            throw std::invalid_argument("FlowNetwork: edge index out of range");
        if (head == source) throw std::invalid_argument("FlowNetwork: edge enters source");
        if (tail == sink) throw std::invalid_argument("FlowNetwork: edge leaves sink");
    }
    for (size_t j = 0; j < sink_incoming.size(); ++j) {
        const int e = sink_incoming[j];
        if (e < 0 || e >= edge_count() || edges[e].second != sink)
            throw std::invalid_argument("FlowNetwork: bad sink_incoming entry");
        if (j > 0 && sink_incoming[j] <= sink_incoming[j - 1])
            throw std::invalid_argument("FlowNetwork: sink_incoming not increasing");
    }
}

// ---------------------------------------------------------------------
//  Orientation
// ---------------------------------------------------------------------

namespace {

std::vector<int> bfs_distances(const Graph& g, int start) {
    std::vector<int> dist(g.node_count(), -1);
    std::queue<int> q;
    dist[start] = 0;
    q.push(start);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : g.neighbors(u))
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    return dist;
}

}  // namespace

FlowNetwork orient_network(const Graph& g) {
    if (g.node_count() < 2) throw std::invalid_argument("orient_network: need at least 2 nodes");
    const int n = g.node_count();
    const int s = 0;
    const std::vector<int> dist = bfs_distances(g, s);

    int t = -1, best = -1;
    for (int v = 0; v < n; ++v)
        if (dist[v] > best) {
            best = dist[v];
            t = v;
        }
    if (t == s) throw std::invalid_argument("orient_network: no node reachable from source");

    // Orientation. Unreachable endpoints sort behind everything reachable.
    const auto layer = [&](int v) { return dist[v] < 0 ? std::numeric_limits<int>::max() : dist[v]; };
    std::vector<std::pair<int, int>> directed;
    directed.reserve(g.edges().size());
    for (const auto& [a, b] : g.edges()) {
        int tail = a, head = b;
        if (layer(a) != layer(b)) {
            if (layer(a) > layer(b)) std::swap(tail, head);
        } else if (a == t || b == t) {
            // Same-layer edge at the sink orients into the sink.
            if (tail == t) std::swap(tail, head);
        } else if (a > b) {
            std::swap(tail, head);
        }
        directed.emplace_back(tail, head);
    }

    // Keep only nodes that lie on some s -> t directed path.
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (const auto& [tail, head] : directed) {
        fwd[tail].push_back(head);
        rev[head].push_back(tail);
    }
    const auto reach = [n](const std::vector<std::vector<int>>& adj, int start) {
        std::vector<char> seen(n, 0);
        std::queue<int> q;
        seen[start] = 1;
        q.push(start);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
        }
        return seen;
    };
    const std::vector<char> from_s = reach(fwd, s);
    const std::vector<char> to_t = reach(rev, t);
    if (!from_s[t]) throw std::runtime_error("orient_network: no source->sink path");

    std::vector<int> relabel(n, -1);
    int kept = 0;
    for (int v = 0; v < n; ++v)
        if (from_s[v] && to_t[v]) relabel[v] = kept++;

    FlowNetwork net;
    net.node_count = kept;
    net.source = relabel[s];
    net.sink = relabel[t];
    for (const auto& [tail, head] : directed)
        if (relabel[tail] >= 0 && relabel[head] >= 0)
            net.edges.emplace_back(relabel[tail], relabel[head]);
    for (int e = 0; e < net.edge_count(); ++e)
        if (net.edges[e].second == net.sink) net.sink_incoming.push_back(e);
    net.validate();
    return net;
}

// ---------------------------------------------------------------------
//  Capacity sampling
// ---------------------------------------------------------------------

DenseMatrix sample_capacities(const FlowNetwork& net, int n_samples, uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("sample_capacities: n_samples must be >= 1");
    DenseMatrix caps(n_samples, net.edge_count());
    for (int i = 0; i < n_samples; ++i) {
        Rng rng = Rng::derive(seed, static_cast<uint64_t>(i));
        for (double& c : caps.row(i)) c = rng.uniform_open_closed();
    }
    return caps;
}

// ---------------------------------------------------------------------
//  Dinic
// ---------------------------------------------------------------------

namespace {

constexpr double kResidualEps = 1e-12;

struct DinicSolver {
    struct Arc {
        int to;
        double cap;
        double flow;
    };
    // Arc 2e is network edge e, arc 2e+1 its residual reverse.
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> adj;
    std::vector<int> level, iter;
    int s, t;

    DinicSolver(const FlowNetwork& net, std::span<const double> caps)
        : adj(net.node_count), level(net.node_count), iter(net.node_count),
          s(net.source), t(net.sink) {
        if (static_cast<int>(caps.size()) != net.edge_count())
            throw std::invalid_argument("max_flow: capacity vector length mismatch");
        arcs.reserve(2 * net.edges.size());
        for (int e = 0; e < net.edge_count(); ++e) {
            const auto [tail, head] = net.edges[e];
            const double c = caps[e];
            if (!(c >= 0.0)) throw std::invalid_argument("max_flow: negative capacity");
            adj[tail].push_back(static_cast<int>(arcs.size()));
            arcs.push_back({head, c, 0.0});
            adj[head].push_back(static_cast<int>(arcs.size()));
            arcs.push_back({tail, 0.0, 0.0});
        }
    }

    double residual(int a) const { return arcs[a].cap - arcs[a].flow; }

    bool bfs() {
        std::fill(level.begin(), level.end(), -1);
        std::queue<int> q;
        level[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int a : adj[u]) {
                if (residual(a) > kResidualEps && level[arcs[a].to] < 0) {
                    level[arcs[a].to] = level[u] + 1;
                    q.push(arcs[a].to);
                }
            }
        }
        return level[t] >= 0;
    }

    double dfs(int u, double pushed) {
        if (u == t) return pushed;
        for (int& i = iter[u]; i < static_cast<int>(adj[u].size()); ++i) {
            const int a = adj[u][i];
            const int v = arcs[a].to;
            if (residual(a) > kResidualEps && level[v] == level[u] + 1) {
                const double got = dfs(v, std::min(pushed, residual(a)));
                if (got > 0.0) {
                    arcs[a].flow += got;
                    arcs[a ^ 1].flow -= got;
                    return got;
                }
            }
        }
        return 0.0;
    }

    void solve() {
        while (bfs()) {
            std::fill(iter.begin(), iter.end(), 0);
            while (dfs(s, std::numeric_limits<double>::infinity()) > 0.0) {
            }
        }
    }
};

}  // namespace

std::vector<double> max_flow_edge_flows(const FlowNetwork& net, std::span<const double> capacities) {
    DinicSolver solver(net, capacities);
    solver.solve();
    std::vector<double> flows(net.edge_count());
    for (int e = 0; e < net.edge_count(); ++e) {
        double f = solver.arcs[2 * e].flow;
        // Rounding can leave a flow a few ulp outside [0, cap].
        f = std::clamp(f, 0.0, capacities[e]);
        flows[e] = f;
    }
    return flows;
}

FlowLabel max_flow(const FlowNetwork& net, std::span<const double> capacities) {
    const std::vector<double> flows = max_flow_edge_flows(net, capacities);
    FlowLabel label;
    label.phi_vec.reserve(net.sink_incoming.size());
    double total = 0.0;
    for (int e : net.sink_incoming) {
        label.phi_vec.push_back(flows[e]);
        total += flows[e];
    }
    label.phi = total;
    return label;
}

// ---------------------------------------------------------------------
//  Dataset
// ---------------------------------------------------------------------

Dataset generate_dataset(const FlowNetwork& net, int n_samples, uint64_t seed) {
    Dataset ds;
    ds.network = net;
    ds.seed = seed;
    ds.capacities = sample_capacities(net, n_samples, seed);
    ds.flows = DenseMatrix(n_samples, net.sink_edge_count());
    for (int i = 0; i < n_samples; ++i) {
        const FlowLabel label = max_flow(net, ds.capacities.row(i));
        std::copy(label.phi_vec.begin(), label.phi_vec.end(), ds.flows.row(i).begin());
    }
    ds.provenance = "uniform(0,1] capacities, dinic labels";
    return ds;
}

namespace {

nlohmann::json network_to_json(const FlowNetwork& net) {
    nlohmann::json j;
    j["nodes"] = net.node_count;
    j["source"] = net.source;
    j["sink"] = net.sink;
    auto arr = nlohmann::json::array();
    for (const auto& [tail, head] : net.edges) arr.push_back({tail, head});
    j["edges"] = std::move(arr);
    return j;
}

FlowNetwork network_from_json(const nlohmann::json& j) {
    FlowNetwork net;
    net.node_count = j.at("nodes").get<int>();
    net.source = j.at("source").get<int>();
    net.sink = j.at("sink").get<int>();
    for (const auto& e : j.at("edges")) net.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    for (int e = 0; e < net.edge_count(); ++e)
        if (net.edges[e].second == net.sink) net.sink_incoming.push_back(e);
    net.validate();
    return net;
}

nlohmann::json matrix_to_json(const DenseMatrix& m) {
    auto rows = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (double v : m.row(r)) row.push_back(v);
        rows.push_back(std::move(row));
    }
    return rows;
}

DenseMatrix matrix_from_json(const nlohmann::json& j, int expected_cols) {
    const int rows = static_cast<int>(j.size());
    DenseMatrix m(rows, expected_cols);
    for (int r = 0; r < rows; ++r) {
        const auto& row = j.at(r);
        if (static_cast<int>(row.size()) != expected_cols)
            throw std::invalid_argument("dataset json: ragged matrix row");
        for (int c = 0; c < expected_cols; ++c) m(r, c) = row.at(c).get<double>();
    }
    return m;
}

}  // namespace

std::string Dataset::to_json() const {
    nlohmann::json j;
    j["network"] = network_to_json(network);
    j["seed"] = seed;
    j["capacities"] = matrix_to_json(capacities);
    j["flows"] = matrix_to_json(flows);
    j["sink_incoming"] = network.sink_incoming;
    j["provenance"] = provenance;
    return j.dump();
}

Dataset Dataset::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Dataset ds;
    ds.network = network_from_json(j.at("network"));
    ds.seed = j.at("seed").get<uint64_t>();
    ds.capacities = matrix_from_json(j.at("capacities"), ds.network.edge_count());
    ds.flows = matrix_from_json(j.at("flows"), ds.network.sink_edge_count());
    if (ds.capacities.rows() != ds.flows.rows())
        throw std::invalid_argument("dataset json: row count mismatch");
    if (j.contains("sink_incoming") &&
        j.at("sink_incoming").get<std::vector<int>>() != ds.network.sink_incoming)
        throw std::invalid_argument("dataset json: sink_incoming disagrees with network");
    if (j.contains("provenance")) ds.provenance = j.at("provenance").get<std::string>();
    return ds;
}

void Dataset::save_json(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_json() << '\n';
}

Dataset Dataset::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

// ---------------------------------------------------------------------
//  Context hash
// ---------------------------------------------------------------------

namespace {

void fnv_mix(uint64_t& h, uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
        h ^= (v >> (8 * byte)) & 0xffu;
        h *= 1099511628211ull;
    }
}

}  // namespace

uint64_t network_context_hash(const FlowNetwork& net) {
    const Graph lg = line_graph(net);
    uint64_t h = 1469598103934665603ull;
    fnv_mix(h, 0x67696e6e2d763101ull);  // schema tag
    fnv_mix(h, static_cast<uint64_t>(lg.node_count()));
    for (const auto& [a, b] : lg.edges()) {
        fnv_mix(h, static_cast<uint64_t>(a));
        fnv_mix(h, static_cast<uint64_t>(b));
    }
    fnv_mix(h, static_cast<uint64_t>(net.sink_incoming.size()));
    for (int e : net.sink_incoming) fnv_mix(h, static_cast<uint64_t>(e));
    return h;
}

}  // namespace ginn

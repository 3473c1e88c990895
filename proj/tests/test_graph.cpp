#include <set>

#include "doctest.h"
#include "ginn/flownet.hpp"
#include "ginn/graph.hpp"
#include "test_support.hpp"

using namespace ginn;

TEST_SUITE_BEGIN("graph");

namespace {

void check_structural_invariants(const Graph& g) {
    const SparseBinaryCsr& a = g.adjacency();
    for (int i = 0; i < g.node_count(); ++i) {
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
            const int j = a.col_idx[p];
            CHECK(j != i);          // zero diagonal
            CHECK(j >= 0);
            CHECK(j < g.node_count());
            CHECK(g.has_edge(j, i));  // symmetry
        }
    }
    for (const auto& [i, j] : g.edges()) CHECK(i < j);
}

FlowNetwork path_network(int len) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < len; ++i) edges.emplace_back(i, i + 1);
    return orient_network(Graph(len + 1, std::move(edges)));
}

}  // namespace

TEST_CASE("graph constructor canonicalizes and validates") {
    const Graph g(4, {{2, 0}, {0, 2}, {1, 3}});
    CHECK(g.edge_count() == 2);
    CHECK(g.edges()[0] == std::make_pair(0, 2));
    CHECK(g.has_edge(3, 1));
    check_structural_invariants(g);

    CHECK_THROWS_AS(Graph(3, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Graph(3, {{0, 3}}), std::invalid_argument);
}

TEST_CASE("barabasi-albert structural cases") {
    const Graph triangle = barabasi_albert(3, 2, 0);
    CHECK(triangle.edge_count() == 3);  // initial clique only

    const Graph tree = barabasi_albert(10, 1, 4);
    CHECK(tree.edge_count() == 9);  // m_attach=1 gives |E| = n-1
    CHECK(tree.connected());

    const Graph ba = barabasi_albert(20, 2, 7);
    CHECK(ba.edge_count() == 3 + 2 * 17);
    int degree_sum = 0;
    for (int v = 0; v < 20; ++v) degree_sum += ba.degree(v);
    CHECK(degree_sum == 2 * ba.edge_count());
    CHECK(ba.connected());
    check_structural_invariants(ba);

    CHECK_THROWS_AS(barabasi_albert(5, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(barabasi_albert(5, 5, 1), std::invalid_argument);
}

TEST_CASE("erdos-renyi endpoints and seeded draw") {
    CHECK(erdos_renyi(10, 0.0, 3).edge_count() == 0);
    CHECK(erdos_renyi(10, 1.0, 3).edge_count() == 45);

    const Graph g = erdos_renyi(30, 0.2, 3);
    // 5%/95% binomial band for Binomial(435, 0.2) is well inside [30, 150].
    CHECK(g.edge_count() >= 30);
    CHECK(g.edge_count() <= 150);
    CHECK(g.edge_count() == 80);  // regression snapshot for this seed
    check_structural_invariants(g);

    CHECK_THROWS_AS(erdos_renyi(10, -0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(erdos_renyi(10, 1.5, 0), std::invalid_argument);
}

TEST_CASE("generators are reproducible") {
    CHECK(barabasi_albert(25, 3, 11).edges() == barabasi_albert(25, 3, 11).edges());
    CHECK(erdos_renyi(25, 0.3, 11).edges() == erdos_renyi(25, 0.3, 11).edges());
}

TEST_CASE("erdos_renyi_connected resamples to connectivity") {
    const Graph g = erdos_renyi_connected(20, 0.15, 5);
    CHECK(g.connected());
    CHECK_THROWS_AS(erdos_renyi_connected(20, 0.0, 5, 3), std::runtime_error);
}

TEST_CASE("line graph of a two-edge path is a single edge") {
    const FlowNetwork net = path_network(2);
    const Graph lg = line_graph(net);
    CHECK(lg.node_count() == 2);
    CHECK(lg.edge_count() == 1);
    CHECK(lg.has_edge(0, 1));
}

TEST_CASE("line graph of a star is a triangle") {
    FlowNetwork star;
    star.node_count = 4;
    star.edges = {{0, 1}, {0, 2}, {0, 3}};
    star.source = 0;
    star.sink = 1;
    star.sink_incoming = {0};
    const Graph lg = line_graph(star);
    CHECK(lg.node_count() == 3);
    CHECK(lg.edge_count() == 3);
}

TEST_CASE("line graph of the diamond is the 4-cycle") {
    FlowNetwork diamond;
    diamond.node_count = 4;  // s=0, a=1, b=2, t=3
    diamond.edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    diamond.source = 0;
    diamond.sink = 3;
    diamond.sink_incoming = {2, 3};
    const Graph lg = line_graph(diamond);
    CHECK(lg.node_count() == 4);
    CHECK(lg.edge_count() == 4);
    CHECK(lg.has_edge(0, 2));   // s->a with a->t
    CHECK(lg.has_edge(1, 3));   // s->b with b->t
    CHECK(lg.has_edge(0, 1));   // the two source edges
    CHECK(lg.has_edge(2, 3));   // the two sink edges
    CHECK(!lg.has_edge(0, 3));  // s->a and b->t share nothing
    CHECK(!lg.has_edge(1, 2));
}

TEST_CASE("line graph degree matches the endpoint-degree formula") {
    // deg_L(e) = deg(tail) + deg(head) - 2 in the underlying undirected
    // network; brute-forced on small oriented graphs.
    for (uint64_t seed : {1u, 2u, 3u, 4u}) {
        const Graph base = erdos_renyi_connected(6, 0.5, seed);
        const FlowNetwork net = orient_network(base);
        if (net.edge_count() > 10) continue;
        const Graph lg = line_graph(net);
        std::vector<int> undirected_degree(net.node_count, 0);
        for (const auto& [tail, head] : net.edges) {
            ++undirected_degree[tail];
            ++undirected_degree[head];
        }
        for (int e = 0; e < net.edge_count(); ++e) {
            const auto [tail, head] = net.edges[e];
            CHECK(lg.degree(e) == undirected_degree[tail] + undirected_degree[head] - 2);
        }
    }
}

TEST_CASE("line_graph rejects an empty network") {
    FlowNetwork empty;
    empty.node_count = 2;
    CHECK_THROWS_AS(line_graph(empty), std::invalid_argument);
}

TEST_CASE("augmented adjacency pattern") {
    const AugmentedAdjacency eye = augmented_adjacency(Graph(2, {}));
    CHECK(eye.mat.nnz() == 2);
    CHECK(eye.mat.to_dense()(0, 0) == 1.0);
    CHECK(eye.mat.to_dense()(0, 1) == 0.0);

    const AugmentedAdjacency pair = augmented_adjacency(Graph(2, {{0, 1}}));
    const DenseMatrix d = pair.mat.to_dense();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(d(i, j) == 1.0);

    const AugmentedAdjacency tri = augmented_adjacency(Graph(3, {{0, 1}, {1, 2}, {0, 2}}));
    const DenseMatrix t = tri.mat.to_dense();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(t(i, j) == 1.0);
}

TEST_CASE("augmented adjacency: diagonal plus original pattern") {
    const Graph g = barabasi_albert(12, 2, 3);
    const AugmentedAdjacency ahat = augmented_adjacency(g);
    const DenseMatrix d = ahat.mat.to_dense();
    for (int i = 0; i < 12; ++i) {
        CHECK(d(i, i) == 1.0);
        for (int j = 0; j < 12; ++j)
            if (i != j) CHECK(d(i, j) == (g.has_edge(i, j) ? 1.0 : 0.0));
    }
}

TEST_CASE("graph json round trip") {
    const Graph g = barabasi_albert(15, 2, 21);
    const Graph back = Graph::from_json(g.to_json());
    CHECK(back.node_count() == g.node_count());
    CHECK(back.edges() == g.edges());
    // schema: {"n": int, "edges": [[i, j], ...]} with i < j
    CHECK(g.to_json().find("\"n\":15") != std::string::npos);
    CHECK(g.to_json().find("\"edges\":[[0,1]") != std::string::npos);
}

TEST_SUITE_END();

#include <cmath>

#include "doctest.h"
#include "ginn/flownet.hpp"
#include "test_support.hpp"

using namespace ginn;
using test_support::brute_force_min_cut;
using test_support::conservation_violation;

TEST_SUITE_BEGIN("flownet");

namespace {

FlowNetwork diamond() {
    // s=0 -> {a=1, b=2} -> t=3
    const Graph g(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    return orient_network(g);
}

}  // namespace

TEST_CASE("orient a path") {
    const FlowNetwork net = orient_network(Graph(3, {{0, 1}, {1, 2}}));
    CHECK(net.node_count == 3);
    CHECK(net.source == 0);
    CHECK(net.sink == 2);
    CHECK(net.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    CHECK(net.sink_incoming == std::vector<int>{1});
}

TEST_CASE("orient a triangle: same-layer tie turns into the sink") {
    const FlowNetwork net = orient_network(Graph(3, {{0, 1}, {1, 2}, {0, 2}}));
    CHECK(net.source == 0);
    CHECK(net.sink == 1);  // lowest index among BFS-distance ties
    CHECK(net.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {2, 1}});
    CHECK(net.sink_edge_count() == 2);
    CHECK(net.sink_incoming == std::vector<int>{0, 2});
}

TEST_CASE("orient a star: dead-end leaves are pruned") {
    const FlowNetwork net = orient_network(Graph(4, {{0, 1}, {0, 2}, {0, 3}}));
    CHECK(net.node_count == 2);
    CHECK(net.edges == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(net.sink_incoming == std::vector<int>{0});
}

TEST_CASE("orientation output is acyclic and valid on random graphs") {
    for (uint64_t seed = 1; seed <= 8; ++seed) {
        const Graph g = erdos_renyi_connected(12, 0.3, seed);
        const FlowNetwork net = orient_network(g);
        net.validate();
        // Kahn peeling proves acyclicity.
        std::vector<int> indegree(net.node_count, 0);
        for (const auto& [tail, head] : net.edges) ++indegree[head];
        std::vector<std::vector<int>> out(net.node_count);
        for (const auto& [tail, head] : net.edges) out[tail].push_back(head);
        std::vector<int> stack;
        for (int v = 0; v < net.node_count; ++v)
            if (indegree[v] == 0) stack.push_back(v);
        int peeled = 0;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            ++peeled;
            for (int v : out[u])
                if (--indegree[v] == 0) stack.push_back(v);
        }
        CHECK(peeled == net.node_count);
    }
}

TEST_CASE("orientation fails cleanly when the source reaches nothing") {
    CHECK_THROWS(orient_network(Graph(3, {{1, 2}})));  // node 0 isolated
}

TEST_CASE("sample_capacities requires at least one sample") {
    CHECK_THROWS_AS(sample_capacities(diamond(), 0, 1), std::invalid_argument);
}

TEST_CASE("capacity samples: range, determinism, mean concentration") {
    const FlowNetwork net = diamond();
    const DenseMatrix a = sample_capacities(net, 200, 9);
    const DenseMatrix b = sample_capacities(net, 200, 9);
    CHECK(a == b);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a.data()[i] > 0.0);
        CHECK(a.data()[i] <= 1.0);
    }
    const DenseMatrix big = sample_capacities(net, 10000, 10);
    for (int c = 0; c < big.cols(); ++c) {
        double mean = 0.0;
        for (int r = 0; r < big.rows(); ++r) mean += big(r, c);
        mean /= big.rows();
        CHECK(mean > 0.45);
        CHECK(mean < 0.55);
    }
}

TEST_CASE("per-sample rng streams make prefixes agree") {
    const FlowNetwork net = diamond();
    const DenseMatrix small = sample_capacities(net, 5, 3);
    const DenseMatrix large = sample_capacities(net, 50, 3);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < net.edge_count(); ++c) CHECK(small(r, c) == large(r, c));
}

TEST_CASE("max flow on a single edge") {
    const FlowNetwork net = orient_network(Graph(2, {{0, 1}}));
    const FlowLabel label = max_flow(net, std::vector<double>{0.7});
    CHECK(label.phi == 0.7);
    CHECK(label.phi_vec == std::vector<double>{0.7});
}

TEST_CASE("max flow on the diamond matches the hand min-cut") {
    const FlowNetwork net = diamond();
    // Edge order from the sorted graph edges: (0,1), (0,2), (1,3), (2,3).
    const std::vector<double> caps = {0.5, 0.4, 0.3, 0.9};
    const FlowLabel label = max_flow(net, caps);
    CHECK(label.phi == doctest::Approx(0.7).epsilon(1e-12));
    REQUIRE(label.phi_vec.size() == 2);
    CHECK(label.phi_vec[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(label.phi_vec[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(brute_force_min_cut(net, caps) == doctest::Approx(label.phi).epsilon(1e-12));
}

TEST_CASE("zero capacities out of the source give zero flow") {
    const FlowNetwork net = diamond();
    const FlowLabel label = max_flow(net, std::vector<double>{0.0, 0.0, 0.3, 0.9});
    CHECK(label.phi == 0.0);
    for (double v : label.phi_vec) CHECK(v == 0.0);
}

TEST_CASE("max flow equals brute-force min cut on random networks") {
    int checked = 0;
    for (uint64_t seed = 1; checked < 40; ++seed) {
        const Graph g = erdos_renyi_connected(9, 0.35, seed);
        const FlowNetwork net = orient_network(g);
        const DenseMatrix caps = sample_capacities(net, 1, seed + 1000);
        const FlowLabel label = max_flow(net, caps.row(0));
        const double cut = brute_force_min_cut(net, caps.row(0));
        CHECK(std::abs(label.phi - cut) < 1e-9);

        const std::vector<double> flows = max_flow_edge_flows(net, caps.row(0));
        CHECK(conservation_violation(net, flows) < 1e-9);
        for (int e = 0; e < net.edge_count(); ++e) {
            CHECK(flows[e] >= 0.0);
            CHECK(flows[e] <= caps(0, e));
        }
        double sum = 0.0;
        for (double v : label.phi_vec) sum += v;
        CHECK(sum == label.phi);  // exact by construction
        ++checked;
    }
}

TEST_CASE("raising one capacity never lowers the max flow") {
    const Graph g = erdos_renyi_connected(8, 0.4, 17);
    const FlowNetwork net = orient_network(g);
    const DenseMatrix caps = sample_capacities(net, 1, 99);
    const double base = max_flow(net, caps.row(0)).phi;
    for (int e = 0; e < net.edge_count(); ++e) {
        std::vector<double> bumped(caps.row(0).begin(), caps.row(0).end());
        bumped[e] += 0.5;
        CHECK(max_flow(net, bumped).phi >= base - 1e-12);
    }
}

TEST_CASE("dataset generation pairs rows with their labels") {
    const FlowNetwork net = diamond();
    const Dataset one = generate_dataset(net, 1, 5);
    CHECK(one.capacities.rows() == 1);
    CHECK(one.flows.rows() == 1);
    CHECK(one.flows.cols() == net.sink_edge_count());

    const Dataset ds = generate_dataset(net, 60, 5);
    for (int r = 0; r < ds.sample_count(); ++r) {
        const FlowLabel resolved = max_flow(net, ds.capacities.row(r));
        double row_sum = 0.0;
        for (int c = 0; c < ds.flows.cols(); ++c) {
            CHECK(ds.flows(r, c) == resolved.phi_vec[c]);
            row_sum += ds.flows(r, c);
        }
        CHECK(row_sum == doctest::Approx(resolved.phi).epsilon(1e-15));
    }
}

TEST_CASE("dataset serialization is deterministic and round-trips") {
    const FlowNetwork net = diamond();
    const Dataset ds = generate_dataset(net, 100, 12);
    const std::string a = ds.to_json();
    const std::string b = generate_dataset(net, 100, 12).to_json();
    CHECK(a == b);

    const Dataset back = Dataset::from_json(a);
    CHECK(back.capacities == ds.capacities);  // exact double round trip
    CHECK(back.flows == ds.flows);
    CHECK(back.network.edges == ds.network.edges);
    CHECK(back.seed == ds.seed);
}

TEST_CASE("dataset json carries the documented top-level keys") {
    const Dataset ds = generate_dataset(diamond(), 3, 2);
    const std::string text = ds.to_json();
    for (const char* key : {"\"network\"", "\"seed\"", "\"capacities\"", "\"flows\"",
                            "\"sink_incoming\""})
        CHECK(text.find(key) != std::string::npos);
}

TEST_CASE("network context hash separates different networks") {
    const uint64_t h1 = network_context_hash(diamond());
    const uint64_t h2 = network_context_hash(orient_network(Graph(3, {{0, 1}, {1, 2}})));
    CHECK(h1 != h2);
    CHECK(h1 == network_context_hash(diamond()));
}

TEST_SUITE_END();

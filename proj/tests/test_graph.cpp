#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "fcm/graph.hpp"
#include "fcm/random.hpp"
#include "oracles.hpp"

using namespace fcm;

namespace {

std::set<oracle::IndexTuple> tuple_set(const CoactivationGraph& graph) {
    std::set<oracle::IndexTuple> out;
    for (const auto& [tuple, count] : graph.counts)
        out.insert(oracle::IndexTuple(tuple.indices().begin(), tuple.indices().end()));
    return out;
}

}  // namespace

TEST_CASE("tuples_from_mask: pairs of three active neurons") {
    auto graph = tuples_from_mask(make_mask(16, {2, 5, 9}), PatternOrder::pairs);
    REQUIRE(graph.size() == 3);
    REQUIRE(graph.counts.at(NeuronTuple(2, 5)) == 1);
    REQUIRE(graph.counts.at(NeuronTuple(2, 9)) == 1);
    REQUIRE(graph.counts.at(NeuronTuple(5, 9)) == 1);
}

TEST_CASE("tuples_from_mask: fewer actives than the order gives an empty graph") {
    auto graph = tuples_from_mask(make_mask(16, {7}), PatternOrder::pairs);
    REQUIRE(graph.empty());
}

TEST_CASE("tuples_from_mask: triplets") {
    auto graph = tuples_from_mask(make_mask(16, {1, 2, 3, 4}), PatternOrder::triplets);
    REQUIRE(graph.size() == 4);  // C(4,3)
    REQUIRE(graph.counts.count(NeuronTuple(1, 2, 3)) == 1);
    REQUIRE(graph.counts.count(NeuronTuple(2, 3, 4)) == 1);
}

TEST_CASE("tuples_from_mask: singles degenerate to the active set") {
    auto graph = tuples_from_mask(make_mask(16, {3, 11}), PatternOrder::singles);
    REQUIRE(graph.size() == 2);
    REQUIRE(graph.counts.count(NeuronTuple(3)) == 1);
    REQUIRE(graph.counts.count(NeuronTuple(11)) == 1);
}

TEST_CASE("tuples_from_mask emits exactly C(m, order) distinct tuples") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = rng.uniform_below(21);
        const auto mask = oracle::random_mask(rng, 64, m);
        for (int order = 1; order <= 3; ++order) {
            const auto graph = tuples_from_mask(mask, pattern_order_from_int(order));
            REQUIRE(graph.size() == oracle::binomial(m, order));
            REQUIRE(tuple_set(graph) == oracle::all_combinations(mask.active, order));
            for (const auto& [tuple, count] : graph.counts) REQUIRE(count == 1);
        }
    }
}

TEST_CASE("sum_graphs: hand-summed counts") {
    CoactivationGraph a{PatternOrder::pairs, 8, {{NeuronTuple(1, 2), 1}, {NeuronTuple(2, 3), 1}}};
    CoactivationGraph b{PatternOrder::pairs, 8, {{NeuronTuple(1, 2), 1}}};
    std::vector<CoactivationGraph> graphs = {a, b};
    auto total = sum_graphs(graphs);
    REQUIRE(total.size() == 2);
    REQUIRE(total.counts.at(NeuronTuple(1, 2)) == 2);
    REQUIRE(total.counts.at(NeuronTuple(2, 3)) == 1);
}

TEST_CASE("sum_graphs: single graph is the identity") {
    auto graph = tuples_from_mask(make_mask(16, {1, 4, 9}), PatternOrder::pairs);
    std::vector<CoactivationGraph> one = {graph};
    REQUIRE(sum_graphs(one).counts == graph.counts);
}

TEST_CASE("sum_graphs: K copies multiply every count by K") {
    auto graph = tuples_from_mask(make_mask(16, {1, 4, 9, 13}), PatternOrder::pairs);
    std::vector<CoactivationGraph> copies(5, graph);
    auto total = sum_graphs(copies);
    for (const auto& [tuple, count] : total.counts) REQUIRE(count == 5 * graph.counts.at(tuple));
}

TEST_CASE("sum_graphs: mixed inputs rejected") {
    auto pairs = tuples_from_mask(make_mask(16, {1, 2}), PatternOrder::pairs);
    auto singles = tuples_from_mask(make_mask(16, {1, 2}), PatternOrder::singles);
    auto other_dim = tuples_from_mask(make_mask(8, {1, 2}), PatternOrder::pairs);
    std::vector<CoactivationGraph> mixed_order = {pairs, singles};
    std::vector<CoactivationGraph> mixed_dim = {pairs, other_dim};
    REQUIRE_THROWS_AS(sum_graphs(mixed_order), Error);
    REQUIRE_THROWS_AS(sum_graphs(mixed_dim), Error);
    REQUIRE_THROWS_AS(sum_graphs({}), Error);
}

TEST_CASE("sum_graphs is commutative and associative") {
    Rng rng(23);
    std::vector<CoactivationGraph> graphs;
    for (int g = 0; g < 6; ++g)
        graphs.push_back(
            tuples_from_mask(oracle::random_mask(rng, 24, 2 + rng.uniform_below(7)),
                             PatternOrder::pairs));
    const auto reference = sum_graphs(graphs);

    auto shuffled = graphs;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[0], shuffled[3]);
    REQUIRE(sum_graphs(shuffled).counts == reference.counts);

    // Regrouped: sum of partial sums.
    std::vector<CoactivationGraph> left(graphs.begin(), graphs.begin() + 2);
    std::vector<CoactivationGraph> right(graphs.begin() + 2, graphs.end());
    std::vector<CoactivationGraph> partials = {sum_graphs(left), sum_graphs(right)};
    REQUIRE(sum_graphs(partials).counts == reference.counts);
}

TEST_CASE("top_n: strongest first") {
    CoactivationGraph graph{PatternOrder::pairs, 8,
                            {{NeuronTuple(1, 2), 2}, {NeuronTuple(2, 3), 1}}};
    auto selection = top_n(graph, 1);
    REQUIRE(selection.entries.size() == 1);
    REQUIRE(selection.entries[0].first == NeuronTuple(1, 2));
    REQUIRE(selection.entries[0].second == 2);
    REQUIRE_FALSE(selection.truncated);
}

TEST_CASE("top_n: ties break lexicographically") {
    CoactivationGraph graph{
        PatternOrder::pairs, 8,
        {{NeuronTuple(0, 3), 4}, {NeuronTuple(0, 1), 4}, {NeuronTuple(2, 4), 4}}};
    auto selection = top_n(graph, 2);
    REQUIRE(selection.entries.size() == 2);
    REQUIRE(selection.entries[0].first == NeuronTuple(0, 1));
    REQUIRE(selection.entries[1].first == NeuronTuple(0, 3));
}

TEST_CASE("top_n: requesting more than available returns everything, flagged") {
    auto graph = tuples_from_mask(make_mask(16, {1, 2, 3}), PatternOrder::pairs);
    auto selection = top_n(graph, 10);
    REQUIRE(selection.entries.size() == 3);
    REQUIRE(selection.truncated);
    REQUIRE_THROWS_AS(top_n(graph, 0), Error);
}

TEST_CASE("top_n is deterministic") {
    Rng rng(31);
    std::vector<CoactivationGraph> graphs;
    for (int g = 0; g < 8; ++g)
        graphs.push_back(tuples_from_mask(oracle::random_mask(rng, 20, 6), PatternOrder::pairs));
    const auto total = sum_graphs(graphs);
    const auto first = top_n(total, 7);
    for (int repeat = 0; repeat < 5; ++repeat) {
        const auto again = top_n(total, 7);
        REQUIRE(again.entries == first.entries);
        REQUIRE(again.truncated == first.truncated);
    }
}

TEST_CASE("neuron relabeling commutes with graph construction and summation") {
    Rng rng(47);
    const std::uint32_t dim = 20;
    // Random permutation of neuron labels.
    std::vector<std::uint32_t> perm(dim);
    for (std::uint32_t i = 0; i < dim; ++i) perm[i] = i;
    for (std::uint32_t i = 0; i < dim; ++i)
        std::swap(perm[i], perm[i + rng.uniform_below(dim - i)]);

    auto permute_mask = [&](const ActivityMask& mask) {
        std::vector<std::uint32_t> relabeled;
        for (std::uint32_t i : mask.active) relabeled.push_back(perm[i]);
        return make_mask(dim, std::move(relabeled));
    };
    auto permute_graph = [&](const CoactivationGraph& graph) {
        CoactivationGraph out{graph.order, graph.dim, {}};
        for (const auto& [tuple, count] : graph.counts) {
            std::vector<std::uint32_t> relabeled;
            for (std::uint32_t i : tuple.indices()) relabeled.push_back(perm[i]);
            std::sort(relabeled.begin(), relabeled.end());
            out.counts.emplace(NeuronTuple::from_indices(relabeled), count);
        }
        return out;
    };

    std::vector<CoactivationGraph> original, relabeled;
    for (int g = 0; g < 5; ++g) {
        const auto mask = oracle::random_mask(rng, dim, 3 + rng.uniform_below(5));
        original.push_back(tuples_from_mask(mask, PatternOrder::pairs));
        relabeled.push_back(tuples_from_mask(permute_mask(mask), PatternOrder::pairs));
        REQUIRE(relabeled.back().counts == permute_graph(original.back()).counts);
    }
    REQUIRE(sum_graphs(relabeled).counts == permute_graph(sum_graphs(original)).counts);
}

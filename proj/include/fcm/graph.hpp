#ifndef FCM_GRAPH_HPP
#define FCM_GRAPH_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "fcm/encoding.hpp"
#include "fcm/error.hpp"

namespace fcm {

/// Co-activation pattern arity: single neurons, pairs, or triplets.
enum class PatternOrder : int { singles = 1, pairs = 2, triplets = 3 };

constexpr int order_size(PatternOrder order) { return static_cast<int>(order); }

inline PatternOrder pattern_order_from_int(int value) {
    require(value >= 1 && value <= 3, ErrorCode::invalid_argument,
            "pattern order must be 1, 2, or 3");
    return static_cast<PatternOrder>(value);
}

/// Sorted tuple of 1..3 neuron indices. Ordered lexicographically, which is
/// the tie-break order used throughout.
class NeuronTuple {
public:
    NeuronTuple() = default;

    explicit NeuronTuple(std::uint32_t a) : idx_{a, 0, 0}, size_(1) {}
    NeuronTuple(std::uint32_t a, std::uint32_t b) : idx_{a, b, 0}, size_(2) {
        require(a < b, ErrorCode::invalid_argument, "tuple indices must be strictly ascending");
    }
    NeuronTuple(std::uint32_t a, std::uint32_t b, std::uint32_t c) : idx_{a, b, c}, size_(3) {
        require(a < b && b < c, ErrorCode::invalid_argument,
                "tuple indices must be strictly ascending");
    }

    static NeuronTuple from_indices(std::span<const std::uint32_t> indices) {
        switch (indices.size()) {
            case 1: return NeuronTuple(indices[0]);
            case 2: return NeuronTuple(indices[0], indices[1]);
            case 3: return NeuronTuple(indices[0], indices[1], indices[2]);
            default:
                raise(ErrorCode::invalid_argument, "tuple must hold 1 to 3 indices");
        }
    }

    std::span<const std::uint32_t> indices() const { return {idx_.data(), size_}; }
    std::size_t size() const { return size_; }
    std::uint32_t operator[](std::size_t i) const { return idx_[i]; }

    /// True when every tuple index is active in the mask.
    bool subset_of(const ActivityMask& mask) const {
        for (std::size_t i = 0; i < size_; ++i)
            if (!mask.contains(idx_[i])) return false;
        return true;
    }

    friend auto operator<=>(const NeuronTuple& a, const NeuronTuple& b) {
        for (std::size_t i = 0; i < std::min(a.size_, b.size_); ++i)
            if (auto c = a.idx_[i] <=> b.idx_[i]; c != 0) return c;
        return a.size_ <=> b.size_;
    }
    friend bool operator==(const NeuronTuple& a, const NeuronTuple& b) {
        return (a <=> b) == 0;
    }

private:
    std::array<std::uint32_t, 3> idx_{};
    std::size_t size_ = 0;
};

/// Weighted set of co-active neuron tuples. Counts record in how many source
/// frames each tuple was jointly active.
struct CoactivationGraph {
    PatternOrder order = PatternOrder::pairs;
    std::uint32_t dim = 0;
    std::map<NeuronTuple, std::uint64_t> counts;

    std::size_t size() const { return counts.size(); }
    bool empty() const { return counts.empty(); }
};

/// All C(m, order) combinations of the mask's m active neurons, each with
/// count 1. Empty graph when m < order.
inline CoactivationGraph tuples_from_mask(const ActivityMask& mask, PatternOrder order) {
    CoactivationGraph graph;
    graph.order = order;
    graph.dim = mask.dim;
    const auto& a = mask.active;
    const std::size_t m = a.size();
    switch (order) {
        case PatternOrder::singles:
            for (std::size_t i = 0; i < m; ++i)
                graph.counts.emplace(NeuronTuple(a[i]), 1);
            break;
        case PatternOrder::pairs:
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = i + 1; j < m; ++j)
                    graph.counts.emplace(NeuronTuple(a[i], a[j]), 1);
            break;
        case PatternOrder::triplets:
            for (std::size_t i = 0; i + 2 < m; ++i)
                for (std::size_t j = i + 1; j + 1 < m; ++j)
                    for (std::size_t k = j + 1; k < m; ++k)
                        graph.counts.emplace(NeuronTuple(a[i], a[j], a[k]), 1);
            break;
    }
    return graph;
}

/// Tuple-wise sum of graphs sharing order and dimensionality.
inline CoactivationGraph sum_graphs(std::span<const CoactivationGraph> graphs) {
    require(!graphs.empty(), ErrorCode::empty_input, "sum over empty graph list");
    CoactivationGraph total;
    total.order = graphs.front().order;
    total.dim = graphs.front().dim;
    for (const auto& graph : graphs) {
        require(graph.order == total.order, ErrorCode::order_mismatch,
                "cannot sum graphs of mixed pattern order");
        require(graph.dim == total.dim, ErrorCode::dimension_mismatch,
                "cannot sum graphs of mixed dimensionality");
        for (const auto& [tuple, count] : graph.counts) total.counts[tuple] += count;
    }
    return total;
}

/// Result of selecting the strongest connections. `truncated` is set when the
/// graph held fewer than the requested n tuples.
struct TopSelection {
    std::vector<std::pair<NeuronTuple, std::uint64_t>> entries;
    bool truncated = false;
};

/// The n strongest tuples, sorted by count descending then lexicographic
/// tuple order ascending. Deterministic for any input; returns the whole
/// graph (with the truncated flag set) when it holds fewer than n tuples.
inline TopSelection top_n(const CoactivationGraph& graph, std::size_t n) {
    require(n >= 1, ErrorCode::invalid_argument, "top_n requires n >= 1");
    TopSelection selection;
    selection.entries.assign(graph.counts.begin(), graph.counts.end());
    // Map iteration is lexicographic ascending, so a stable sort on count
    // alone leaves ties in lexicographic order.
    std::stable_sort(selection.entries.begin(), selection.entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (selection.entries.size() > n) {
        selection.entries.resize(n);
    } else if (selection.entries.size() < n) {
        selection.truncated = true;
    }
    return selection;
}

}  // namespace fcm

#endif  // FCM_GRAPH_HPP

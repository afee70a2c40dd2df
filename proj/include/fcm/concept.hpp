#ifndef FCM_CONCEPT_HPP
#define FCM_CONCEPT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fcm/encoding.hpp"
#include "fcm/error.hpp"
#include "fcm/graph.hpp"

namespace fcm {

/// Extraction and detection parameters. Defaults follow the reference
/// protocol: ten pair connections, detected above 20% evidence.
struct FcmConfig {
    std::size_t pattern_complexity = 10;
    double detection_threshold = 0.20;
    PatternOrder order = PatternOrder::pairs;

    void validate() const {
        require(pattern_complexity >= 1, ErrorCode::invalid_argument,
                "pattern complexity must be >= 1");
        require(detection_threshold >= 0.0 && detection_threshold <= 1.0,
                ErrorCode::invalid_argument, "detection threshold must be in [0, 1]");
    }
};

/// A named concept: the strongest co-activation tuples across the example
/// encodings, with connection weights normalized to sum to 1. Raw counts are
/// retained so a definition stays auditable after serialization.
struct ConceptDefinition {
    struct Entry {
        NeuronTuple tuple;
        std::uint64_t count = 0;
        double weight = 0.0;
    };

    std::string name;
    PatternOrder order = PatternOrder::pairs;
    std::uint32_t dim = 0;
    std::vector<Entry> entries;  // count descending, lexicographic tie-break
    std::size_t k_examples = 0;
    std::size_t n_requested = 0;
    std::vector<std::string> warnings;
};

struct DetectionResult {
    std::string concept_name;
    double evidence = 0.0;
    bool present = false;
};

/// Builds a concept definition from a few example masks: per-example tuple
/// graphs are summed and the n strongest connections keep their normalized
/// counts as weights.
inline ConceptDefinition extract_concept(const std::string& name,
                                         std::span<const ActivityMask> examples,
                                         const FcmConfig& config) {
    config.validate();
    require(!examples.empty(), ErrorCode::empty_input,
            "concept extraction requires at least one example");
    std::vector<CoactivationGraph> graphs;
    graphs.reserve(examples.size());
    const std::uint32_t dim = examples.front().dim;
    for (const auto& mask : examples) {
        require(mask.dim == dim, ErrorCode::dimension_mismatch,
                "example masks with mixed dimensionality");
        graphs.push_back(tuples_from_mask(mask, config.order));
    }
    const CoactivationGraph total = sum_graphs(graphs);
    if (total.empty())
        raise(ErrorCode::not_expressible,
              "concept not expressible at this order: '" + name + "'");

    const TopSelection selection = top_n(total, config.pattern_complexity);
    ConceptDefinition definition;
    definition.name = name;
    definition.order = config.order;
    definition.dim = dim;
    definition.k_examples = examples.size();
    definition.n_requested = config.pattern_complexity;

    std::uint64_t total_count = 0;
    for (const auto& [tuple, count] : selection.entries) total_count += count;
    definition.entries.reserve(selection.entries.size());
    for (const auto& [tuple, count] : selection.entries)
        definition.entries.push_back(
            {tuple, count, static_cast<double>(count) / static_cast<double>(total_count)});
    if (selection.truncated)
        definition.warnings.push_back(
            "definition shorter than requested: " +
            std::to_string(selection.entries.size()) + " of " +
            std::to_string(config.pattern_complexity) + " connections available");
    return definition;
}

/// Summed weight of definition tuples fully active in the mask; in [0, 1].
inline double evidence(const ConceptDefinition& definition, const ActivityMask& mask) {
    require(!definition.entries.empty(), ErrorCode::empty_definition,
            "evidence against an empty concept definition");
    require(mask.dim == definition.dim, ErrorCode::dimension_mismatch,
            "mask dimensionality does not match concept definition");
    double total = 0.0;
    for (const auto& entry : definition.entries)
        if (entry.tuple.subset_of(mask)) total += entry.weight;
    return total;
}

/// Independent multi-label decisions: each concept is present iff its
/// evidence strictly exceeds the threshold.
inline std::vector<DetectionResult> detect(std::span<const ConceptDefinition> definitions,
                                           const ActivityMask& mask, double threshold) {
    require(threshold >= 0.0 && threshold <= 1.0, ErrorCode::invalid_argument,
            "detection threshold must be in [0, 1]");
    std::vector<DetectionResult> results;
    results.reserve(definitions.size());
    for (const auto& definition : definitions) {
        const double score = evidence(definition, mask);
        results.push_back({definition.name, score, score > threshold});
    }
    return results;
}

}  // namespace fcm

#endif  // FCM_CONCEPT_HPP

#ifndef FCM_SYNTH_HPP
#define FCM_SYNTH_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "fcm/dataset.hpp"
#include "fcm/encoding.hpp"
#include "fcm/error.hpp"
#include "fcm/random.hpp"

namespace fcm {

/// Geometry and noise model for a synthetic corpus with planted concepts.
/// Defaults land in the sparsity regime of the reference agent encoding:
/// 6 dedicated neurons firing per frame plus ~2 spurious ones out of 256.
struct SynthSpec {
    struct PlantedConcept {
        std::string name;
        std::vector<std::uint32_t> neurons;  // sorted dedicated indices
    };

    std::uint32_t dim = 256;
    std::vector<PlantedConcept> concepts;
    std::size_t frames_per_concept = 300;
    double co_occurrence_prob = 0.0;  // chance a frame carries a second concept
    double noise_on = 2.0;            // expected spurious active neurons (Poisson)
    double dropout = 0.0;             // chance each planted neuron fails to fire
    std::uint64_t seed = 1;

    void validate() const {
        require(dim >= 1, ErrorCode::invalid_argument, "synth dim must be >= 1");
        require(!concepts.empty(), ErrorCode::invalid_argument,
                "synth spec needs at least one concept");
        require(frames_per_concept >= 1, ErrorCode::invalid_argument,
                "synth spec needs at least one frame per concept");
        require(co_occurrence_prob >= 0.0 && co_occurrence_prob <= 1.0,
                ErrorCode::invalid_argument, "co_occurrence_prob must be in [0, 1]");
        require(dropout >= 0.0 && dropout <= 1.0, ErrorCode::invalid_argument,
                "dropout must be in [0, 1]");
        require(noise_on >= 0.0, ErrorCode::invalid_argument, "noise_on must be >= 0");
        for (const auto& planted : concepts) {
            require(!planted.neurons.empty(), ErrorCode::invalid_argument,
                    "planted concept '" + planted.name + "' has no neurons");
            for (std::uint32_t n : planted.neurons)
                require(n < dim, ErrorCode::invalid_argument,
                        "planted concept '" + planted.name + "' exceeds dimensionality");
        }
    }
};

inline const std::vector<std::string>& default_concept_names() {
    static const std::vector<std::string> names = {
        "level door", "green door", "key door", "other door", "key", "blue time orb"};
    return names;
}

/// Disjoint contiguous neuron blocks: concept c owns [c*s, (c+1)*s).
inline SynthSpec default_synth_spec(std::uint32_t dim = 256, std::size_t n_concepts = 6,
                                    std::size_t neurons_per_concept = 6) {
    require(n_concepts >= 1 && neurons_per_concept >= 1, ErrorCode::invalid_argument,
            "synth spec needs at least one concept and one neuron per concept");
    require(n_concepts * neurons_per_concept <= dim, ErrorCode::invalid_argument,
            "planted concepts do not fit into the requested dimensionality");
    SynthSpec spec;
    spec.dim = dim;
    for (std::size_t c = 0; c < n_concepts; ++c) {
        SynthSpec::PlantedConcept planted;
        planted.name = c < default_concept_names().size()
                           ? default_concept_names()[c]
                           : "concept_" + std::to_string(c + 1);
        for (std::size_t i = 0; i < neurons_per_concept; ++i)
            planted.neurons.push_back(static_cast<std::uint32_t>(c * neurons_per_concept + i));
        spec.concepts.push_back(std::move(planted));
    }
    return spec;
}

/// Per-frame generation record: which concepts were planted and which of
/// their neurons actually fired (before noise).
struct GroundTruth {
    std::vector<std::vector<std::uint32_t>> planted_concepts;  // sorted concept indices
    std::vector<std::vector<std::uint32_t>> planted_neurons;   // sorted surviving indices
};

struct SynthResult {
    LabeledDataset dataset;
    GroundTruth truth;
};

/// Generates the corpus: frames are laid out concept-major, each frame fires
/// its concept's neurons (minus dropout), possibly a second concept's, plus a
/// Poisson-distributed handful of spurious neurons. Fully seed-deterministic.
inline SynthResult generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t n_concepts = spec.concepts.size();
    const std::size_t total_frames = n_concepts * spec.frames_per_concept;

    SynthResult result;
    LabeledDataset& data = result.dataset;
    for (const auto& planted : spec.concepts) data.concept_names.push_back(planted.name);
    data.frame_ids.reserve(total_frames);
    data.masks.reserve(total_frames);
    data.labels.reserve(total_frames);

    std::vector<bool> active(spec.dim);
    for (std::size_t c = 0; c < n_concepts; ++c) {
        for (std::size_t f = 0; f < spec.frames_per_concept; ++f) {
            std::vector<std::uint32_t> frame_concepts = {static_cast<std::uint32_t>(c)};
            if (n_concepts > 1 && rng.bernoulli(spec.co_occurrence_prob)) {
                std::uint32_t other =
                    static_cast<std::uint32_t>(rng.uniform_below(n_concepts - 1));
                if (other >= c) ++other;  // skip the primary concept
                frame_concepts.push_back(other);
            }
            std::sort(frame_concepts.begin(), frame_concepts.end());

            std::fill(active.begin(), active.end(), false);
            std::vector<std::uint32_t> planted_neurons;
            for (std::uint32_t concept_id : frame_concepts)
                for (std::uint32_t neuron : spec.concepts[concept_id].neurons)
                    if (!rng.bernoulli(spec.dropout) && !active[neuron]) {
                        active[neuron] = true;
                        planted_neurons.push_back(neuron);
                    }
            std::sort(planted_neurons.begin(), planted_neurons.end());

            std::vector<std::uint32_t> all_active = planted_neurons;
            const std::uint64_t noise_count = rng.poisson(spec.noise_on);
            for (std::uint64_t added = 0; added < noise_count && all_active.size() < spec.dim;) {
                const auto neuron = static_cast<std::uint32_t>(rng.uniform_below(spec.dim));
                if (!active[neuron]) {
                    active[neuron] = true;
                    all_active.push_back(neuron);
                    ++added;
                }
            }
            std::sort(all_active.begin(), all_active.end());

            char id[16];
            std::snprintf(id, sizeof(id), "f%06zu", data.frame_ids.size());
            data.frame_ids.emplace_back(id);
            data.masks.push_back(ActivityMask{std::move(all_active), spec.dim});
            data.labels.push_back(frame_concepts);
            result.truth.planted_concepts.push_back(std::move(frame_concepts));
            result.truth.planted_neurons.push_back(std::move(planted_neurons));
        }
    }
    return result;
}

/// Random-representation control: every neuron fires independently with
/// activation_prob while labels (and frame ids) are copied from a reference
/// dataset, so detection runs against codes that carry no label information.
inline LabeledDataset generate_random_masks(std::uint32_t dim, double activation_prob,
                                            std::uint64_t seed,
                                            const LabeledDataset& reference) {
    require(activation_prob > 0.0 && activation_prob < 1.0, ErrorCode::invalid_argument,
            "activation_prob must lie strictly inside (0, 1)");
    require(!reference.concept_names.empty() && reference.size() > 0,
            ErrorCode::empty_input, "random masks need a reference dataset with labels");
    Rng rng(seed);
    LabeledDataset data;
    data.frame_ids = reference.frame_ids;
    data.concept_names = reference.concept_names;
    data.labels = reference.labels;
    data.masks.reserve(reference.size());
    for (std::size_t f = 0; f < reference.size(); ++f) {
        ActivityMask mask;
        mask.dim = dim;
        for (std::uint32_t i = 0; i < dim; ++i)
            if (rng.bernoulli(activation_prob)) mask.active.push_back(i);
        data.masks.push_back(std::move(mask));
    }
    return data;
}

/// 0/1 indicator matrix of a dataset's masks. Re-binarizing it with any fixed
/// threshold in (0, 1), or adaptively, reproduces the masks.
inline EncodingMatrix indicator_matrix(const LabeledDataset& data) {
    require(data.size() > 0, ErrorCode::empty_input, "indicator matrix of an empty dataset");
    EncodingMatrix matrix;
    matrix.dim = data.dim();
    matrix.frame_ids = data.frame_ids;
    matrix.values.assign(data.size() * matrix.dim, 0.0f);
    for (std::size_t f = 0; f < data.size(); ++f)
        for (std::uint32_t i : data.masks[f].active) matrix.values[f * matrix.dim + i] = 1.0f;
    return matrix;
}

}  // namespace fcm

#endif  // FCM_SYNTH_HPP

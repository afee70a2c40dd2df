#ifndef FCM_DATASET_HPP
#define FCM_DATASET_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fcm/encoding.hpp"
#include "fcm/error.hpp"

namespace fcm {

/// Activity masks plus per-frame concept labels. Labels are stored as sorted
/// indices into the concept vocabulary; a frame may carry several concepts.
struct LabeledDataset {
    std::vector<std::string> frame_ids;
    std::vector<ActivityMask> masks;
    std::vector<std::string> concept_names;
    std::vector<std::vector<std::uint32_t>> labels;  // sorted concept indices per frame

    std::size_t size() const { return masks.size(); }
    std::uint32_t dim() const { return masks.empty() ? 0 : masks.front().dim; }

    std::optional<std::uint32_t> concept_index(const std::string& name) const {
        auto it = std::find(concept_names.begin(), concept_names.end(), name);
        if (it == concept_names.end()) return std::nullopt;
        return static_cast<std::uint32_t>(it - concept_names.begin());
    }

    std::uint32_t require_concept(const std::string& name) const {
        auto idx = concept_index(name);
        require(idx.has_value(), ErrorCode::unknown_concept,
                "unknown concept: '" + name + "'");
        return *idx;
    }

    bool has_label(std::size_t frame, std::uint32_t concept_id) const {
        const auto& set = labels[frame];
        return std::binary_search(set.begin(), set.end(), concept_id);
    }

    std::vector<std::size_t> frames_with(std::uint32_t concept_id) const {
        std::vector<std::size_t> out;
        for (std::size_t f = 0; f < size(); ++f)
            if (has_label(f, concept_id)) out.push_back(f);
        return out;
    }

    std::vector<std::size_t> frames_without(std::uint32_t concept_id) const {
        std::vector<std::size_t> out;
        for (std::size_t f = 0; f < size(); ++f)
            if (!has_label(f, concept_id)) out.push_back(f);
        return out;
    }

    void validate() const {
        require(frame_ids.size() == masks.size() && labels.size() == masks.size(),
                ErrorCode::length_mismatch, "dataset frame columns are misaligned");
        const std::uint32_t d = dim();
        for (const auto& mask : masks) {
            require(mask.dim == d, ErrorCode::dimension_mismatch,
                    "dataset masks with mixed dimensionality");
            mask.validate();
        }
        for (const auto& set : labels)
            for (std::uint32_t c : set)
                require(c < concept_names.size(), ErrorCode::unknown_concept,
                        "frame label outside concept vocabulary");
    }
};

}  // namespace fcm

#endif  // FCM_DATASET_HPP

#ifndef FCM_ENCODING_HPP
#define FCM_ENCODING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fcm/error.hpp"

namespace fcm {

/// Dense frames x neurons activation matrix (row-major). Rows correspond to
/// frame_ids one-to-one.
struct EncodingMatrix {
    std::vector<std::string> frame_ids;
    std::vector<float> values;  // frames() * dim, row-major
    std::uint32_t dim = 0;

    std::size_t frames() const { return frame_ids.size(); }

    std::span<const float> row(std::size_t f) const {
        return {values.data() + f * dim, dim};
    }

    void validate() const {
        require(dim >= 1, ErrorCode::empty_input, "encoding matrix has no neurons");
        require(!frame_ids.empty(), ErrorCode::empty_input, "encoding matrix has no frames");
        require(values.size() == frames() * dim, ErrorCode::length_mismatch,
                "encoding matrix value count does not match frames x dim");
        for (float v : values)
            require(std::isfinite(v), ErrorCode::malformed_row,
                    "encoding matrix contains non-finite activation");
        std::set<std::string> seen;
        for (const auto& id : frame_ids)
            require(seen.insert(id).second, ErrorCode::duplicate_frame_id,
                    "duplicate frame id: " + id);
    }
};

/// Per-neuron mean absolute activation over a calibration corpus.
struct ActivationStats {
    std::vector<double> mean_abs;
    std::size_t calibration_frames = 0;

    std::uint32_t dim() const { return static_cast<std::uint32_t>(mean_abs.size()); }
};

/// Binary activity pattern of one frame: sorted unique neuron indices.
struct ActivityMask {
    std::vector<std::uint32_t> active;  // sorted ascending, no duplicates
    std::uint32_t dim = 0;

    bool contains(std::uint32_t neuron) const {
        return std::binary_search(active.begin(), active.end(), neuron);
    }

    std::size_t count() const { return active.size(); }

    bool operator==(const ActivityMask&) const = default;

    void validate() const {
        std::uint32_t prev = 0;
        bool first = true;
        for (std::uint32_t i : active) {
            require(i < dim, ErrorCode::dimension_mismatch,
                    "mask index out of range");
            require(first || i > prev, ErrorCode::invalid_argument,
                    "mask indices must be strictly ascending");
            prev = i;
            first = false;
        }
    }
};

/// Builds a mask from possibly unsorted indices, validating range and
/// uniqueness.
inline ActivityMask make_mask(std::uint32_t dim, std::vector<std::uint32_t> indices) {
    std::sort(indices.begin(), indices.end());
    ActivityMask mask{std::move(indices), dim};
    mask.validate();
    return mask;
}

/// Corpus-level sparsity statistics over a set of masks.
struct SparsityReport {
    std::size_t frames = 0;
    std::uint32_t dim = 0;
    double mean_active = 0.0;
    std::size_t min_active = 0;
    std::size_t max_active = 0;
    double var_active = 0.0;  // population variance of active counts
    double pct_active = 0.0;  // mean_active / dim
    double ever_active_fraction = 0.0;
    double max_neuron_frequency = 0.0;
};

/// Per-neuron mean of |activation| over all frames of the matrix.
inline ActivationStats compute_activation_stats(const EncodingMatrix& matrix) {
    require(matrix.frames() > 0 && matrix.dim > 0, ErrorCode::empty_input,
            "empty calibration corpus");
    ActivationStats stats;
    stats.mean_abs.assign(matrix.dim, 0.0);
    for (std::size_t f = 0; f < matrix.frames(); ++f) {
        auto row = matrix.row(f);
        for (std::uint32_t i = 0; i < matrix.dim; ++i)
            stats.mean_abs[i] += std::abs(static_cast<double>(row[i]));
    }
    for (double& m : stats.mean_abs) m /= static_cast<double>(matrix.frames());
    stats.calibration_frames = matrix.frames();
    return stats;
}

/// Neuron i is active iff |row[i]| strictly exceeds its calibration mean.
inline ActivityMask binarize_adaptive(std::span<const float> row, const ActivationStats& stats) {
    require(row.size() == stats.mean_abs.size(), ErrorCode::length_mismatch,
            "row length does not match activation stats");
    ActivityMask mask;
    mask.dim = stats.dim();
    for (std::uint32_t i = 0; i < mask.dim; ++i)
        if (std::abs(static_cast<double>(row[i])) > stats.mean_abs[i])
            mask.active.push_back(i);
    return mask;
}

/// Neuron i is active iff |row[i]| strictly exceeds the fixed threshold t.
inline ActivityMask binarize_fixed(std::span<const float> row, double t) {
    require(t >= 0.0, ErrorCode::invalid_argument, "fixed threshold must be >= 0");
    ActivityMask mask;
    mask.dim = static_cast<std::uint32_t>(row.size());
    for (std::uint32_t i = 0; i < mask.dim; ++i)
        if (std::abs(static_cast<double>(row[i])) > t) mask.active.push_back(i);
    return mask;
}

/// How rows of a matrix are turned into activity masks.
struct BinarizeMode {
    enum class Kind { adaptive, fixed };
    Kind kind = Kind::adaptive;
    double threshold = 0.0;  // used when kind == fixed
};

inline std::vector<ActivityMask> binarize_matrix(const EncodingMatrix& matrix,
                                                 const BinarizeMode& mode) {
    std::vector<ActivityMask> masks;
    masks.reserve(matrix.frames());
    if (mode.kind == BinarizeMode::Kind::adaptive) {
        const ActivationStats stats = compute_activation_stats(matrix);
        for (std::size_t f = 0; f < matrix.frames(); ++f)
            masks.push_back(binarize_adaptive(matrix.row(f), stats));
    } else {
        for (std::size_t f = 0; f < matrix.frames(); ++f)
            masks.push_back(binarize_fixed(matrix.row(f), mode.threshold));
    }
    return masks;
}

inline SparsityReport sparsity_report(std::span<const ActivityMask> masks) {
    require(!masks.empty(), ErrorCode::empty_input, "sparsity report over empty mask list");
    const std::uint32_t dim = masks.front().dim;
    SparsityReport report;
    report.frames = masks.size();
    report.dim = dim;
    report.min_active = masks.front().count();
    std::vector<std::size_t> neuron_hits(dim, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& mask : masks) {
        require(mask.dim == dim, ErrorCode::dimension_mismatch,
                "masks with mixed dimensionality");
        const std::size_t n = mask.count();
        sum += static_cast<double>(n);
        sum_sq += static_cast<double>(n) * static_cast<double>(n);
        report.min_active = std::min(report.min_active, n);
        report.max_active = std::max(report.max_active, n);
        for (std::uint32_t i : mask.active) ++neuron_hits[i];
    }
    const double f = static_cast<double>(masks.size());
    report.mean_active = sum / f;
    report.var_active = sum_sq / f - report.mean_active * report.mean_active;
    report.pct_active = report.mean_active / static_cast<double>(dim);
    std::size_t ever = 0, peak = 0;
    for (std::size_t hits : neuron_hits) {
        if (hits > 0) ++ever;
        peak = std::max(peak, hits);
    }
    report.ever_active_fraction = static_cast<double>(ever) / static_cast<double>(dim);
    report.max_neuron_frequency = static_cast<double>(peak) / f;
    return report;
}

}  // namespace fcm

#endif  // FCM_ENCODING_HPP

#ifndef FCM_BASELINE_HPP
#define FCM_BASELINE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fcm/dataset.hpp"
#include "fcm/encoding.hpp"
#include "fcm/error.hpp"
#include "fcm/evaluation.hpp"
#include "fcm/random.hpp"

namespace fcm {

/// Hinge-loss linear separator over binarized masks. Stands in for the SVM
/// comparison: at few examples in a high-dimensional 0/1 space any consistent
/// linear separator serves.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::uint32_t dim = 0;
    bool trained = false;
    double train_accuracy = 0.0;
    bool degenerate = false;  // failed to separate the training set
    std::size_t pos_examples = 0;
    std::size_t neg_examples = 0;
    double regularization = 0.0;
    std::size_t epochs = 0;
    std::uint64_t seed = 0;
};

struct BaselineConfig {
    double regularization = 1e-4;
    std::size_t epochs = 500;
    double learning_rate = 0.5;
};

inline double linear_score(const LinearModel& model, const ActivityMask& mask) {
    double score = model.bias;
    for (std::uint32_t i : mask.active) score += model.weights[i];
    return score;
}

/// Deterministic full-batch subgradient descent on the regularized hinge
/// loss. Masks enter as 0/1 vectors, so the baseline sees exactly the
/// information FCM sees.
inline LinearModel train_linear(std::span<const ActivityMask> pos,
                                std::span<const ActivityMask> neg, double regularization,
                                std::size_t epochs, std::uint64_t seed,
                                double learning_rate = 0.5) {
    require(!pos.empty(), ErrorCode::empty_input, "baseline needs at least one positive example");
    require(!neg.empty(), ErrorCode::empty_input, "baseline needs at least one negative example");
    require(regularization >= 0.0, ErrorCode::invalid_argument, "regularization must be >= 0");
    require(epochs >= 1, ErrorCode::invalid_argument, "epochs must be >= 1");
    const std::uint32_t dim = pos.front().dim;
    for (const auto& m : pos)
        require(m.dim == dim, ErrorCode::dimension_mismatch, "mixed example dimensionality");
    for (const auto& m : neg)
        require(m.dim == dim, ErrorCode::dimension_mismatch, "mixed example dimensionality");

    LinearModel model;
    model.dim = dim;
    model.pos_examples = pos.size();
    model.neg_examples = neg.size();
    model.regularization = regularization;
    model.epochs = epochs;
    model.seed = seed;

    // Tiny symmetric-breaking init keeps training a pure function of the seed.
    Rng rng(seed);
    model.weights.resize(dim);
    for (double& w : model.weights) w = (rng.uniform_double() - 0.5) * 2e-6;

    const double n = static_cast<double>(pos.size() + neg.size());
    std::vector<double> grad(dim);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        const double lr = learning_rate / std::sqrt(static_cast<double>(epoch + 1));
        for (std::uint32_t i = 0; i < dim; ++i) grad[i] = regularization * model.weights[i];
        double grad_bias = 0.0;
        auto accumulate = [&](const ActivityMask& mask, double label) {
            double score = model.bias;
            for (std::uint32_t i : mask.active) score += model.weights[i];
            if (label * score < 1.0) {
                for (std::uint32_t i : mask.active) grad[i] -= label / n;
                grad_bias -= label / n;
            }
        };
        for (const auto& mask : pos) accumulate(mask, 1.0);
        for (const auto& mask : neg) accumulate(mask, -1.0);
        for (std::uint32_t i = 0; i < dim; ++i) model.weights[i] -= lr * grad[i];
        model.bias -= lr * grad_bias;
    }
    model.trained = true;

    std::size_t correct = 0;
    for (const auto& mask : pos)
        if (linear_score(model, mask) > 0.0) ++correct;
    for (const auto& mask : neg)
        if (!(linear_score(model, mask) > 0.0)) ++correct;
    model.train_accuracy = static_cast<double>(correct) / n;
    model.degenerate = model.train_accuracy <= 0.5;
    return model;
}

/// Sign of w.x + b; an exact zero classifies negative.
inline bool predict(const LinearModel& model, const ActivityMask& mask) {
    require(model.trained, ErrorCode::untrained_model, "predict on an untrained model");
    require(mask.dim == model.dim, ErrorCode::dimension_mismatch,
            "mask dimensionality does not match model");
    return linear_score(model, mask) > 0.0;
}

/// Baseline counterpart of evaluate_concept: trains on the split's positive
/// and negative example frames, classifies its test frames.
inline Metrics evaluate_baseline(const LabeledDataset& data, const BalancedSplit& split,
                                 const BaselineConfig& config, std::uint64_t seed) {
    require(!split.neg_example_frames.empty(), ErrorCode::invalid_argument,
            "baseline split carries no negative examples");
    std::vector<ActivityMask> pos, neg;
    for (std::size_t f : split.example_frames) pos.push_back(data.masks[f]);
    for (std::size_t f : split.neg_example_frames) neg.push_back(data.masks[f]);
    const LinearModel model = train_linear(pos, neg, config.regularization, config.epochs, seed,
                                           config.learning_rate);
    Metrics m;
    for (std::size_t f : split.pos_test) predict(model, data.masks[f]) ? ++m.tp : ++m.fn;
    for (std::size_t f : split.neg_test) predict(model, data.masks[f]) ? ++m.fp : ++m.tn;
    return m;
}

/// Bootstrap for the linear baseline. Consumes k negative examples per trial
/// on top of FCM's k positives; the report's example accounting records that.
inline EvalReport bootstrap_eval_baseline(const LabeledDataset& data,
                                          const std::string& concept_name,
                                          const BaselineConfig& config,
                                          const EvalParams& params) {
    require(params.trials >= 2, ErrorCode::invalid_argument,
            "bootstrap requires at least two trials");
    EvalReport report;
    report.concept_name = concept_name;
    report.method = "linear";
    report.trials = params.trials;
    report.master_seed = params.seed;
    report.k_pos_examples = params.k;
    report.k_neg_examples = params.k;
    report.n_pos = params.n_pos;
    report.n_neg = params.n_neg;
    report.trial_seeds.resize(params.trials);
    report.trial_metrics.resize(params.trials);
    detail::run_trials(params.trials, params.workers, [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(params.seed, t);
        report.trial_seeds[t] = trial_seed;
        try {
            const BalancedSplit split =
                build_balanced_split(data, concept_name, params.k, params.n_pos, params.n_neg,
                                     trial_seed, params.k);
            report.trial_metrics[t] = evaluate_baseline(data, split, config, trial_seed);
        } catch (const Error& e) {
            raise(e.code(), "trial " + std::to_string(t) + ": " + e.what());
        }
    });
    report.summarize();
    return report;
}

}  // namespace fcm

#endif  // FCM_BASELINE_HPP

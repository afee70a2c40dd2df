#ifndef FCM_EVALUATION_HPP
#define FCM_EVALUATION_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fcm/concept.hpp"
#include "fcm/dataset.hpp"
#include "fcm/error.hpp"
#include "fcm/random.hpp"

namespace fcm {

/// One evaluation trial's frame assignment. Example, positive-test, and
/// negative-test sets are pairwise disjoint; negatives are frames not
/// labeled with the target concept.
struct BalancedSplit {
    std::string concept_name;
    std::vector<std::size_t> example_frames;      // positives used for extraction
    std::vector<std::size_t> neg_example_frames;  // used only by the linear baseline
    std::vector<std::size_t> pos_test;
    std::vector<std::size_t> neg_test;
    std::uint64_t seed = 0;
};

struct Metrics {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    double accuracy() const {
        const double total = static_cast<double>(tp + tn + fp + fn);
        return total == 0.0 ? 0.0 : static_cast<double>(tp + tn) / total;
    }
    double precision() const {
        return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    double recall() const {
        return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    double f1() const {
        const double p = precision(), r = recall();
        return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }

    bool operator==(const Metrics&) const = default;
};

/// Aggregate of one metric over trials: mean, percentile-bootstrap 95% CI
/// (2.5/97.5), and the quartiles behind box plots.
struct MetricSummary {
    double mean = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

/// Linear-interpolation percentile of a sample, p in [0, 1].
inline double percentile(std::vector<double> values, double p) {
    require(!values.empty(), ErrorCode::empty_input, "percentile of empty sample");
    std::sort(values.begin(), values.end());
    const double rank = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline MetricSummary summarize_metric(const std::vector<double>& values) {
    MetricSummary s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.ci_lo = percentile(values, 0.025);
    s.ci_hi = percentile(values, 0.975);
    s.median = percentile(values, 0.50);
    s.q1 = percentile(values, 0.25);
    s.q3 = percentile(values, 0.75);
    return s;
}

/// Full bootstrap result: per-trial metrics plus summaries and a config echo.
struct EvalReport {
    std::string concept_name;
    std::string method = "fcm";  // "fcm" or "linear"
    FcmConfig config;
    std::size_t trials = 0;
    std::uint64_t master_seed = 0;
    std::size_t k_pos_examples = 0;
    std::size_t k_neg_examples = 0;  // 0 for FCM: no negative examples consumed
    std::size_t n_pos = 0, n_neg = 0;
    std::vector<std::uint64_t> trial_seeds;
    std::vector<Metrics> trial_metrics;
    MetricSummary accuracy, precision, recall, f1;

    void summarize() {
        auto collect = [this](double (Metrics::*fn)() const) {
            std::vector<double> values;
            values.reserve(trial_metrics.size());
            for (const auto& m : trial_metrics) values.push_back((m.*fn)());
            return summarize_metric(values);
        };
        accuracy = collect(&Metrics::accuracy);
        precision = collect(&Metrics::precision);
        recall = collect(&Metrics::recall);
        f1 = collect(&Metrics::f1);
    }
};

/// Shared bootstrap parameters; defaults are the reference protocol
/// (5 examples, 250/250 balanced test, 100 trials).
struct EvalParams {
    std::size_t k = 5;
    std::size_t n_pos = 250;
    std::size_t n_neg = 250;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
};

/// Seeded uniform draw of disjoint example and test sets. k_neg is nonzero
/// only for baselines that need negative examples.
inline BalancedSplit build_balanced_split(const LabeledDataset& data,
                                          const std::string& concept_name, std::size_t k,
                                          std::size_t n_pos, std::size_t n_neg,
                                          std::uint64_t seed, std::size_t k_neg = 0) {
    const std::uint32_t concept_id = data.require_concept(concept_name);
    const std::vector<std::size_t> pos_pool = data.frames_with(concept_id);
    const std::vector<std::size_t> neg_pool = data.frames_without(concept_id);
    if (pos_pool.size() < k + n_pos)
        raise(ErrorCode::insufficient_frames,
              "insufficient positive frames for concept '" + concept_name + "': have " +
                  std::to_string(pos_pool.size()) + ", need " + std::to_string(k + n_pos));
    if (neg_pool.size() < k_neg + n_neg)
        raise(ErrorCode::insufficient_frames,
              "insufficient negative frames for concept '" + concept_name + "': have " +
                  std::to_string(neg_pool.size()) + ", need " + std::to_string(k_neg + n_neg));

    Rng rng(seed);
    BalancedSplit split;
    split.concept_name = concept_name;
    split.seed = seed;
    const auto pos_picks = rng.sample_without_replacement(pos_pool.size(), k + n_pos);
    for (std::size_t i = 0; i < k; ++i) split.example_frames.push_back(pos_pool[pos_picks[i]]);
    for (std::size_t i = k; i < pos_picks.size(); ++i)
        split.pos_test.push_back(pos_pool[pos_picks[i]]);
    const auto neg_picks = rng.sample_without_replacement(neg_pool.size(), k_neg + n_neg);
    for (std::size_t i = 0; i < k_neg; ++i)
        split.neg_example_frames.push_back(neg_pool[neg_picks[i]]);
    for (std::size_t i = k_neg; i < neg_picks.size(); ++i)
        split.neg_test.push_back(neg_pool[neg_picks[i]]);
    return split;
}

/// Evidence score of one test frame together with its ground-truth side of
/// the split. Scores are threshold-independent; metrics re-derive from them.
struct ScoredFrame {
    bool is_positive = false;
    double evidence = 0.0;
};

/// Extracts a definition from the split's example frames and scores every
/// test frame. Extraction failures are rethrown with split context.
inline std::vector<ScoredFrame> score_split(const LabeledDataset& data,
                                            const BalancedSplit& split,
                                            const FcmConfig& config) {
    std::vector<ActivityMask> examples;
    examples.reserve(split.example_frames.size());
    for (std::size_t f : split.example_frames) examples.push_back(data.masks[f]);
    ConceptDefinition definition;
    try {
        definition = extract_concept(split.concept_name, examples, config);
    } catch (const Error& e) {
        raise(e.code(), std::string(e.what()) + " (split seed " + std::to_string(split.seed) +
                            ", k=" + std::to_string(split.example_frames.size()) + ")");
    }
    std::vector<ScoredFrame> scores;
    scores.reserve(split.pos_test.size() + split.neg_test.size());
    for (std::size_t f : split.pos_test)
        scores.push_back({true, evidence(definition, data.masks[f])});
    for (std::size_t f : split.neg_test)
        scores.push_back({false, evidence(definition, data.masks[f])});
    return scores;
}

/// Confusion counts at a given threshold (strict >).
inline Metrics metrics_from_scores(std::span<const ScoredFrame> scores, double threshold) {
    Metrics m;
    for (const auto& s : scores) {
        const bool detected = s.evidence > threshold;
        if (s.is_positive)
            detected ? ++m.tp : ++m.fn;
        else
            detected ? ++m.fp : ++m.tn;
    }
    return m;
}

/// Extract from the split's examples, detect on its test frames.
inline Metrics evaluate_concept(const LabeledDataset& data, const BalancedSplit& split,
                                const FcmConfig& config) {
    return metrics_from_scores(score_split(data, split, config), config.detection_threshold);
}

namespace detail {

/// Runs fn(trial) for trial in [0, trials), optionally across threads.
/// Results land in a vector indexed by trial, so parallel execution cannot
/// change any output. The first failing trial's error wins.
template <typename Fn>
void run_trials(std::size_t trials, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, workers);
    if (workers == 1 || trials <= 1) {
        for (std::size_t t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(trials);
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min(workers, trials);
    for (std::size_t w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
                try {
                    fn(t);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            }
        });
    for (auto& thread : pool) thread.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// Bootstrap over independent example sets: per-trial seeds derive from the
/// master seed by trial index, so the report is reproducible regardless of
/// worker count or execution order.
inline EvalReport bootstrap_eval(const LabeledDataset& data, const std::string& concept_name,
                                 const FcmConfig& config, const EvalParams& params) {
    require(params.trials >= 2, ErrorCode::invalid_argument,
            "bootstrap requires at least two trials");
    config.validate();
    EvalReport report;
    report.concept_name = concept_name;
    report.method = "fcm";
    report.config = config;
    report.trials = params.trials;
    report.master_seed = params.seed;
    report.k_pos_examples = params.k;
    report.k_neg_examples = 0;
    report.n_pos = params.n_pos;
    report.n_neg = params.n_neg;
    report.trial_seeds.resize(params.trials);
    report.trial_metrics.resize(params.trials);
    detail::run_trials(params.trials, params.workers, [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(params.seed, t);
        report.trial_seeds[t] = trial_seed;
        try {
            const BalancedSplit split = build_balanced_split(
                data, concept_name, params.k, params.n_pos, params.n_neg, trial_seed);
            report.trial_metrics[t] = evaluate_concept(data, split, config);
        } catch (const Error& e) {
            raise(e.code(), "trial " + std::to_string(t) + ": " + e.what());
        }
    });
    report.summarize();
    return report;
}

/// One sweep column: the varied parameter value and its bootstrap report.
struct SweepRow {
    double value = 0.0;
    EvalReport report;
};

struct SweepTable {
    std::string parameter;  // "complexity" | "threshold" | "examples"
    std::vector<SweepRow> rows;
};

/// Pattern-complexity sweep. Trial seeds depend only on (master seed, trial),
/// so every N sees identical splits and N is the only varying factor.
inline SweepTable sweep_complexity(const LabeledDataset& data, const std::string& concept_name,
                                   std::span<const std::size_t> n_values,
                                   const FcmConfig& config, const EvalParams& params) {
    require(!n_values.empty(), ErrorCode::invalid_argument, "empty complexity grid");
    SweepTable table;
    table.parameter = "complexity";
    for (std::size_t n : n_values) {
        FcmConfig swept = config;
        swept.pattern_complexity = n;
        table.rows.push_back(
            {static_cast<double>(n), bootstrap_eval(data, concept_name, swept, params)});
    }
    return table;
}

/// Threshold sweep. Evidence scores are computed once per trial and
/// re-thresholded for each theta; per-trial recall is therefore exactly
/// non-increasing along an increasing grid.
inline SweepTable sweep_threshold(const LabeledDataset& data, const std::string& concept_name,
                                  std::span<const double> theta_values, const FcmConfig& config,
                                  const EvalParams& params) {
    require(!theta_values.empty(), ErrorCode::invalid_argument, "empty threshold grid");
    require(params.trials >= 2, ErrorCode::invalid_argument,
            "bootstrap requires at least two trials");
    for (double theta : theta_values)
        require(theta >= 0.0 && theta <= 1.0, ErrorCode::invalid_argument,
                "detection threshold must be in [0, 1]");
    config.validate();

    std::vector<std::uint64_t> trial_seeds(params.trials);
    std::vector<std::vector<ScoredFrame>> trial_scores(params.trials);
    detail::run_trials(params.trials, params.workers, [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(params.seed, t);
        trial_seeds[t] = trial_seed;
        try {
            const BalancedSplit split = build_balanced_split(
                data, concept_name, params.k, params.n_pos, params.n_neg, trial_seed);
            trial_scores[t] = score_split(data, split, config);
        } catch (const Error& e) {
            raise(e.code(), "trial " + std::to_string(t) + ": " + e.what());
        }
    });

    SweepTable table;
    table.parameter = "threshold";
    for (double theta : theta_values) {
        EvalReport report;
        report.concept_name = concept_name;
        report.method = "fcm";
        report.config = config;
        report.config.detection_threshold = theta;
        report.trials = params.trials;
        report.master_seed = params.seed;
        report.k_pos_examples = params.k;
        report.n_pos = params.n_pos;
        report.n_neg = params.n_neg;
        report.trial_seeds = trial_seeds;
        report.trial_metrics.reserve(params.trials);
        for (const auto& scores : trial_scores)
            report.trial_metrics.push_back(metrics_from_scores(scores, theta));
        report.summarize();
        table.rows.push_back({theta, std::move(report)});
    }
    return table;
}

/// Example-count sweep; reports carry mean/CI plus median and quartiles.
inline SweepTable sweep_num_examples(const LabeledDataset& data,
                                     const std::string& concept_name,
                                     std::span<const std::size_t> k_values,
                                     const FcmConfig& config, const EvalParams& params) {
    require(!k_values.empty(), ErrorCode::invalid_argument, "empty example-count grid");
    SweepTable table;
    table.parameter = "examples";
    for (std::size_t k : k_values) {
        EvalParams swept = params;
        swept.k = k;
        table.rows.push_back(
            {static_cast<double>(k), bootstrap_eval(data, concept_name, config, swept)});
    }
    return table;
}

}  // namespace fcm

#endif  // FCM_EVALUATION_HPP

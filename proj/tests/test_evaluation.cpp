#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "fcm/evaluation.hpp"
#include "fcm/synth.hpp"
#include "oracles.hpp"

using namespace fcm;

namespace {

LabeledDataset planted_dataset(double noise_on, double dropout, std::uint64_t seed,
                               std::size_t frames_per_concept = 300) {
    auto spec = default_synth_spec();
    spec.frames_per_concept = frames_per_concept;
    spec.noise_on = noise_on;
    spec.dropout = dropout;
    spec.seed = seed;
    return generate_synthetic(spec).dataset;
}

}  // namespace

TEST_CASE("percentile: linear interpolation over the sorted sample") {
    const std::vector<double> four = {4.0, 1.0, 3.0, 2.0};  // sorting is internal
    REQUIRE(percentile(four, 0.0) == 1.0);
    REQUIRE(percentile(four, 1.0) == 4.0);
    REQUIRE(percentile(four, 0.5) == 2.5);
    REQUIRE(percentile(four, 0.25) == 1.75);

    std::vector<double> centuple;
    for (int i = 1; i <= 100; ++i) centuple.push_back(static_cast<double>(i));
    // rank = 0.025 * 99 = 2.475 -> between the 3rd and 4th order statistic
    REQUIRE(percentile(centuple, 0.025) == Catch::Approx(3.475));
    REQUIRE(percentile(centuple, 0.975) == Catch::Approx(97.525));

    REQUIRE(percentile({7.5}, 0.3) == 7.5);
    REQUIRE_THROWS_AS(percentile({}, 0.5), Error);
}

TEST_CASE("constant samples collapse every summary statistic") {
    const auto s = summarize_metric(std::vector<double>(100, 0.83));
    // Order statistics of a constant vector are the constant, bit for bit; the
    // mean accumulates 100 rounded terms so gets a hair of slack.
    REQUIRE(s.mean == Catch::Approx(0.83).margin(1e-12));
    REQUIRE(s.ci_lo == 0.83);
    REQUIRE(s.ci_hi == 0.83);
    REQUIRE(s.median == 0.83);
    REQUIRE(s.q1 == 0.83);
    REQUIRE(s.q3 == 0.83);
}

TEST_CASE("confusion-count metrics") {
    Metrics m{40, 10, 45, 5};
    REQUIRE(m.accuracy() == 0.85);
    REQUIRE(m.precision() == 0.8);
    REQUIRE(m.recall() == Catch::Approx(40.0 / 45.0));
    const double p = 0.8, r = 40.0 / 45.0;
    REQUIRE(m.f1() == Catch::Approx(2.0 * p * r / (p + r)));

    // Degenerate corners are defined as zero, not NaN.
    REQUIRE(Metrics{0, 0, 50, 50}.precision() == 0.0);
    REQUIRE(Metrics{0, 0, 50, 50}.recall() == 0.0);
    REQUIRE(Metrics{0, 0, 50, 50}.f1() == 0.0);
    REQUIRE(Metrics{}.accuracy() == 0.0);
}

TEST_CASE("scores exactly at the threshold count as absent") {
    const std::vector<ScoredFrame> scores = {
        {true, 0.3}, {true, 0.2}, {false, 0.21}, {false, 0.2}, {false, 0.0}};
    const auto m = metrics_from_scores(scores, 0.2);
    REQUIRE(m.tp == 1);  // 0.3 only; 0.2 is not above the threshold
    REQUIRE(m.fn == 1);
    REQUIRE(m.fp == 1);  // 0.21
    REQUIRE(m.tn == 2);

    // A detector stuck on one answer scores 0.5 on a balanced test set.
    std::vector<ScoredFrame> balanced;
    for (int i = 0; i < 50; ++i) balanced.push_back({i % 2 == 0, 0.9});
    REQUIRE(metrics_from_scores(balanced, 0.2).accuracy() == 0.5);
    REQUIRE(metrics_from_scores(balanced, 1.0).accuracy() == 0.5);
}

TEST_CASE("balanced splits: sizes, disjointness, label purity, determinism") {
    auto spec = default_synth_spec();
    spec.frames_per_concept = 300;
    spec.co_occurrence_prob = 0.3;  // exercise multi-label frames
    spec.seed = 11;
    const auto data = generate_synthetic(spec).dataset;

    const auto split = build_balanced_split(data, "key", 5, 250, 250, 42, 3);
    REQUIRE(split.example_frames.size() == 5);
    REQUIRE(split.neg_example_frames.size() == 3);
    REQUIRE(split.pos_test.size() == 250);
    REQUIRE(split.neg_test.size() == 250);

    const std::uint32_t key_id = data.require_concept("key");
    std::set<std::size_t> all;
    for (const auto* group :
         {&split.example_frames, &split.neg_example_frames, &split.pos_test, &split.neg_test})
        all.insert(group->begin(), group->end());
    REQUIRE(all.size() == 508);  // pairwise disjoint
    for (std::size_t f : split.example_frames) REQUIRE(data.has_label(f, key_id));
    for (std::size_t f : split.pos_test) REQUIRE(data.has_label(f, key_id));
    // Frames co-labeled with the target never land on the negative side.
    for (std::size_t f : split.neg_example_frames) REQUIRE_FALSE(data.has_label(f, key_id));
    for (std::size_t f : split.neg_test) REQUIRE_FALSE(data.has_label(f, key_id));

    const auto again = build_balanced_split(data, "key", 5, 250, 250, 42, 3);
    REQUIRE(again.example_frames == split.example_frames);
    REQUIRE(again.pos_test == split.pos_test);
    REQUIRE(again.neg_test == split.neg_test);

    const auto other = build_balanced_split(data, "key", 5, 250, 250, 43, 3);
    REQUIRE(other.example_frames != split.example_frames);

    REQUIRE_THROWS_AS(build_balanced_split(data, "no such concept", 5, 250, 250, 1), Error);
}

TEST_CASE("splits fail loudly when a class runs short") {
    auto spec = default_synth_spec(64, 2, 4);
    spec.frames_per_concept = 254;
    const auto data = generate_synthetic(spec).dataset;

    // 254 positives cannot cover 5 examples + 250 tests.
    REQUIRE_THROWS_MATCHES(
        build_balanced_split(data, spec.concepts[0].name, 5, 250, 250, 1), Error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("insufficient positive frames") &&
            Catch::Matchers::ContainsSubstring("have 254, need 255")));
    REQUIRE_THROWS_MATCHES(
        build_balanced_split(data, spec.concepts[0].name, 2, 250, 255, 1), Error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("insufficient negative frames")));
}

TEST_CASE("one clean example suffices on the planted corpus") {
    const auto data = planted_dataset(2.0, 0.0, 21);
    FcmConfig config;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        const auto split = build_balanced_split(data, "level door", 1, 250, 250, seed);
        const auto m = evaluate_concept(data, split, config);
        REQUIRE(m.accuracy() == 1.0);
        REQUIRE(m.tp == 250);
        REQUIRE(m.tn == 250);
    }
}

TEST_CASE("bootstrap: derived seeds, confusion identities, zero-width CI on clean data") {
    const auto data = planted_dataset(0.0, 0.0, 31);
    FcmConfig config;
    EvalParams params;
    params.trials = 30;
    params.n_pos = 50;
    params.n_neg = 50;
    params.seed = 1234;

    const auto report = bootstrap_eval(data, "green door", config, params);
    REQUIRE(report.trials == 30);
    REQUIRE(report.trial_metrics.size() == 30);
    std::set<std::uint64_t> distinct;
    for (std::size_t t = 0; t < report.trials; ++t) {
        REQUIRE(report.trial_seeds[t] == derive_seed(1234, t));
        distinct.insert(report.trial_seeds[t]);
        const auto& m = report.trial_metrics[t];
        REQUIRE(m.tp + m.fn == 50);
        REQUIRE(m.fp + m.tn == 50);
        REQUIRE(m.accuracy() == 1.0);  // noiseless corpus leaves nothing to miss
    }
    REQUIRE(distinct.size() == 30);
    REQUIRE(report.accuracy.mean == 1.0);
    REQUIRE(report.accuracy.ci_lo == 1.0);
    REQUIRE(report.accuracy.ci_hi == 1.0);
    REQUIRE(report.k_neg_examples == 0);

    REQUIRE_THROWS_AS(bootstrap_eval(data, "green door",
                                     config, EvalParams{5, 50, 50, 1, 1, 1}),
                      Error);
}

TEST_CASE("bootstrap results do not depend on the worker count") {
    const auto data = planted_dataset(3.0, 0.2, 77);
    FcmConfig config;
    EvalParams serial;
    serial.trials = 24;
    serial.n_pos = 60;
    serial.n_neg = 60;
    serial.seed = 9;
    EvalParams parallel = serial;
    parallel.workers = 4;

    const auto a = bootstrap_eval(data, "key door", config, serial);
    const auto b = bootstrap_eval(data, "key door", config, parallel);
    REQUIRE(a.trial_seeds == b.trial_seeds);
    REQUIRE(a.trial_metrics == b.trial_metrics);
    REQUIRE(a.accuracy.mean == b.accuracy.mean);
    REQUIRE(a.f1.ci_lo == b.f1.ci_lo);
}

TEST_CASE("bootstrap failures carry the trial index") {
    auto spec = default_synth_spec(64, 2, 4);
    spec.frames_per_concept = 100;
    const auto data = generate_synthetic(spec).dataset;
    FcmConfig config;
    EvalParams params;
    params.trials = 5;
    params.n_pos = 200;  // more than the 100 available positives
    params.n_neg = 50;
    REQUIRE_THROWS_MATCHES(
        bootstrap_eval(data, spec.concepts[0].name, config, params), Error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("trial 0:")));
}

TEST_CASE("sweeps share trial seeds and agree with standalone bootstraps") {
    const auto data = planted_dataset(2.0, 0.1, 55);
    FcmConfig config;
    EvalParams params;
    params.trials = 20;
    params.n_pos = 80;
    params.n_neg = 80;
    params.seed = 321;

    SECTION("complexity") {
        const std::vector<std::size_t> grid = {2, 10, 20};
        const auto table = sweep_complexity(data, "other door", grid, config, params);
        REQUIRE(table.parameter == "complexity");
        REQUIRE(table.rows.size() == 3);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            REQUIRE(table.rows[i].value == static_cast<double>(grid[i]));
            REQUIRE(table.rows[i].report.trial_seeds == table.rows[0].report.trial_seeds);
            FcmConfig standalone = config;
            standalone.pattern_complexity = grid[i];
            const auto solo = bootstrap_eval(data, "other door", standalone, params);
            REQUIRE(table.rows[i].report.trial_metrics == solo.trial_metrics);
        }
    }

    SECTION("threshold") {
        const std::vector<double> grid = {0.0, 0.1, 0.2, 0.5, 0.9};
        const auto table = sweep_threshold(data, "other door", grid, config, params);
        REQUIRE(table.rows.size() == 5);
        // Scores are computed once per trial, so raising the threshold can
        // only shrink per-trial recall.
        for (std::size_t i = 1; i < table.rows.size(); ++i)
            for (std::size_t t = 0; t < params.trials; ++t)
                REQUIRE(table.rows[i].report.trial_metrics[t].recall() <=
                        table.rows[i - 1].report.trial_metrics[t].recall());
        // The theta = 0.2 column matches a standalone run at that threshold.
        const auto solo = bootstrap_eval(data, "other door", config, params);
        REQUIRE(table.rows[2].report.trial_metrics == solo.trial_metrics);

        const std::vector<double> bad = {0.2, 1.2};
        REQUIRE_THROWS_AS(sweep_threshold(data, "other door", bad, config, params), Error);
    }

    SECTION("examples") {
        const std::vector<std::size_t> grid = {1, 5, 20};
        const auto table = sweep_num_examples(data, "other door", grid, config, params);
        REQUIRE(table.parameter == "examples");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            REQUIRE(table.rows[i].report.k_pos_examples == grid[i]);
            EvalParams swept = params;
            swept.k = grid[i];
            const auto solo = bootstrap_eval(data, "other door", config, swept);
            REQUIRE(table.rows[i].report.trial_metrics == solo.trial_metrics);
        }
        // With dropout in play, more examples cannot hurt on this corpus.
        REQUIRE(table.rows.back().report.accuracy.mean >=
                table.rows.front().report.accuracy.mean);
    }
}

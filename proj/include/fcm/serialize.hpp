#ifndef FCM_SERIALIZE_HPP
#define FCM_SERIALIZE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcm/baseline.hpp"
#include "fcm/concept.hpp"
#include "fcm/error.hpp"
#include "fcm/evaluation.hpp"
#include "fcm/io.hpp"

namespace fcm {

// ordered_json keeps insertion order, which pins a canonical field layout so
// identical values always serialize to identical bytes.
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Concept definitions
// ---------------------------------------------------------------------------

inline json definition_to_json(const ConceptDefinition& definition) {
    json entries = json::array();
    for (const auto& entry : definition.entries) {
        json indices = json::array();
        for (std::uint32_t i : entry.tuple.indices()) indices.push_back(i);
        entries.push_back({{"indices", std::move(indices)},
                           {"count", entry.count},
                           {"weight", entry.weight}});
    }
    return json{{"name", definition.name},
                {"order", order_size(definition.order)},
                {"dim", definition.dim},
                {"entries", std::move(entries)},
                {"meta",
                 {{"k_examples", definition.k_examples},
                  {"n_requested", definition.n_requested},
                  {"warnings", definition.warnings}}}};
}

inline ConceptDefinition definition_from_json(const json& j) {
    try {
        ConceptDefinition definition;
        definition.name = j.at("name").get<std::string>();
        definition.order = pattern_order_from_int(j.at("order").get<int>());
        definition.dim = j.at("dim").get<std::uint32_t>();
        for (const auto& e : j.at("entries")) {
            const auto indices = e.at("indices").get<std::vector<std::uint32_t>>();
            definition.entries.push_back({NeuronTuple::from_indices(indices),
                                          e.at("count").get<std::uint64_t>(),
                                          e.at("weight").get<double>()});
        }
        const auto& meta = j.at("meta");
        definition.k_examples = meta.at("k_examples").get<std::size_t>();
        definition.n_requested = meta.at("n_requested").get<std::size_t>();
        definition.warnings = meta.at("warnings").get<std::vector<std::string>>();
        return definition;
    } catch (const json::exception& e) {
        raise(ErrorCode::malformed_row, std::string("bad concept definition: ") + e.what());
    }
}

inline void write_definition(const std::filesystem::path& path,
                             const ConceptDefinition& definition) {
    atomic_write_file(path, definition_to_json(definition).dump(2) + "\n");
}

inline ConceptDefinition read_definition(const std::filesystem::path& path) {
    try {
        return definition_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        raise(ErrorCode::malformed_row,
              "cannot parse concept definition " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Linear baseline models
// ---------------------------------------------------------------------------

inline json model_to_json(const LinearModel& model) {
    return json{{"weights", model.weights},
                {"bias", model.bias},
                {"dim", model.dim},
                {"train_accuracy", model.train_accuracy},
                {"degenerate", model.degenerate},
                {"hyperparameters",
                 {{"regularization", model.regularization},
                  {"epochs", model.epochs},
                  {"seed", model.seed}}},
                {"examples", {{"positive", model.pos_examples}, {"negative", model.neg_examples}}}};
}

inline LinearModel model_from_json(const json& j) {
    try {
        LinearModel model;
        model.weights = j.at("weights").get<std::vector<double>>();
        model.bias = j.at("bias").get<double>();
        model.dim = j.at("dim").get<std::uint32_t>();
        model.train_accuracy = j.at("train_accuracy").get<double>();
        model.degenerate = j.at("degenerate").get<bool>();
        const auto& hp = j.at("hyperparameters");
        model.regularization = hp.at("regularization").get<double>();
        model.epochs = hp.at("epochs").get<std::size_t>();
        model.seed = hp.at("seed").get<std::uint64_t>();
        model.pos_examples = j.at("examples").at("positive").get<std::size_t>();
        model.neg_examples = j.at("examples").at("negative").get<std::size_t>();
        model.trained = true;
        require(model.weights.size() == model.dim, ErrorCode::dimension_mismatch,
                "model weight count does not match dim");
        return model;
    } catch (const json::exception& e) {
        raise(ErrorCode::malformed_row, std::string("bad linear model: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Evaluation reports
// ---------------------------------------------------------------------------

inline std::string report_trials_csv(const EvalReport& report) {
    std::string out = "trial,seed,tp,fp,tn,fn,accuracy,precision,recall,f1\n";
    for (std::size_t t = 0; t < report.trials; ++t) {
        const Metrics& m = report.trial_metrics[t];
        out += std::to_string(t) + ',' + std::to_string(report.trial_seeds[t]) + ',' +
               std::to_string(m.tp) + ',' + std::to_string(m.fp) + ',' + std::to_string(m.tn) +
               ',' + std::to_string(m.fn) + ',' + format_number(m.accuracy()) + ',' +
               format_number(m.precision()) + ',' + format_number(m.recall()) + ',' +
               format_number(m.f1()) + '\n';
    }
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (const auto& m : report.trial_metrics) {
        tp += static_cast<double>(m.tp);
        fp += static_cast<double>(m.fp);
        tn += static_cast<double>(m.tn);
        fn += static_cast<double>(m.fn);
    }
    const double n = static_cast<double>(report.trials);
    out += "mean,," + format_number(tp / n) + ',' + format_number(fp / n) + ',' +
           format_number(tn / n) + ',' + format_number(fn / n) + ',' +
           format_number(report.accuracy.mean) + ',' + format_number(report.precision.mean) +
           ',' + format_number(report.recall.mean) + ',' + format_number(report.f1.mean) + '\n';
    return out;
}

inline json metric_summary_to_json(const MetricSummary& s) {
    return json{{"mean", s.mean},     {"ci_lo", s.ci_lo}, {"ci_hi", s.ci_hi},
                {"median", s.median}, {"q1", s.q1},       {"q3", s.q3}};
}

inline json report_summary_json(const EvalReport& report) {
    return json{{"concept", report.concept_name},
                {"method", report.method},
                {"config",
                 {{"pattern_complexity", report.config.pattern_complexity},
                  {"detection_threshold", report.config.detection_threshold},
                  {"order", order_size(report.config.order)}}},
                {"protocol",
                 {{"trials", report.trials},
                  {"seed", report.master_seed},
                  {"n_pos", report.n_pos},
                  {"n_neg", report.n_neg}}},
                {"labeled_examples",
                 {{"positive", report.k_pos_examples}, {"negative", report.k_neg_examples}}},
                {"accuracy", metric_summary_to_json(report.accuracy)},
                {"precision", metric_summary_to_json(report.precision)},
                {"recall", metric_summary_to_json(report.recall)},
                {"f1", metric_summary_to_json(report.f1)}};
}

inline std::string sweep_trials_csv(const SweepTable& table) {
    std::string out = "parameter,value,trial,seed,tp,fp,tn,fn,accuracy,precision,recall,f1\n";
    for (const auto& row : table.rows) {
        const EvalReport& report = row.report;
        for (std::size_t t = 0; t < report.trials; ++t) {
            const Metrics& m = report.trial_metrics[t];
            out += table.parameter + ',' + format_number(row.value) + ',' + std::to_string(t) +
                   ',' + std::to_string(report.trial_seeds[t]) + ',' + std::to_string(m.tp) +
                   ',' + std::to_string(m.fp) + ',' + std::to_string(m.tn) + ',' +
                   std::to_string(m.fn) + ',' + format_number(m.accuracy()) + ',' +
                   format_number(m.precision()) + ',' + format_number(m.recall()) + ',' +
                   format_number(m.f1()) + '\n';
        }
        out += table.parameter + ',' + format_number(row.value) + ",mean,,,,,," +
               format_number(report.accuracy.mean) + ',' + format_number(report.precision.mean) +
               ',' + format_number(report.recall.mean) + ',' + format_number(report.f1.mean) +
               '\n';
    }
    return out;
}

inline json sweep_summary_json(const SweepTable& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json summary = report_summary_json(row.report);
        summary["value"] = row.value;
        rows.push_back(std::move(summary));
    }
    return json{{"parameter", table.parameter}, {"rows", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// Sparsity reports
// ---------------------------------------------------------------------------

inline json sparsity_to_json(const SparsityReport& report) {
    return json{{"frames", report.frames},
                {"dim", report.dim},
                {"mean_active", report.mean_active},
                {"min_active", report.min_active},
                {"max_active", report.max_active},
                {"var_active", report.var_active},
                {"pct_active", report.pct_active},
                {"ever_active_fraction", report.ever_active_fraction},
                {"max_neuron_frequency", report.max_neuron_frequency}};
}

// ---------------------------------------------------------------------------
// Run manifests: config echo, seeds, version, and input digests. A run is
// reproducible from its manifest alone.
// ---------------------------------------------------------------------------

inline constexpr std::string_view k_tool_version = "0.1.0";

inline json input_digest_json(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    return json{{"path", path.string()},
                {"bytes", bytes.size()},
                {"fnv1a64", fnv1a64_hex(bytes)}};
}

inline json make_manifest(const std::string& command, const std::vector<std::string>& argv,
                          json config, const std::vector<std::filesystem::path>& inputs,
                          const std::vector<std::string>& outputs) {
    json input_list = json::array();
    for (const auto& path : inputs) input_list.push_back(input_digest_json(path));
    return json{{"tool", "fcm"},          {"version", std::string(k_tool_version)},
                {"command", command},     {"argv", argv},
                {"config", std::move(config)}, {"inputs", std::move(input_list)},
                {"outputs", outputs}};
}

}  // namespace fcm

#endif  // FCM_SERIALIZE_HPP

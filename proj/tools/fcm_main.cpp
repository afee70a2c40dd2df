// fcm: command-line front end for the fast concept mapping library.
//
// Every subcommand writes its artifacts plus a manifest.json (config echo,
// seeds, input digests) into --out, so any run can be reproduced from the
// manifest alone. Evaluation trials may run across threads (FCM_WORKERS);
// all file writes happen on the main thread via write-temp-then-rename.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcm/fcm.hpp"

namespace fs = std::filesystem;
using fcm::json;

namespace {

struct Options {
    std::string encodings;
    std::string labels;
    std::string concept_name;
    std::vector<std::string> definitions;
    std::string binarize = "adaptive";
    std::string out = "fcm_out";
    std::size_t k = 5;
    std::size_t complexity = 10;
    double threshold = 0.20;
    int order = 2;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::size_t n_pos = 250;
    std::size_t n_neg = 250;

    // sweep
    std::string param;
    std::vector<double> grid;

    // synth
    std::uint32_t dim = 256;
    std::size_t n_concepts = 6;
    std::size_t neurons_per_concept = 6;
    std::size_t frames_per_concept = 300;
    double noise_on = 2.0;
    double dropout = 0.0;
    double cooccur = 0.0;
    std::string format = "text";
    bool random_rep = false;
    double activation_prob = 8.0 / 256.0;

    // baseline
    double regularization = 1e-4;
    std::size_t epochs = 500;

    std::vector<std::string> argv;
};

std::string single_line(std::string text) {
    for (char& c : text)
        if (c == '\n' || c == '\r') c = ';';
    return text;
}

std::size_t workers_from_env() {
    const char* value = std::getenv("FCM_WORKERS");
    if (value == nullptr || *value == '\0') return 1;
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(value, &end, 10);
    fcm::require(end != nullptr && *end == '\0' && parsed >= 1, fcm::ErrorCode::invalid_argument,
                 std::string("FCM_WORKERS must be a positive integer, got '") + value + "'");
    return static_cast<std::size_t>(parsed);
}

fs::path prepare_out_dir(const Options& opts) {
    fs::path dir(opts.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    fcm::require(!ec, fcm::ErrorCode::io_failure, "cannot create output directory: " + opts.out);
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    fcm::atomic_write_file(path, j.dump(2) + "\n");
}

void emit_manifest(const fs::path& dir, const std::string& command, const Options& opts,
                   json config, const std::vector<fs::path>& inputs,
                   const std::vector<std::string>& outputs) {
    write_json(dir / "manifest.json",
               fcm::make_manifest(command, opts.argv, std::move(config), inputs, outputs));
}

fcm::FcmConfig fcm_config(const Options& opts) {
    fcm::FcmConfig config;
    config.pattern_complexity = opts.complexity;
    config.detection_threshold = opts.threshold;
    config.order = fcm::pattern_order_from_int(opts.order);
    config.validate();
    return config;
}

fcm::EvalParams eval_params(const Options& opts) {
    fcm::EvalParams params;
    params.k = opts.k;
    params.n_pos = opts.n_pos;
    params.n_neg = opts.n_neg;
    params.trials = opts.trials;
    params.seed = opts.seed;
    params.workers = workers_from_env();
    return params;
}

json eval_config_json(const Options& opts, const fcm::EvalParams& params) {
    return json{{"concept", opts.concept_name},
                {"binarize", opts.binarize},
                {"pattern_complexity", opts.complexity},
                {"detection_threshold", opts.threshold},
                {"order", opts.order},
                {"k", params.k},
                {"n_pos", params.n_pos},
                {"n_neg", params.n_neg},
                {"trials", params.trials},
                {"seed", params.seed},
                {"workers", params.workers}};
}

// --- subcommands -----------------------------------------------------------

int run_stats(const Options& opts) {
    const auto mode = fcm::parse_binarize_mode(opts.binarize);
    const fs::path dir = prepare_out_dir(opts);
    const auto matrix = fcm::read_encodings(opts.encodings);
    const auto masks = fcm::binarize_matrix(matrix, mode);
    const json j = fcm::sparsity_to_json(fcm::sparsity_report(masks));
    write_json(dir / "sparsity.json", j);
    emit_manifest(dir, "stats", opts, json{{"binarize", opts.binarize}}, {opts.encodings},
                  {"sparsity.json"});
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_extract(const Options& opts) {
    const auto mode = fcm::parse_binarize_mode(opts.binarize);
    const auto config = fcm_config(opts);
    const fs::path dir = prepare_out_dir(opts);
    const auto data = fcm::load_dataset(opts.encodings, opts.labels, mode);
    const std::uint32_t concept_id = data.require_concept(opts.concept_name);
    const auto positives = data.frames_with(concept_id);
    if (positives.size() < opts.k)
        fcm::raise(fcm::ErrorCode::insufficient_frames,
                   "insufficient positive frames for concept '" + opts.concept_name +
                       "': have " + std::to_string(positives.size()) + ", need " +
                       std::to_string(opts.k));
    fcm::Rng rng(opts.seed);
    const auto picks = rng.sample_without_replacement(positives.size(), opts.k);
    std::vector<fcm::ActivityMask> examples;
    std::vector<std::string> example_ids;
    for (std::size_t p : picks) {
        examples.push_back(data.masks[positives[p]]);
        example_ids.push_back(data.frame_ids[positives[p]]);
    }
    const auto definition = fcm::extract_concept(opts.concept_name, examples, config);
    const json j = fcm::definition_to_json(definition);
    write_json(dir / "definition.json", j);
    emit_manifest(dir, "extract", opts,
                  json{{"concept", opts.concept_name},
                       {"binarize", opts.binarize},
                       {"k", opts.k},
                       {"pattern_complexity", opts.complexity},
                       {"order", opts.order},
                       {"seed", opts.seed},
                       {"example_frames", example_ids}},
                  {opts.encodings, opts.labels}, {"definition.json"});
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_detect(const Options& opts) {
    const auto mode = fcm::parse_binarize_mode(opts.binarize);
    fcm::require(opts.threshold >= 0.0 && opts.threshold <= 1.0, fcm::ErrorCode::invalid_argument,
                 "detection threshold must be in [0, 1]");
    const fs::path dir = prepare_out_dir(opts);
    const auto matrix = fcm::read_encodings(opts.encodings);
    const auto masks = fcm::binarize_matrix(matrix, mode);
    std::vector<fcm::ConceptDefinition> definitions;
    for (const auto& path : opts.definitions)
        definitions.push_back(fcm::read_definition(path));

    std::string csv = "frame_id,concept,evidence,present\n";
    std::map<std::string, std::size_t> hits;
    for (std::size_t f = 0; f < masks.size(); ++f) {
        const auto results = fcm::detect(definitions, masks[f], opts.threshold);
        for (const auto& r : results) {
            csv += matrix.frame_ids[f] + ',' + r.concept_name + ',' +
                   fcm::format_number(r.evidence) + ',' + (r.present ? "1\n" : "0\n");
            if (r.present) ++hits[r.concept_name];
        }
    }
    fcm::atomic_write_file(dir / "detections.csv", csv);

    json counts = json::object();
    for (const auto& definition : definitions)
        counts[definition.name] = hits.count(definition.name) ? hits[definition.name] : 0;
    const json j{{"frames", masks.size()},
                 {"threshold", opts.threshold},
                 {"detections", std::move(counts)}};
    std::vector<fs::path> inputs = {opts.encodings};
    for (const auto& path : opts.definitions) inputs.emplace_back(path);
    emit_manifest(dir, "detect", opts,
                  json{{"binarize", opts.binarize}, {"threshold", opts.threshold}}, inputs,
                  {"detections.csv"});
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_eval(const Options& opts) {
    const auto mode = fcm::parse_binarize_mode(opts.binarize);
    const auto config = fcm_config(opts);
    const auto params = eval_params(opts);
    const fs::path dir = prepare_out_dir(opts);
    const auto data = fcm::load_dataset(opts.encodings, opts.labels, mode);
    const auto report = fcm::bootstrap_eval(data, opts.concept_name, config, params);
    const json summary = fcm::report_summary_json(report);
    fcm::atomic_write_file(dir / "report.csv", fcm::report_trials_csv(report));
    write_json(dir / "report.json", summary);
    emit_manifest(dir, "eval", opts, eval_config_json(opts, params),
                  {opts.encodings, opts.labels}, {"report.csv", "report.json"});
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_sweep(const Options& opts) {
    const auto mode = fcm::parse_binarize_mode(opts.binarize);
    const auto config = fcm_config(opts);
    const auto params = eval_params(opts);

    std::vector<double> grid = opts.grid;
    if (grid.empty()) {
        if (opts.param == "complexity")
            grid = {1, 2, 3, 5, 10, 20, 50};
        else if (opts.param == "threshold")
            for (int i = 1; i <= 18; ++i) grid.push_back(0.05 * i);
        else
            grid = {1, 2, 3, 4, 5, 10, 15, 20, 50};
    }
    std::vector<std::size_t> values;
    if (opts.param != "threshold") {
        for (double v : grid) {
            const auto n = static_cast<std::size_t>(v);
            fcm::require(v == static_cast<double>(n) && n >= 1, fcm::ErrorCode::invalid_argument,
                         opts.param + " grid values must be positive integers");
            values.push_back(n);
        }
    }

    const fs::path dir = prepare_out_dir(opts);
    const auto data = fcm::load_dataset(opts.encodings, opts.labels, mode);
    fcm::SweepTable table;
    if (opts.param == "threshold")
        table = fcm::sweep_threshold(data, opts.concept_name, grid, config, params);
    else
        table = opts.param == "complexity"
                    ? fcm::sweep_complexity(data, opts.concept_name, values, config, params)
                    : fcm::sweep_num_examples(data, opts.concept_name, values, config, params);

    const json summary = fcm::sweep_summary_json(table);
    fcm::atomic_write_file(dir / "sweep.csv", fcm::sweep_trials_csv(table));
    write_json(dir / "sweep.json", summary);
    json config_echo = eval_config_json(opts, params);
    config_echo["param"] = opts.param;
    config_echo["grid"] = grid;
    emit_manifest(dir, "sweep", opts, std::move(config_echo), {opts.encodings, opts.labels},
                  {"sweep.csv", "sweep.json"});
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_synth(const Options& opts) {
    fcm::require(opts.format == "text" || opts.format == "binary",
                 fcm::ErrorCode::invalid_argument,
                 "format must be 'text' or 'binary', got '" + opts.format + "'");
    auto spec = fcm::default_synth_spec(opts.dim, opts.n_concepts, opts.neurons_per_concept);
    spec.frames_per_concept = opts.frames_per_concept;
    spec.noise_on = opts.noise_on;
    spec.dropout = opts.dropout;
    spec.co_occurrence_prob = opts.cooccur;
    spec.seed = opts.seed;
    const fs::path dir = prepare_out_dir(opts);
    auto data = fcm::generate_synthetic(spec).dataset;
    if (opts.random_rep)
        data = fcm::generate_random_masks(opts.dim, opts.activation_prob, opts.seed, data);

    const bool binary = opts.format == "binary";
    const std::string enc_name = binary ? "encodings.fcme" : "encodings.csv";
    fcm::write_encodings(dir / enc_name, fcm::indicator_matrix(data),
                         binary ? fcm::EncodingFormat::binary : fcm::EncodingFormat::text);
    fcm::write_labels(dir / "labels.csv", fcm::labels_of(data));

    json planted = json::object();
    for (const auto& planted_concept : spec.concepts)
        planted[planted_concept.name] = planted_concept.neurons;
    emit_manifest(dir, "synth", opts,
                  json{{"dim", opts.dim},
                       {"n_concepts", opts.n_concepts},
                       {"neurons_per_concept", opts.neurons_per_concept},
                       {"frames_per_concept", opts.frames_per_concept},
                       {"noise_on", opts.noise_on},
                       {"dropout", opts.dropout},
                       {"co_occurrence_prob", opts.cooccur},
                       {"seed", opts.seed},
                       {"random_rep", opts.random_rep},
                       {"activation_prob", opts.activation_prob},
                       {"format", opts.format},
                       {"planted", std::move(planted)}},
                  {}, {enc_name, "labels.csv"});
    const json j{{"frames", data.size()},
                 {"dim", data.dim()},
                 {"concepts", data.concept_names},
                 {"encodings", (dir / enc_name).string()},
                 {"labels", (dir / "labels.csv").string()}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_baseline(const Options& opts) {
    const auto mode = fcm::parse_binarize_mode(opts.binarize);
    const auto params = eval_params(opts);
    fcm::BaselineConfig config;
    config.regularization = opts.regularization;
    config.epochs = opts.epochs;
    fcm::require(config.regularization >= 0.0, fcm::ErrorCode::invalid_argument,
                 "regularization must be >= 0");
    fcm::require(config.epochs >= 1, fcm::ErrorCode::invalid_argument, "epochs must be >= 1");
    const fs::path dir = prepare_out_dir(opts);
    const auto data = fcm::load_dataset(opts.encodings, opts.labels, mode);
    const auto report = fcm::bootstrap_eval_baseline(data, opts.concept_name, config, params);
    const json summary = fcm::report_summary_json(report);
    fcm::atomic_write_file(dir / "report.csv", fcm::report_trials_csv(report));
    write_json(dir / "report.json", summary);
    json config_echo = json{{"concept", opts.concept_name},
                            {"binarize", opts.binarize},
                            {"regularization", opts.regularization},
                            {"epochs", opts.epochs},
                            {"k", params.k},
                            {"n_pos", params.n_pos},
                            {"n_neg", params.n_neg},
                            {"trials", params.trials},
                            {"seed", params.seed},
                            {"workers", params.workers}};
    emit_manifest(dir, "baseline", opts, std::move(config_echo), {opts.encodings, opts.labels},
                  {"report.csv", "report.json"});
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// --- flag plumbing ----------------------------------------------------------

void add_binarize_out(CLI::App* sub, Options& opts) {
    sub->add_option("--binarize", opts.binarize, "adaptive or fixed:<t>")
        ->capture_default_str();
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
}

void add_data_flags(CLI::App* sub, Options& opts) {
    sub->add_option("--encodings", opts.encodings, "encoding matrix file")->required();
    sub->add_option("--labels", opts.labels, "labels file")->required();
    sub->add_option("--concept", opts.concept_name, "target concept name")->required();
    add_binarize_out(sub, opts);
}

void add_eval_flags(CLI::App* sub, Options& opts) {
    sub->add_option("--k", opts.k, "labeled examples per trial")->capture_default_str();
    sub->add_option("--trials", opts.trials, "bootstrap trials")->capture_default_str();
    sub->add_option("--seed", opts.seed, "master seed")->capture_default_str();
    sub->add_option("--n-pos", opts.n_pos, "positive test frames per trial")
        ->capture_default_str();
    sub->add_option("--n-neg", opts.n_neg, "negative test frames per trial")
        ->capture_default_str();
}

void add_fcm_flags(CLI::App* sub, Options& opts) {
    sub->add_option("--complexity", opts.complexity, "definition size N")->capture_default_str();
    sub->add_option("--threshold", opts.threshold, "detection threshold")->capture_default_str();
    sub->add_option("--order", opts.order, "tuple order: 1, 2, or 3")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    Options opts;
    opts.argv.assign(argv, argv + argc);

    CLI::App app{"fast concept mapping over sparse activation patterns"};
    app.require_subcommand(1);
    int rc = 0;

    auto* stats = app.add_subcommand("stats", "sparsity statistics of an encoding matrix");
    stats->add_option("--encodings", opts.encodings, "encoding matrix file")->required();
    add_binarize_out(stats, opts);
    stats->callback([&] { rc = run_stats(opts); });

    auto* extract = app.add_subcommand("extract", "extract a concept definition from examples");
    add_data_flags(extract, opts);
    extract->add_option("--k", opts.k, "examples to sample")->capture_default_str();
    extract->add_option("--complexity", opts.complexity, "definition size N")
        ->capture_default_str();
    extract->add_option("--order", opts.order, "tuple order: 1, 2, or 3")
        ->capture_default_str();
    extract->add_option("--seed", opts.seed, "example sampling seed")->capture_default_str();
    extract->callback([&] { rc = run_extract(opts); });

    auto* detect = app.add_subcommand("detect", "detect concepts in every frame");
    detect->add_option("--encodings", opts.encodings, "encoding matrix file")->required();
    detect->add_option("--definition", opts.definitions, "definition file (repeatable)")
        ->required();
    detect->add_option("--threshold", opts.threshold, "detection threshold")
        ->capture_default_str();
    add_binarize_out(detect, opts);
    detect->callback([&] { rc = run_detect(opts); });

    auto* eval = app.add_subcommand("eval", "bootstrap evaluation of one concept");
    add_data_flags(eval, opts);
    add_fcm_flags(eval, opts);
    add_eval_flags(eval, opts);
    eval->callback([&] { rc = run_eval(opts); });

    auto* sweep = app.add_subcommand("sweep", "parameter sweep with shared trial seeds");
    add_data_flags(sweep, opts);
    add_fcm_flags(sweep, opts);
    add_eval_flags(sweep, opts);
    sweep->add_option("--param", opts.param, "complexity, threshold, or examples")
        ->required()
        ->check(CLI::IsMember({"complexity", "threshold", "examples"}));
    sweep->add_option("--grid", opts.grid, "comma-separated grid values")->delimiter(',');
    sweep->callback([&] { rc = run_sweep(opts); });

    auto* synth = app.add_subcommand("synth", "generate a planted synthetic corpus");
    synth->add_option("--dim", opts.dim, "neurons per frame vector")->capture_default_str();
    synth->add_option("--n-concepts", opts.n_concepts, "planted concepts")
        ->capture_default_str();
    synth->add_option("--neurons-per-concept", opts.neurons_per_concept,
                      "dedicated neurons per concept")
        ->capture_default_str();
    synth->add_option("--frames-per-concept", opts.frames_per_concept, "frames per concept")
        ->capture_default_str();
    synth->add_option("--noise", opts.noise_on, "expected spurious active neurons")
        ->capture_default_str();
    synth->add_option("--dropout", opts.dropout, "planted neuron dropout probability")
        ->capture_default_str();
    synth->add_option("--cooccur", opts.cooccur, "second-concept probability")
        ->capture_default_str();
    synth->add_option("--seed", opts.seed, "generation seed")->capture_default_str();
    synth->add_option("--format", opts.format, "text or binary encodings")
        ->capture_default_str();
    synth->add_flag("--random-rep", opts.random_rep,
                    "replace masks with label-independent random masks");
    synth->add_option("--activation-prob", opts.activation_prob,
                      "per-neuron firing probability for --random-rep")
        ->capture_default_str();
    synth->add_option("--out", opts.out, "output directory")->capture_default_str();
    synth->callback([&] { rc = run_synth(opts); });

    auto* baseline = app.add_subcommand("baseline", "linear separator comparison");
    add_data_flags(baseline, opts);
    add_eval_flags(baseline, opts);
    baseline->add_option("--reg", opts.regularization, "hinge loss L2 regularization")
        ->capture_default_str();
    baseline->add_option("--epochs", opts.epochs, "training epochs")->capture_default_str();
    baseline->callback([&] { rc = run_baseline(opts); });

    try {
        app.parse(argc, argv);
        return rc;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "fcm: error: invalid_argument: " << single_line(e.what()) << "\n";
        return 2;
    } catch (const fcm::Error& e) {
        std::cerr << "fcm: error: " << fcm::error_code_name(e.code()) << ": "
                  << single_line(e.what()) << "\n";
        return fcm::error_exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "fcm: error: internal: " << single_line(e.what()) << "\n";
        return 4;
    }
}

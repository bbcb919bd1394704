#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fried/audit.hpp"
#include "fried/csv.hpp"
#include "fried/errors.hpp"
#include "fried/fairness.hpp"
#include "fried/infotheory.hpp"
#include "fried/model_io.hpp"
#include "fried/presets.hpp"
#include "fried/synth.hpp"
#include "fried/train.hpp"

namespace fried {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_string(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::uint64_t hash_dataset(const Dataset& ds) {
    std::uint64_t h = fnv1a(ds.x.data().data(), ds.x.data().size() * sizeof(double));
    h = fnv1a(ds.p.data().data(), ds.p.data().size() * sizeof(double), h);
    h = fnv1a(ds.y.data(), ds.y.size() * sizeof(int), h);
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct ExperimentConfig {
    json dataset;
    TrainConfig train;
    KlEstimatorConfig estimator;
    SeparabilityConfig separability;
    std::size_t eval_folds = 5;
    std::vector<double> beta_grid{0.0, 0.25, 0.5, 1.0};
    std::vector<double> lambda_grid{0.0, 0.25, 0.5, 1.0};
    AuditConfig audit;
    json audit_target;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::string raw_text;  // the config file as parsed, for hashing
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

TrainConfig parse_train(const json& root) {
    TrainConfig config;
    if (root.contains("preset"))
        config = preset_train_config(root.at("preset").get<std::string>());
    if (!root.contains("train")) return config;
    const json& j = root.at("train");
    maybe(j, "epochs", config.epochs);
    maybe(j, "batch_size", config.batch_size);
    maybe(j, "learning_rate", config.learning_rate);
    maybe(j, "critic_learning_rate", config.critic_learning_rate);
    maybe(j, "beta", config.beta);
    maybe(j, "lambda", config.lambda);
    maybe(j, "seed", config.seed);
    maybe(j, "hidden", config.hidden);
    maybe(j, "latent_dim", config.latent_dim);
    maybe(j, "literal_composition", config.literal_composition);
    if (j.contains("ablation"))
        config.ablation = ablation_from_name(j.at("ablation").get<std::string>());
    return config;
}

KlEstimatorConfig parse_estimator(const json& root) {
    KlEstimatorConfig cfg;
    if (!root.contains("estimator")) return cfg;
    const json& j = root.at("estimator");
    maybe(j, "hidden", cfg.classifier.hidden);
    maybe(j, "epochs", cfg.classifier.epochs);
    maybe(j, "batch_size", cfg.classifier.batch_size);
    maybe(j, "learning_rate", cfg.classifier.learning_rate);
    maybe(j, "train_fraction", cfg.train_fraction);
    maybe(j, "clamp_epsilon", cfg.clamp_epsilon);
    return cfg;
}

ExperimentConfig parse_config(const std::string& path, const std::optional<std::string>& out_dir,
                              const std::optional<std::uint64_t>& seed) {
    const json root = read_json_file(path);
    ExperimentConfig config;
    config.raw_text = root.dump();
    try {
        if (!root.contains("dataset"))
            throw ConfigError("config: missing 'dataset' section");
        config.dataset = root.at("dataset");
        config.train = parse_train(root);
        config.estimator = parse_estimator(root);
        config.separability.kl = config.estimator;
        if (root.contains("estimator")) {
            maybe(root.at("estimator"), "permutations", config.separability.permutations);
            maybe(root.at("estimator"), "min_margin", config.separability.min_margin);
        }
        if (root.contains("eval")) maybe(root.at("eval"), "folds", config.eval_folds);
        if (root.contains("sweep")) {
            maybe(root.at("sweep"), "beta_grid", config.beta_grid);
            maybe(root.at("sweep"), "lambda_grid", config.lambda_grid);
            maybe(root.at("sweep"), "folds", config.eval_folds);
        }
        if (root.contains("audit")) {
            const json& j = root.at("audit");
            maybe(j, "n_samples", config.audit.n_samples);
            maybe(j, "n_background", config.audit.n_background);
            maybe(j, "max_instances", config.audit.max_instances);
            if (j.contains("target")) config.audit_target = j.at("target");
        }
        maybe(root, "out_dir", config.out_dir);
        maybe(root, "seed", config.seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (out_dir) config.out_dir = *out_dir;
    if (seed) {
        config.seed = *seed;
        config.train.seed = *seed;
    } else if (!root.contains("train") || !root.at("train").contains("seed")) {
        config.train.seed = config.seed;
    }
    config.train.validate();
    return config;
}

SchemaConfig parse_schema(const json& j) {
    SchemaConfig schema;
    try {
        schema.label_column = j.at("label_column").get<std::string>();
        schema.label_positive = j.at("label_positive").get<std::string>();
        schema.protected_columns = j.at("protected_columns").get<std::vector<std::string>>();
        schema.protected_positive = j.at("protected_positive").get<std::vector<std::string>>();
        maybe(j, "categorical_columns", schema.categorical_columns);
        maybe(j, "drop_columns", schema.drop_columns);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("schema: ") + e.what());
    }
    return schema;
}

Dataset load_dataset(const ExperimentConfig& config) {
    const json& j = config.dataset;
    std::string type;
    try {
        type = j.at("type").get<std::string>();
    } catch (const json::exception&) {
        throw ConfigError("dataset: missing 'type'");
    }
    std::uint64_t seed = config.seed;
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();

    if (type == "synth_bias") {
        std::size_t n = 5000;
        double bias = 0.6, label_noise = 0.0;
        maybe(j, "n", n);
        maybe(j, "bias", bias);
        maybe(j, "label_noise", label_noise);
        return synth_bias_dataset(n, bias, label_noise, seed);
    }
    if (type == "synth_shapes") {
        std::size_t n = 2000;
        double min_scale = 0.0;
        std::string factor = "scale";
        maybe(j, "n", n);
        maybe(j, "min_scale", min_scale);
        maybe(j, "factor", factor);
        ShapeFactor f = factor == "scale"           ? ShapeFactor::scale
                        : factor == "shape"         ? ShapeFactor::shape
                        : factor == "scale_and_shape" ? ShapeFactor::scale_and_shape
                                                      : throw ConfigError(
                                                            "dataset: unknown factor '" + factor +
                                                            "'");
        return synth_shapes_dataset(n, f, min_scale, seed);
    }
    if (type == "synth_bow") {
        std::size_t n = 2000, vocabulary = 1000;
        maybe(j, "n", n);
        maybe(j, "vocabulary", vocabulary);
        return synth_bow_dataset(n, vocabulary, seed);
    }
    if (type == "csv") {
        if (!j.contains("path") || !j.contains("schema"))
            throw ConfigError("dataset: csv needs 'path' and 'schema'");
        return load_csv(j.at("path").get<std::string>(), parse_schema(j.at("schema")));
    }
    throw ConfigError("dataset: unknown type '" + type + "'");
}

BlackBoxModel parse_target(const json& j, const Dataset& ds) {
    if (j.is_null()) throw ConfigError("audit: missing 'target' spec");
    std::string type;
    try {
        type = j.at("type").get<std::string>();
    } catch (const json::exception&) {
        throw ConfigError("audit target: missing 'type'");
    }
    if (type != "linear") throw ConfigError("audit target: unknown type '" + type + "'");
    std::vector<double> weights;
    double intercept = 0.0;
    if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();
    maybe(j, "intercept", intercept);
    const std::size_t width = ds.x.cols() + ds.p.cols();
    if (weights.empty()) weights.assign(width, 0.0);
    if (weights.size() != width)
        throw ConfigError("audit target: expected " + std::to_string(width) + " weights, got " +
                          std::to_string(weights.size()));
    std::vector<std::string> names = ds.feature_names;
    for (const auto& n : ds.protected_names) names.push_back(n);
    return linear_black_box(std::move(weights), intercept, std::move(names));
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "'");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
}

std::size_t thread_count() {
    if (const char* env = std::getenv("FRIED_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 1;
}

// --- subcommands ---------------------------------------------------------

int cmd_train(const ExperimentConfig& config) {
    const Dataset ds = load_dataset(config);
    const TrainResult result = train(ds, config.train);
    ensure_out_dir(config.out_dir);
    save_model(result.model, config.out_dir + "/model.json");

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : result.history)
        rows.push_back({std::to_string(r.epoch), format_number(r.reconstruction),
                        format_number(r.disentanglement_term),
                        format_number(r.interpolation_term), format_number(r.total),
                        format_number(r.critic_dis_loss), format_number(r.critic_i_loss)});
    write_csv(config.out_dir + "/history.csv",
              {"epoch", "reconstruction", "disentanglement_term", "interpolation_term", "total",
               "critic_dis_loss", "critic_i_loss"},
              rows);
    std::cout << "trained " << config.train.epochs << " epochs; final reconstruction "
              << result.history.back().reconstruction << "\n";
    return 0;
}

int cmd_eval(const ExperimentConfig& config, const std::string& model_path) {
    const Dataset ds = load_dataset(config);
    const FriedModel model = load_model(model_path);
    const TradeoffPoint point =
        evaluate_representation(model, ds, config.eval_folds, config.seed);
    ensure_out_dir(config.out_dir);
    json out{{"beta", point.beta},
             {"lambda", point.lambda},
             {"delta_dp_mean", point.delta_dp},
             {"delta_dp_std", point.delta_dp_std},
             {"accuracy_mean", point.accuracy},
             {"accuracy_std", point.accuracy_std},
             {"folds", config.eval_folds},
             {"seed", config.seed},
             {"dataset_hash", hex64(hash_dataset(ds))}};
    write_text(config.out_dir + "/eval.json", out.dump(2) + "\n");
    std::cout << "delta_dp " << point.delta_dp << ", accuracy " << point.accuracy << "\n";
    return 0;
}

void write_points_csv(const std::string& path, const std::vector<TradeoffPoint>& points) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : points) {
        if (p.failed()) continue;
        rows.push_back({format_number(p.beta), format_number(p.lambda),
                        format_number(p.delta_dp), format_number(p.delta_dp_std),
                        format_number(p.accuracy), format_number(p.accuracy_std)});
    }
    write_csv(path,
              {"beta", "lambda", "delta_dp_mean", "delta_dp_std", "accuracy_mean",
               "accuracy_std"},
              rows);
}

int cmd_sweep(const ExperimentConfig& config) {
    const Dataset ds = load_dataset(config);
    const auto points = sweep_tradeoff(ds, config.beta_grid, config.lambda_grid, config.train,
                                       config.eval_folds, thread_count());
    const auto front = pareto_front(points);
    ensure_out_dir(config.out_dir);
    write_points_csv(config.out_dir + "/sweep_points.csv", points);
    write_points_csv(config.out_dir + "/sweep_front.csv", front);

    json errors = json::array();
    for (const auto& p : points)
        if (p.failed())
            errors.push_back({{"beta", p.beta}, {"lambda", p.lambda}, {"error", p.error}});
    json manifest{{"seed", config.train.seed},
                  {"dataset_hash", hex64(hash_dataset(ds))},
                  {"beta_grid", config.beta_grid},
                  {"lambda_grid", config.lambda_grid},
                  {"folds", config.eval_folds},
                  {"errors", errors}};
    write_text(config.out_dir + "/sweep_manifest.json", manifest.dump(2) + "\n");
    std::cout << "swept " << points.size() << " points, front size " << front.size() << "\n";
    return 0;
}

int cmd_cmi(const ExperimentConfig& config, const std::string& model_path,
            bool shuffled_control) {
    const Dataset ds = load_dataset(config);
    const FriedModel model = load_model(model_path);
    Matrix xprime = encode(model, ds.x, ds.p);
    if (shuffled_control) {
        Rng rng(Rng::mix(config.seed, 0xc0117401));
        xprime = xprime.take_rows(rng.permutation(xprime.rows()));
    }
    std::vector<int> p_col(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) p_col[i] = ds.p(i, 0) > 0.5 ? 1 : 0;

    const SeparabilityResult result =
        separability_check(ds.x, xprime, ds.y, p_col, config.separability, config.seed);
    ensure_out_dir(config.out_dir);
    json out{{"cmi", result.cmi},
             {"tau", result.tau},
             {"improves", result.improves},
             {"shuffled_control", shuffled_control},
             {"n", ds.rows()},
             {"seed", config.seed},
             {"config_hash", hex64(hash_string(config.raw_text))},
             {"dataset_hash", hex64(hash_dataset(ds))}};
    write_text(config.out_dir + "/cmi.json", out.dump(2) + "\n");
    std::cout << "cmi " << result.cmi << " (tau " << result.tau << "), improves "
              << (result.improves ? "true" : "false") << "\n";
    return 0;
}

void write_attribution_csv(const std::string& path, const AttributionReport& report) {
    const auto order = report.ranking();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const std::size_t f = order[rank];
        const std::string name =
            f < report.feature_names.size() ? report.feature_names[f] : "f" + std::to_string(f);
        rows.push_back({name, format_number(report.mean_abs[f]), std::to_string(rank + 1)});
    }
    write_csv(path, {"feature", "mean_abs_attribution", "rank"}, rows);
}

int cmd_audit(const ExperimentConfig& config, const std::string& model_path) {
    const Dataset ds = load_dataset(config);
    const FriedModel model = load_model(model_path);
    const BlackBoxModel target = parse_target(config.audit_target, ds);
    const InfluenceReport report =
        indirect_influence_report(model, target, ds, config.audit, config.seed);
    ensure_out_dir(config.out_dir);
    write_attribution_csv(config.out_dir + "/audit_direct.csv", report.direct);
    write_attribution_csv(config.out_dir + "/audit_indirect.csv", report.indirect);
    json manifest{{"seed", config.seed},
                  {"n_samples", config.audit.n_samples},
                  {"n_background", config.audit.n_background},
                  {"max_instances", config.audit.max_instances},
                  {"direct_exhaustive", report.direct.exhaustive},
                  {"indirect_exhaustive", report.indirect.exhaustive},
                  {"dataset_hash", hex64(hash_dataset(ds))},
                  {"config_hash", hex64(hash_string(config.raw_text))}};
    write_text(config.out_dir + "/audit_manifest.json", manifest.dump(2) + "\n");
    std::cout << "audit reports written to " << config.out_dir << "\n";
    return 0;
}

int cmd_gen_data(const ExperimentConfig& config) {
    const Dataset ds = load_dataset(config);
    ensure_out_dir(config.out_dir);
    export_dataset_csv(ds, config.out_dir + "/dataset.csv");
    const SchemaConfig schema = exported_dataset_schema(ds);
    json sj{{"label_column", schema.label_column},
            {"label_positive", schema.label_positive},
            {"protected_columns", schema.protected_columns},
            {"protected_positive", schema.protected_positive},
            {"categorical_columns", schema.categorical_columns},
            {"drop_columns", schema.drop_columns}};
    write_text(config.out_dir + "/schema.json", sj.dump(2) + "\n");
    std::cout << "wrote " << ds.rows() << " rows to " << config.out_dir << "/dataset.csv\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"FRIED experiment driver"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::string model_path;
    bool shuffled_control = false;

    auto add_common = [&](CLI::App* cmd, bool needs_model) {
        cmd->add_option("--config", config_path, "experiment config JSON")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", seed, "seed (overrides config)");
        if (needs_model)
            cmd->add_option("--model", model_path, "trained model file")->required();
    };

    CLI::App* train_cmd = app.add_subcommand("train", "train a model");
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a trained representation");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "beta/lambda trade-off sweep");
    CLI::App* cmi_cmd = app.add_subcommand("cmi", "separability (CMI) report");
    CLI::App* audit_cmd = app.add_subcommand("audit", "direct/indirect influence reports");
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
    add_common(train_cmd, false);
    add_common(eval_cmd, true);
    add_common(sweep_cmd, false);
    add_common(cmi_cmd, true);
    add_common(audit_cmd, true);
    add_common(gen_cmd, false);
    cmi_cmd->add_flag("--shuffled-control", shuffled_control,
                      "shuffle the latent rows first (negative control)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const ExperimentConfig config = parse_config(config_path, out_dir, seed);
        if (train_cmd->parsed()) return cmd_train(config);
        if (eval_cmd->parsed()) return cmd_eval(config, model_path);
        if (sweep_cmd->parsed()) return cmd_sweep(config);
        if (cmi_cmd->parsed()) return cmd_cmi(config, model_path, shuffled_control);
        if (audit_cmd->parsed()) return cmd_audit(config, model_path);
        if (gen_cmd->parsed()) return cmd_gen_data(config);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace fried

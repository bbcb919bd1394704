#include "fried/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "fried/errors.hpp"

namespace fried {

namespace {

using nlohmann::json;

json mlp_to_json(const MlpParams& params) {
    json layers = json::array();
    for (const auto& l : params.layers) {
        layers.push_back({{"in", l.w.rows()},
                          {"out", l.w.cols()},
                          {"activation", activation_name(l.act)},
                          {"w", l.w.data()},
                          {"b", l.b}});
    }
    return layers;
}

MlpParams mlp_from_json(const json& j) {
    MlpParams params;
    for (const auto& lj : j) {
        Layer l;
        const auto rows = lj.at("in").get<std::size_t>();
        const auto cols = lj.at("out").get<std::size_t>();
        l.w = Matrix(rows, cols, lj.at("w").get<std::vector<double>>());
        l.b = lj.at("b").get<std::vector<double>>();
        if (l.b.size() != cols) throw DataError("model file: bias width mismatch");
        l.act = activation_from_name(lj.at("activation").get<std::string>());
        params.layers.push_back(std::move(l));
    }
    return params;
}

json preprocessing_to_json(const Preprocessing& prep) {
    json cols = json::array();
    for (const auto& c : prep.columns) {
        const char* kind = c.kind == ColumnTransform::Kind::numeric ? "numeric"
                           : c.kind == ColumnTransform::Kind::onehot ? "onehot"
                                                                     : "raw";
        cols.push_back({{"kind", kind},
                        {"source", c.source},
                        {"level", c.level},
                        {"mean", c.mean},
                        {"stddev", c.stddev}});
    }
    return {{"columns", cols}, {"rows_dropped", prep.rows_dropped}, {"extra", prep.extra}};
}

Preprocessing preprocessing_from_json(const json& j) {
    Preprocessing prep;
    for (const auto& cj : j.at("columns")) {
        ColumnTransform c;
        const auto kind = cj.at("kind").get<std::string>();
        c.kind = kind == "numeric" ? ColumnTransform::Kind::numeric
                 : kind == "onehot" ? ColumnTransform::Kind::onehot
                                    : ColumnTransform::Kind::raw;
        c.source = cj.at("source").get<std::string>();
        c.level = cj.at("level").get<std::string>();
        c.mean = cj.at("mean").get<double>();
        c.stddev = cj.at("stddev").get<double>();
        prep.columns.push_back(std::move(c));
    }
    prep.rows_dropped = j.at("rows_dropped").get<std::size_t>();
    prep.extra = j.at("extra").get<std::map<std::string, double>>();
    return prep;
}

}  // namespace

std::string model_to_json(const FriedModel& model) {
    json j;
    j["format"] = "fried-model";
    j["version"] = 1;
    j["feature_dim"] = model.feature_dim;
    j["protected_dim"] = model.protected_dim;
    j["latent_dim"] = model.latent_dim;
    j["beta"] = model.beta;
    j["lambda"] = model.lambda;
    j["seed"] = model.seed;
    j["encoder"] = mlp_to_json(model.encoder);
    j["decoder"] = mlp_to_json(model.decoder);
    j["critic_dis"] = mlp_to_json(model.critic_dis);
    j["critic_i"] = mlp_to_json(model.critic_i);
    j["preprocessing"] = preprocessing_to_json(model.preprocessing);
    return j.dump(2) + "\n";
}

FriedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("model file: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "fried-model")
            throw DataError("model file: not a fried-model container");
        if (j.at("version").get<int>() != 1)
            throw DataError("model file: unsupported version");
        FriedModel model;
        model.feature_dim = j.at("feature_dim").get<std::size_t>();
        model.protected_dim = j.at("protected_dim").get<std::size_t>();
        model.latent_dim = j.at("latent_dim").get<std::size_t>();
        model.beta = j.at("beta").get<double>();
        model.lambda = j.at("lambda").get<double>();
        model.seed = j.at("seed").get<std::uint64_t>();
        model.encoder = mlp_from_json(j.at("encoder"));
        model.decoder = mlp_from_json(j.at("decoder"));
        model.critic_dis = mlp_from_json(j.at("critic_dis"));
        model.critic_i = mlp_from_json(j.at("critic_i"));
        model.preprocessing = preprocessing_from_json(j.at("preprocessing"));
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("model file: missing or mistyped field: ") + e.what());
    }
}

void save_model(const FriedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << model_to_json(model);
}

FriedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace fried

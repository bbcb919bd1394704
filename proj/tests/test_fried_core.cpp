#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fried/errors.hpp"
#include "fried/model.hpp"
#include "fried/model_io.hpp"
#include "fried/synth.hpp"
#include "fried/train.hpp"

using namespace fried;

namespace {

MlpParams single_layer(Matrix w, std::vector<double> b, Activation act) {
    MlpParams params;
    params.layers.push_back({std::move(w), std::move(b), act});
    return params;
}

// 2-feature model whose encoder/decoder pass features through untouched and
// whose critics sit exactly at the fooled targets.
FriedModel passthrough_model(double critic_dis_bias) {
    FriedModel model;
    model.feature_dim = 2;
    model.protected_dim = 1;
    model.latent_dim = 2;
    model.encoder = single_layer(Matrix{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}}, {0.0, 0.0},
                                 Activation::identity);
    model.decoder = single_layer(Matrix{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}}, {0.0, 0.0},
                                 Activation::identity);
    model.critic_dis = single_layer(Matrix{{0.0}, {0.0}}, {critic_dis_bias}, Activation::identity);
    model.critic_i =
        single_layer(Matrix{{0.0}, {0.0}, {0.0}}, {0.0}, Activation::identity);
    model.beta = 1.0;
    model.lambda = 1.0;
    return model;
}

// Minimal plain autoencoder trainer used as the bit-level reference for the
// vanilla ablation; mirrors only the public contract (shuffle, batch, MSE
// on (x,p) -> x, SGD), not the library's internals.
FriedModel reference_plain_ae(const Dataset& ds, const TrainConfig& config) {
    Rng rng(config.seed);
    FriedModel model = make_fried_model(ds.x.cols(), ds.p.cols(), config.latent_dim,
                                        config.hidden, 0.0, 0.0, rng);
    const std::size_t n = ds.rows();
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto order = rng.permutation(n);
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t m = std::min(config.batch_size, n - start);
            std::vector<std::size_t> idx(order.begin() + start, order.begin() + start + m);
            const Matrix x = ds.x.take_rows(idx);
            const Matrix p = ds.p.take_rows(idx);

            ForwardCache ce, cd;
            const Matrix z = mlp_forward(model.encoder, hcat(x, p), &ce);
            const Matrix xhat = mlp_forward(model.decoder, hcat(z, p), &cd);
            Matrix up(xhat.rows(), xhat.cols());
            const double scale = 2.0 / static_cast<double>(xhat.size());
            for (std::size_t i = 0; i < up.size(); ++i)
                up.data()[i] = scale * (xhat.data()[i] - x.data()[i]);

            MlpGrads gd = zero_grads(model.decoder);
            const Matrix ddec_in = mlp_backward(model.decoder, cd, up, gd);
            MlpGrads ge = zero_grads(model.encoder);
            mlp_backward(model.encoder, ce, ddec_in.slice_cols(0, model.latent_dim), ge);
            // the vanilla path still runs a zero-gradient pass for the pair slot
            MlpGrads ge2 = zero_grads(model.encoder);
            ForwardCache ce2;
            mlp_forward(model.encoder, hcat(x, p), &ce2);
            mlp_backward(model.encoder, ce2, Matrix(z.rows(), z.cols()), ge2);
            ge.add_scaled(ge2, 1.0);

            sgd_step(model.encoder, ge, config.learning_rate);
            sgd_step(model.decoder, gd, config.learning_rate);
        }
    }
    return model;
}

Batch random_batch(std::size_t n, std::size_t d, std::size_t dp, double alpha, Rng& rng) {
    Batch batch;
    batch.x1 = Matrix(n, d);
    batch.x2 = Matrix(n, d);
    batch.p = Matrix(n, dp);
    batch.p2 = Matrix(n, dp);
    for (double& v : batch.x1.data()) v = rng.uniform(-1, 1);
    for (double& v : batch.x2.data()) v = rng.uniform(-1, 1);
    for (double& v : batch.p.data()) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    for (double& v : batch.p2.data()) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    batch.alpha = alpha;
    return batch;
}

}  // namespace

TEST_CASE("model construction chains dimensions") {
    Rng rng(0);
    const FriedModel model = make_fried_model(5, 2, 3, {8, 4}, 0.5, 0.25, rng);
    CHECK(model.encoder.input_dim() == 7);
    CHECK(model.encoder.output_dim() == 3);
    CHECK(model.decoder.input_dim() == 5);
    CHECK(model.decoder.output_dim() == 5);
    CHECK(model.critic_dis.input_dim() == 3);
    CHECK(model.critic_dis.output_dim() == 2);
    CHECK(model.critic_i.input_dim() == 7);
    CHECK(model.critic_i.output_dim() == 1);

    FriedModel broken = model;
    broken.latent_dim = 4;
    CHECK_THROWS_AS(broken.validate(), ConfigError);
}

TEST_CASE("encode is deterministic and honors zero weights") {
    FriedModel model = passthrough_model(0.5);
    // zero-weight encoder: output is the bias pattern regardless of the input
    for (auto& layer : model.encoder.layers)
        for (double& v : layer.w.data()) v = 0.0;
    model.encoder.layers.back().b = {0.7, -0.3};
    const Matrix z = encode(model, Matrix{{5.0, -2.0}, {0.0, 0.0}}, Matrix{{1.0}, {0.0}});
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(z(r, 0) == 0.7);
        CHECK(z(r, 1) == -0.3);
    }

    Rng rng(0);
    const FriedModel m2 = make_fried_model(2, 1, 2, {4}, 1, 1, rng);
    const Matrix x{{0.3, -0.8}};
    const Matrix p{{1.0}};
    CHECK(encode(m2, x, p) == encode(m2, x, p));
    CHECK_THROWS_AS(encode(m2, Matrix{{1.0}}, p), ConfigError);
}

TEST_CASE("encode matches an independent scalar oracle") {
    Rng rng(0);
    const FriedModel model = make_fried_model(2, 1, 2, {3}, 1, 1, rng);
    const Matrix z = encode(model, Matrix{{0.4, -0.2}}, Matrix{{1.0}});

    // hand-rolled forward: relu hidden then identity output
    const std::vector<double> in{0.4, -0.2, 1.0};
    const auto& l0 = model.encoder.layers[0];
    std::vector<double> h(3, 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
        double acc = l0.b[j];
        for (std::size_t i = 0; i < 3; ++i) acc += in[i] * l0.w(i, j);
        h[j] = acc > 0.0 ? acc : 0.0;
    }
    const auto& l1 = model.encoder.layers[1];
    for (std::size_t j = 0; j < 2; ++j) {
        double acc = l1.b[j];
        for (std::size_t i = 0; i < 3; ++i) acc += h[i] * l1.w(i, j);
        CHECK(z(0, j) == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("mix endpoints, midpoint and linearity in alpha") {
    const Matrix z1{{0.0, 2.0}};
    const Matrix z2{{2.0, 0.0}};
    CHECK(mix(z1, z2, 1.0) == z1);
    CHECK(mix(z1, z2, 0.0) == z2);
    const Matrix mid = mix(z1, z2, 0.5);
    CHECK(mid(0, 0) == 1.0);
    CHECK(mid(0, 1) == 1.0);

    // linear in alpha: the three collinear evaluations satisfy the chord rule
    const Matrix a = mix(z1, z2, 0.25);
    const Matrix b = mix(z1, z2, 0.50);
    const Matrix c = mix(z1, z2, 0.75);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(a(0, i) + c(0, i) == doctest::Approx(2.0 * b(0, i)).epsilon(1e-12));

    CHECK_THROWS_AS(mix(z1, z2, 1.5), ConfigError);
    CHECK_THROWS_AS(mix(z1, Matrix{{1.0}}, 0.5), ConfigError);
}

TEST_CASE("decode bias pattern and determinism") {
    FriedModel model = passthrough_model(0.5);
    for (auto& layer : model.decoder.layers)
        for (double& v : layer.w.data()) v = 0.0;
    model.decoder.layers.back().b = {1.5, -2.5};
    const Matrix xhat = decode(model, Matrix{{9.0, 9.0}}, Matrix{{1.0}});
    CHECK(xhat(0, 0) == 1.5);
    CHECK(xhat(0, 1) == -2.5);
    CHECK_THROWS_AS(decode(model, Matrix{{1.0}}, Matrix{{1.0}}), ConfigError);
}

TEST_CASE("critic_dis_loss examples") {
    // critic that copies the first latent column reproduces p exactly
    FriedModel model = passthrough_model(0.0);
    model.critic_dis = single_layer(Matrix{{1.0}, {0.0}}, {0.0}, Activation::identity);
    const Matrix zprime{{1.0, 0.3}, {0.0, -0.4}};
    const Matrix p{{1.0}, {0.0}};
    CHECK(critic_dis_loss(model, zprime, p) == 0.0);

    // constant critic at 0.5 on balanced 0/1 labels
    model.critic_dis = single_layer(Matrix{{0.0}, {0.0}}, {0.5}, Activation::identity);
    CHECK(critic_dis_loss(model, zprime, p) == doctest::Approx(0.25).epsilon(1e-15));

    // random instance against the direct formula
    Rng rng(8);
    const FriedModel m2 = make_fried_model(2, 1, 2, {4}, 1, 1, rng);
    Matrix z(5, 2), pp(5, 1);
    for (double& v : z.data()) v = rng.uniform(-1, 1);
    for (double& v : pp.data()) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const Matrix phat = mlp_forward(m2.critic_dis, z);
    double expected = 0.0;
    for (std::size_t r = 0; r < 5; ++r) expected += (pp(r, 0) - phat(r, 0)) * (pp(r, 0) - phat(r, 0));
    expected /= 5.0;
    CHECK(critic_dis_loss(m2, z, pp) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("critic_i_loss examples") {
    FriedModel model = passthrough_model(0.0);
    // critic pinned at the coefficient value: zero error
    model.critic_i = single_layer(Matrix{{0.0}, {0.0}, {0.0}}, {0.4}, Activation::identity);
    const Matrix xhat{{0.1, 0.2}, {0.3, 0.4}};
    const Matrix p{{1.0}, {0.0}};
    CHECK(critic_i_loss(model, xhat, p, 0.4) == 0.0);

    // critic stuck at zero against alpha = 0.5
    model.critic_i = single_layer(Matrix{{0.0}, {0.0}, {0.0}}, {0.0}, Activation::identity);
    CHECK(critic_i_loss(model, xhat, p, 0.5) == doctest::Approx(0.25).epsilon(1e-15));

    Rng rng(9);
    const FriedModel m2 = make_fried_model(2, 1, 2, {4}, 1, 1, rng);
    const Matrix ahat = mlp_forward(m2.critic_i, hcat(xhat, p));
    double expected = 0.0;
    for (std::size_t r = 0; r < 2; ++r) expected += (0.7 - ahat(r, 0)) * (0.7 - ahat(r, 0));
    expected /= 2.0;
    CHECK(critic_i_loss(m2, xhat, p, 0.7) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("autoencoder_loss limits") {
    Rng rng(12);
    FriedModel model = make_fried_model(3, 1, 2, {5}, 0.0, 0.0, rng);
    Batch batch = random_batch(6, 3, 1, 0.3, rng);
    const LossParts parts = autoencoder_loss(model, batch);
    CHECK(parts.total == parts.reconstruction);
    CHECK(parts.disentanglement_term == 0.0);
    CHECK(parts.interpolation_term == 0.0);

    // perfect reconstruction with critics at their fooled targets
    FriedModel perfect = passthrough_model(0.5);
    Batch b2;
    b2.x1 = Matrix{{0.2, -0.6}, {0.9, 0.1}};
    b2.x2 = b2.x1;
    b2.p = Matrix{{1.0}, {0.0}};  // batch mean 0.5 = the critic's constant output
    b2.p2 = b2.p;
    b2.alpha = 0.5;  // halving keeps the equal-latent mix exact in floating point
    const LossParts zero = autoencoder_loss(perfect, b2);
    CHECK(zero.reconstruction == 0.0);
    CHECK(zero.disentanglement_term == 0.0);
    CHECK(zero.interpolation_term == 0.0);
    CHECK(zero.total == 0.0);
}

TEST_CASE("autoencoder objective gradients verify numerically in both modes") {
    for (const bool literal : {false, true}) {
        Rng rng(literal ? 21 : 20);
        FriedModel model = make_fried_model(3, 1, 2, {4}, 0.7, 0.4, rng);
        const Batch batch = random_batch(4, 3, 1, 0.35, rng);

        FriedGrads grads = zero_grads(model);
        autoencoder_loss_grads(model, batch, grads, std::nullopt, literal);

        FriedModel probe = model;
        const double err = gradcheck(
            [&probe, &batch, literal](const std::vector<double>& flat) {
                unflatten_parameters(probe, flat);
                return autoencoder_loss(probe, batch, std::nullopt, literal).total;
            },
            flatten_parameters(model), flatten_grads(grads, model), 1e-5);
        CHECK(err < 1e-4);
    }
}

TEST_CASE("vanilla training reconstructs a linearly autoencodable dataset") {
    Rng rng(33);
    Dataset ds;
    ds.x = Matrix(60, 2);
    for (double& v : ds.x.data()) v = rng.uniform(-1, 1);
    ds.p = Matrix(60, 1);
    for (std::size_t r = 0; r < 60; ++r) ds.p(r, 0) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    ds.y.assign(60, 0);
    for (std::size_t r = 0; r < 30; ++r) ds.y[r] = 1;

    TrainConfig config;
    config.epochs = 800;
    config.batch_size = 10;
    config.learning_rate = 0.1;
    config.ablation = Ablation::vanilla_ae;
    config.hidden = {16};
    config.latent_dim = 2;
    config.seed = 5;

    const TrainResult result = train(ds, config);
    CHECK(result.history.size() == 800);
    CHECK(result.history.back().reconstruction < 1e-3);
    for (const auto& r : result.history) {
        CHECK(std::isfinite(r.total));
        CHECK(r.total >= 0.0);
    }
}

TEST_CASE("training is deterministic") {
    const Dataset ds = synth_bias_dataset(200, 0.6, 0.1, 40);
    TrainConfig config;
    config.epochs = 6;
    config.batch_size = 50;
    config.learning_rate = 0.01;
    config.beta = 1.0;
    config.lambda = 0.5;
    config.hidden = {10, 5};
    config.latent_dim = 3;
    config.seed = 99;

    const TrainResult a = train(ds, config);
    const TrainResult b = train(ds, config);
    CHECK(a.model.encoder == b.model.encoder);
    CHECK(a.model.decoder == b.model.decoder);
    CHECK(a.model.critic_dis == b.model.critic_dis);
    CHECK(a.model.critic_i == b.model.critic_i);
    for (std::size_t e = 0; e < a.history.size(); ++e)
        CHECK(a.history[e].total == b.history[e].total);
}

TEST_CASE("vanilla ablation equals a reference plain autoencoder bit for bit") {
    const Dataset ds = synth_bias_dataset(120, 0.5, 0.1, 41);
    TrainConfig config;
    config.epochs = 8;
    config.batch_size = 30;
    config.learning_rate = 0.02;
    config.ablation = Ablation::vanilla_ae;
    config.hidden = {6};
    config.latent_dim = 3;
    config.seed = 7;

    const TrainResult run = train(ds, config);
    const FriedModel reference = reference_plain_ae(ds, config);
    CHECK(run.model.encoder == reference.encoder);
    CHECK(run.model.decoder == reference.decoder);
}

TEST_CASE("each critic step descends its own objective on the same batch") {
    Rng rng(50);
    const Dataset ds = synth_bias_dataset(100, 0.6, 0.1, 42);
    FriedModel model;
    {
        Rng init(3);
        model = make_fried_model(ds.x.cols(), 1, 3, {8}, 1.0, 1.0, init);
    }
    for (int trial = 0; trial < 10; ++trial) {
        Batch batch = random_batch(20, ds.x.cols(), 1, rng.uniform01(), rng);
        const Matrix z1 = encode(model, batch.x1, batch.p);
        const Matrix z2 = encode(model, batch.x2, batch.p2);
        const Matrix zprime = mix(z1, z2, batch.alpha);
        const double before_dis = critic_dis_step(model, zprime, batch.p, 1e-3);
        CHECK(critic_dis_loss(model, zprime, batch.p) <= before_dis + 1e-12);

        const Matrix xhat = decode(model, zprime, batch.p);
        const double before_i = critic_i_step(model, xhat, batch.p, batch.alpha, 1e-3);
        CHECK(critic_i_loss(model, xhat, batch.p, batch.alpha) <= before_i + 1e-12);
    }
}

TEST_CASE("training diverges loudly at an absurd learning rate") {
    const Dataset ds = synth_bias_dataset(100, 0.5, 0.0, 43);
    TrainConfig config;
    config.epochs = 20;
    config.batch_size = 25;
    config.learning_rate = 1e6;
    config.hidden = {8};
    config.latent_dim = 3;
    config.seed = 1;
    CHECK_THROWS_AS(train(ds, config), DivergenceError);
}

TEST_CASE("infer is the mix-free path") {
    Rng rng(60);
    const FriedModel model = make_fried_model(3, 1, 2, {5}, 1, 1, rng);
    Matrix x(4, 3), p(4, 1);
    for (double& v : x.data()) v = rng.uniform(-1, 1);
    for (double& v : p.data()) v = rng.bernoulli(0.5) ? 1.0 : 0.0;

    const InferResult result = infer(model, x, p);
    CHECK(result.xprime == encode(model, x, p));
    CHECK(result.xhat == decode(model, result.xprime, p));

    // constant inputs give constant latent rows
    Matrix xc(4, 3), pc(4, 1);
    for (double& v : xc.data()) v = 0.5;
    for (double& v : pc.data()) v = 1.0;
    const InferResult flat = infer(model, xc, pc);
    for (std::size_t r = 1; r < 4; ++r)
        for (std::size_t c = 0; c < 2; ++c) CHECK(flat.xprime(r, c) == flat.xprime(0, c));
}

TEST_CASE("inference error stays close to the training error") {
    const Dataset ds = synth_bias_dataset(300, 0.5, 0.1, 44);
    TrainConfig config;
    config.epochs = 40;
    config.batch_size = 50;
    config.learning_rate = 0.02;
    config.beta = 0.5;
    config.lambda = 0.5;
    config.hidden = {12};
    config.latent_dim = 3;
    config.seed = 2;
    const TrainResult run = train(ds, config);
    const InferResult result = infer(run.model, ds.x, ds.p);
    const double mse = mean_squared_error(ds.x, result.xhat);
    CHECK(mse <= run.history.back().reconstruction * 1.5);
}

TEST_CASE("model serialization round-trips bit-exactly") {
    const Dataset ds = synth_bias_dataset(100, 0.6, 0.1, 45);
    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 25;
    config.hidden = {6};
    config.latent_dim = 3;
    config.seed = 11;
    const TrainResult run = train(ds, config);

    const std::string path = "/tmp/fried_test_model.json";
    save_model(run.model, path);
    const FriedModel loaded = load_model(path);
    CHECK(loaded.encoder == run.model.encoder);
    CHECK(loaded.decoder == run.model.decoder);
    CHECK(loaded.critic_dis == run.model.critic_dis);
    CHECK(loaded.critic_i == run.model.critic_i);
    CHECK(loaded.beta == run.model.beta);
    CHECK(loaded.lambda == run.model.lambda);
    CHECK(loaded.seed == run.model.seed);
    CHECK(loaded.preprocessing.columns.size() == run.model.preprocessing.columns.size());

    CHECK(model_to_json(loaded) == model_to_json(run.model));

    CHECK_THROWS_AS(model_from_json("{not json"), DataError);
    CHECK_THROWS_AS(model_from_json("{\"format\":\"other\"}"), DataError);
    std::remove(path.c_str());
}

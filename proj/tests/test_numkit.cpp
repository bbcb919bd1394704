#include <doctest.h>

#include <cmath>

#include "fried/errors.hpp"
#include "fried/matrix.hpp"
#include "fried/mlp.hpp"
#include "fried/rng.hpp"

using namespace fried;

namespace {

// Scalar-by-scalar forward pass, independent of the library's batched path.
std::vector<double> naive_forward(const MlpParams& params, const std::vector<double>& input) {
    std::vector<double> a = input;
    for (const auto& layer : params.layers) {
        std::vector<double> z(layer.w.cols(), 0.0);
        for (std::size_t j = 0; j < layer.w.cols(); ++j) {
            double acc = layer.b[j];
            for (std::size_t i = 0; i < layer.w.rows(); ++i) acc += a[i] * layer.w(i, j);
            switch (layer.act) {
                case Activation::identity: z[j] = acc; break;
                case Activation::relu: z[j] = acc > 0.0 ? acc : 0.0; break;
                case Activation::sigmoid: z[j] = 1.0 / (1.0 + std::exp(-acc)); break;
            }
        }
        a = std::move(z);
    }
    return a;
}

double mlp_mse_loss(const MlpParams& params, const Matrix& x, const Matrix& target) {
    return mean_squared_error(target, mlp_forward(params, x));
}

}  // namespace

TEST_CASE("matrix basics") {
    Matrix m{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m(1, 0) == 3.0);
    CHECK_THROWS_AS(Matrix(2, 3, std::vector<double>(5, 0.0)), std::invalid_argument);

    const Matrix prod = matmul(m, Matrix{{1.0, 0.0}, {0.0, 1.0}});
    CHECK(prod == m);

    // matmul against an index-by-index oracle on a random pair
    Rng rng(11);
    Matrix a(3, 4), b(4, 5);
    for (double& v : a.data()) v = rng.uniform(-1, 1);
    for (double& v : b.data()) v = rng.uniform(-1, 1);
    const Matrix ab = matmul(a, b);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 4; ++k) acc += a(i, k) * b(k, j);
            CHECK(ab(i, j) == doctest::Approx(acc).epsilon(1e-12));
        }
    CHECK(matmul_transpose_a(a, matmul(a, b)).rows() == 4);

    const Matrix h = hcat(a, Matrix(3, 2));
    CHECK(h.cols() == 6);
    CHECK(h(2, 3) == a(2, 3));
    CHECK_THROWS_AS(hcat(a, Matrix(2, 2)), std::invalid_argument);
}

TEST_CASE("rng determinism and ranges") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        all_equal &= va == b.next_u64();
        any_diff |= va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);

    Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }

    auto perm = r.permutation(50);
    std::vector<bool> seen(50, false);
    for (auto i : perm) seen[i] = true;
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool x) { return x; }));

    for (int trial = 0; trial < 20; ++trial) {
        const auto d = r.derangement(17);
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] != i);
    }
}

TEST_CASE("mlp_forward identity and sigmoid units") {
    MlpParams identity_net;
    identity_net.layers.push_back({Matrix{{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0},
                                   Activation::identity});
    const Matrix out = mlp_forward(identity_net, Matrix{{1.0, 2.0}});
    CHECK(out(0, 0) == 1.0);
    CHECK(out(0, 1) == 2.0);

    MlpParams sigmoid_unit;
    sigmoid_unit.layers.push_back({Matrix{{0.0}}, {0.0}, Activation::sigmoid});
    CHECK(mlp_forward(sigmoid_unit, Matrix{{123.0}})(0, 0) == 0.5);
    CHECK(mlp_forward(sigmoid_unit, Matrix{{-5.0}})(0, 0) == 0.5);

    CHECK_THROWS_AS(mlp_forward(identity_net, Matrix{{1.0, 2.0, 3.0}}), ConfigError);
}

TEST_CASE("mlp_forward matches a scalar re-implementation") {
    Rng rng(0);
    const MlpParams net = make_mlp({2, 4, 3}, {Activation::relu, Activation::identity}, rng);
    const Matrix out = mlp_forward(net, Matrix{{1.0, 1.0}});
    const auto expected = naive_forward(net, {1.0, 1.0});
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(out(0, j) == doctest::Approx(expected[j]).epsilon(1e-12));
}

TEST_CASE("mlp_backward zero upstream and closed form") {
    Rng rng(1);
    MlpParams net = make_mlp({3, 5, 2}, {Activation::relu, Activation::identity}, rng);
    Matrix x(4, 3);
    for (double& v : x.data()) v = rng.uniform(-1, 1);

    ForwardCache cache;
    mlp_forward(net, x, &cache);
    MlpGrads grads = zero_grads(net);
    mlp_backward(net, cache, Matrix(4, 2), grads);
    for (const auto& gw : grads.w)
        for (double v : gw.data()) CHECK(v == 0.0);

    // One identity layer, squared loss: dL/dinput = 2 (out - target) W^T
    MlpParams lin;
    lin.layers.push_back({Matrix{{2.0, 1.0}, {0.5, -1.0}}, {0.1, -0.2}, Activation::identity});
    const Matrix input{{1.0, 2.0}};
    const Matrix target{{0.0, 0.0}};
    ForwardCache c2;
    const Matrix out = mlp_forward(lin, input, &c2);
    Matrix upstream(1, 2);
    for (std::size_t j = 0; j < 2; ++j) upstream(0, j) = 2.0 * (out(0, j) - target(0, j));
    MlpGrads g2 = zero_grads(lin);
    const Matrix dinput = mlp_backward(lin, c2, upstream, g2);
    for (std::size_t i = 0; i < 2; ++i) {
        double expected = 0.0;
        for (std::size_t j = 0; j < 2; ++j)
            expected += 2.0 * (out(0, j) - target(0, j)) * lin.layers[0].w(i, j);
        CHECK(dinput(0, i) == doctest::Approx(expected).epsilon(1e-12));
    }

    // stale cache: wrong number of recorded activations
    ForwardCache stale;
    stale.acts = {x};
    CHECK_THROWS_AS(mlp_backward(net, stale, Matrix(4, 2), grads), std::invalid_argument);
}

TEST_CASE("mlp gradients agree with central finite differences") {
    Rng rng(3);
    MlpParams net = make_mlp({3, 6, 2}, {Activation::relu, Activation::sigmoid}, rng);
    Matrix x(5, 3), target(5, 2);
    for (double& v : x.data()) v = rng.uniform(-1, 1);
    for (double& v : target.data()) v = rng.uniform(0.2, 0.8);

    ForwardCache cache;
    const Matrix out = mlp_forward(net, x, &cache);
    Matrix upstream(5, 2);
    const double scale = 2.0 / static_cast<double>(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        upstream.data()[i] = scale * (out.data()[i] - target.data()[i]);
    MlpGrads grads = zero_grads(net);
    mlp_backward(net, cache, upstream, grads);

    std::vector<double> analytic;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        analytic.insert(analytic.end(), grads.w[l].data().begin(), grads.w[l].data().end());
        analytic.insert(analytic.end(), grads.b[l].begin(), grads.b[l].end());
    }
    MlpParams probe = net;
    const double err = gradcheck(
        [&probe, &x, &target](const std::vector<double>& flat) {
            unflatten(probe, flat);
            return mlp_mse_loss(probe, x, target);
        },
        flatten(net), analytic, 1e-5);
    CHECK(err < 1e-4);
}

TEST_CASE("sgd_step arithmetic and convergence") {
    MlpParams net;
    net.layers.push_back({Matrix{{1.0}}, {0.5}, Activation::identity});
    MlpGrads grads = zero_grads(net);
    grads.w[0](0, 0) = 2.0;

    MlpParams unchanged = net;
    sgd_step(unchanged, grads, 0.0);
    CHECK(unchanged == net);

    sgd_step(net, grads, 0.01);
    CHECK(net.layers[0].w(0, 0) == doctest::Approx(0.98).epsilon(1e-15));

    // f(w) = (w - 3)^2 is convex; 200 steps at lr 0.1 reach the minimum.
    double w = 0.0;
    MlpParams scalar;
    scalar.layers.push_back({Matrix{{w}}, {0.0}, Activation::identity});
    for (int step = 0; step < 200; ++step) {
        MlpGrads g = zero_grads(scalar);
        g.w[0](0, 0) = 2.0 * (scalar.layers[0].w(0, 0) - 3.0);
        sgd_step(scalar, g, 0.1);
    }
    CHECK(std::abs(scalar.layers[0].w(0, 0) - 3.0) < 1e-6);

    MlpGrads bad = zero_grads(scalar);
    bad.w[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sgd_step(scalar, bad, 0.1), DivergenceError);
}

TEST_CASE("gradcheck on quadratic and constant losses") {
    Rng rng(5);
    MlpParams net = make_mlp({2, 3, 1}, {Activation::identity, Activation::identity}, rng);
    const auto flat = flatten(net);

    // Quadratic in the parameters: central differences are exact up to rounding.
    std::vector<double> analytic(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) analytic[i] = 2.0 * flat[i];
    const double err_quadratic = gradcheck(
        [](const std::vector<double>& p) {
            double acc = 0.0;
            for (double v : p) acc += v * v;
            return acc;
        },
        flat, analytic, 1e-5);
    CHECK(err_quadratic < 1e-7);

    const double err_constant = gradcheck(
        [](const std::vector<double>&) { return 1.25; }, flat,
        std::vector<double>(flat.size(), 0.0), 1e-5);
    CHECK(err_constant < 1e-8);

    CHECK_THROWS_AS(gradcheck([](const std::vector<double>&) { return 0.0; }, flat,
                              std::vector<double>(flat.size(), 0.0), 0.0),
                    std::invalid_argument);
}

TEST_CASE("shapes survive forward/backward round trips and init is deterministic") {
    Rng r1(9), r2(9);
    const MlpParams a = make_mlp({4, 8, 3}, {Activation::relu, Activation::identity}, r1);
    const MlpParams b = make_mlp({4, 8, 3}, {Activation::relu, Activation::identity}, r2);
    CHECK(a == b);

    MlpParams net = a;
    Rng rng(10);
    Matrix x(6, 4);
    for (double& v : x.data()) v = rng.uniform(-2, 2);
    for (int iter = 0; iter < 3; ++iter) {
        ForwardCache cache;
        const Matrix out = mlp_forward(net, x, &cache);
        Matrix upstream(out.rows(), out.cols());
        for (double& v : upstream.data()) v = 0.01;
        MlpGrads grads = zero_grads(net);
        mlp_backward(net, cache, upstream, grads);
        sgd_step(net, grads, 0.01);
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            CHECK(net.layers[l].w.rows() == a.layers[l].w.rows());
            CHECK(net.layers[l].w.cols() == a.layers[l].w.cols());
            CHECK(net.layers[l].b.size() == a.layers[l].b.size());
        }
    }
}

#include "fried/classifier.hpp"

#include <cmath>

#include "fried/errors.hpp"

namespace fried {

std::vector<double> BinaryClassifier::predict_proba(const Matrix& x) const {
    const Matrix logits = mlp_forward(net, x);
    std::vector<double> out(logits.rows());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 1.0 / (1.0 + std::exp(-logits(i, 0)));
    return out;
}

std::vector<int> BinaryClassifier::predict(const Matrix& x) const {
    const auto proba = predict_proba(x);
    std::vector<int> out(proba.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = proba[i] > 0.5 ? 1 : 0;
    return out;
}

double BinaryClassifier::accuracy(const Matrix& x, const std::vector<int>& y) const {
    if (y.size() != x.rows()) throw std::invalid_argument("accuracy: label count mismatch");
    if (y.empty()) return 0.0;
    const auto yhat = predict(x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) correct += yhat[i] == y[i];
    return static_cast<double>(correct) / static_cast<double>(y.size());
}

double logistic_loss(const Matrix& logits, const std::vector<int>& y, Matrix* grad) {
    if (logits.cols() != 1 || logits.rows() != y.size())
        throw std::invalid_argument("logistic_loss: shape mismatch");
    const auto n = static_cast<double>(y.size());
    double loss = 0.0;
    if (grad) *grad = Matrix(logits.rows(), 1);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double z = logits(i, 0);
        // log(1 + exp(-|z|)) + max(z,0) - z*y, stable for large |z|
        loss += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - z * y[i];
        if (grad) {
            const double sig = 1.0 / (1.0 + std::exp(-z));
            (*grad)(i, 0) = (sig - y[i]) / n;
        }
    }
    return loss / n;
}

BinaryClassifier train_binary_classifier(const Matrix& x, const std::vector<int>& y,
                                         const ClassifierConfig& cfg, Rng& rng) {
    if (x.rows() != y.size()) throw DataError("classifier: label count mismatch");
    if (x.rows() == 0) throw DataError("classifier: empty training set");
    bool has0 = false, has1 = false;
    for (int v : y) (v ? has1 : has0) = true;
    if (!has0 || !has1) throw DataError("classifier: training labels are single-class");

    std::vector<std::size_t> dims{x.cols()};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(1);
    std::vector<Activation> acts(cfg.hidden.size(), Activation::relu);
    acts.push_back(Activation::identity);  // logits; the sigmoid lives in the loss

    BinaryClassifier clf;
    clf.net = make_mlp(dims, acts, rng);

    const std::size_t n = x.rows();
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = rng.permutation(n);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t m = std::min(cfg.batch_size, n - start);
            std::vector<std::size_t> idx(order.begin() + start, order.begin() + start + m);
            const Matrix xb = x.take_rows(idx);
            std::vector<int> yb(m);
            for (std::size_t i = 0; i < m; ++i) yb[i] = y[idx[i]];

            ForwardCache cache;
            const Matrix logits = mlp_forward(clf.net, xb, &cache);
            Matrix grad;
            logistic_loss(logits, yb, &grad);
            MlpGrads grads = zero_grads(clf.net);
            mlp_backward(clf.net, cache, grad, grads);
            sgd_step(clf.net, grads, cfg.learning_rate);
        }
    }
    return clf;
}

}  // namespace fried

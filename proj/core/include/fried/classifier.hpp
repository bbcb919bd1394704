#ifndef FRIED_CLASSIFIER_HPP
#define FRIED_CLASSIFIER_HPP

#include <cstdint>
#include <vector>

#include "fried/matrix.hpp"
#include "fried/mlp.hpp"
#include "fried/rng.hpp"

namespace fried {

/// MLP binary classifier settings: relu hidden layers, a single logit output,
/// logistic loss, mini-batch SGD.
struct ClassifierConfig {
    std::vector<std::size_t> hidden = {64, 32};
    std::size_t epochs = 200;
    std::size_t batch_size = 128;
    double learning_rate = 0.05;
};

struct BinaryClassifier {
    MlpParams net;  // ends in an identity logit layer

    std::vector<double> predict_proba(const Matrix& x) const;   // sigmoid(logit)
    std::vector<int> predict(const Matrix& x) const;            // threshold 0.5
    double accuracy(const Matrix& x, const std::vector<int>& y) const;
};

/// Logistic loss averaged over rows, and its logit gradients, in the stable
/// logit formulation.
double logistic_loss(const Matrix& logits, const std::vector<int>& y, Matrix* grad = nullptr);

BinaryClassifier train_binary_classifier(const Matrix& x, const std::vector<int>& y,
                                         const ClassifierConfig& cfg, Rng& rng);

}  // namespace fried

#endif

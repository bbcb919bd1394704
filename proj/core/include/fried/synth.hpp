#ifndef FRIED_SYNTH_HPP
#define FRIED_SYNTH_HPP

#include <cstdint>

#include "fried/dataset.hpp"

namespace fried {

/// Tabular dataset with a known, tunable protected-attribute bias.
///
/// Construction: p ~ Bernoulli(1/2); a content class u ~ Bernoulli(1/2)
/// independent of p; the label copies p with probability bias^2 and u
/// otherwise, then flips with probability label_noise. Two informative
/// features are Gaussian around +-0.65 conditioned on u, and one proxy
/// feature equals p plus N(0, 0.1) noise. All columns are standardized.
///
/// bias = 0 makes the label independent of p; bias = 1 with label_noise = 0
/// makes the label equal p exactly. The demographic parity of the Bayes
/// classifier with and without access to p has a closed form, stored in
/// preprocessing.extra (keys "bayes_ddp_with_p", "bayes_ddp_without_p",
/// "prob_y1_given_p0", "prob_y1_given_p1").
Dataset synth_bias_dataset(std::size_t n, double bias, double label_noise, std::uint64_t seed);

enum class ShapeFactor { scale, shape, scale_and_shape };

/// Flattened 16x16 grayscale renderings of a square or a disc with random
/// scale and position; the label is whether the vertical position is in the
/// upper half. The protected attribute is the chosen factor binarized
/// (scale > 0.7 and/or shape == disc). min_scale filters small sprites out.
Dataset synth_shapes_dataset(std::size_t n, ShapeFactor factor, double min_scale,
                             std::uint64_t seed);

/// Sparse bag-of-words counts over a fixed vocabulary: a label-driven topic
/// block, a protected-correlated block, and background tokens. Columns are
/// standardized.
Dataset synth_bow_dataset(std::size_t n, std::size_t vocabulary, std::uint64_t seed);

}  // namespace fried

#endif

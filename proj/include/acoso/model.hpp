#pragma once

#include "acoso/corpus.hpp"
#include "acoso/embeddings.hpp"
#include "acoso/vocab.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

// Convolutional sentence classifier: embedding lookup, parallel 1-D
// convolutions with relu, max-over-time pooling, one sigmoid output unit.
namespace acoso {

inline constexpr double kLossEpsilon = 1e-7;

struct ModelConfig {
    std::size_t max_len = kDefaultMaxLen;
    std::size_t dim = 300;
    std::vector<std::size_t> filter_widths{2, 3, 4};
    std::size_t filters_per_width = 32;
    double learning_rate = 0.5;
    bool fine_tune_embeddings = false;
    std::uint64_t seed = 0;

    /// Throws Error on widths larger than max_len, zero filters and the like.
    void validate() const;
    std::size_t feature_count() const noexcept {
        return filter_widths.size() * filters_per_width;
    }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Filters of one width: weights laid out [filter][offset][dim].
struct ConvBank {
    std::size_t width = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    friend bool operator==(const ConvBank&, const ConvBank&) = default;
};

struct ModelParams {
    ModelConfig config;
    std::vector<ConvBank> conv;
    std::vector<double> dense_weights;
    double dense_bias = 0.0;
    /// Shared between copies; written only through mutable_embedding().
    std::shared_ptr<const EmbeddingMatrix> embedding;

    /// Copy-on-write access used when fine-tuning.
    EmbeddingMatrix& mutable_embedding();

    /// Number of conv and dense parameters (embedding excluded).
    std::size_t dense_parameter_count() const;
};

/// Mirrors ModelParams. Embedding gradients are kept per touched row and are
/// empty unless the config fine-tunes embeddings; row 0 never appears.
struct Gradients {
    std::vector<ConvBank> conv;
    std::vector<double> dense_weights;
    double dense_bias = 0.0;
    std::map<TokenIndex, std::vector<double>> embedding_rows;

    static Gradients zeros_like(const ModelParams& params);
};

/// Glorot-uniform conv and dense weights, zero biases.
ModelParams init_model(const ModelConfig& config, std::shared_ptr<const EmbeddingMatrix> embedding);

/// Probability of the bullying class, strictly inside (0, 1).
double forward(const ModelParams& params, std::span<const TokenIndex> x);

/// Binary cross-entropy with p clamped to [kLossEpsilon, 1 - kLossEpsilon].
double bce_loss(double p, Label y);

struct LossAndGradients {
    double loss = 0.0;
    Gradients grads;
};

/// Analytic gradients. Max-pool routes to the first maximal position; relu'(0) = 0.
LossAndGradients backward(const ModelParams& params, std::span<const TokenIndex> x, Label y);

/// Central differences (L(θ+h) - L(θ-h)) / 2h for every parameter, including
/// the embedding rows referenced by x when fine-tuning.
Gradients numerical_gradient(const ModelParams& params, std::span<const TokenIndex> x, Label y,
                             double step);

struct Example {
    std::span<const TokenIndex> x;
    Label y = Label::clean;
};

struct StepResult {
    ModelParams params;
    double mean_loss = 0.0;
};

/// One plain gradient-descent step on the batch-mean gradient. Examples are
/// combined in a canonical order (sorted by content) so the update does not
/// depend on batch order. Throws TrainingError on non-finite values.
StepResult train_step(const ModelParams& params, std::span<const Example> batch,
                      const ModelConfig& config);

/// In-place variant of train_step; returns the mean batch loss.
double train_step_inplace(ModelParams& params, std::span<const Example> batch,
                          const ModelConfig& config);

struct Prediction {
    Label label = Label::clean;
    double probability = 0.0;
};

/// Bullying iff probability >= 0.5.
inline Label threshold(double probability) {
    return probability >= 0.5 ? Label::bullying : Label::clean;
}

Prediction predict(const ModelParams& params, std::string_view text,
                   const PreprocessConfig& preprocess_config, const Vocabulary& vocab);

/// Flattened conv and dense parameters in canonical order: per bank weights
/// then biases, dense weights, dense bias.
std::vector<double> flatten(const ModelParams& params);
std::vector<double> flatten(const Gradients& grads);

}  // namespace acoso

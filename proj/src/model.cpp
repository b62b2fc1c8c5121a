#include "acoso/model.hpp"

#include "acoso/error.hpp"
#include "acoso/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace acoso {

void ModelConfig::validate() const {
    if (max_len == 0) {
        throw Error("model config: max_len must be at least 1");
    }
    if (dim == 0) {
        throw Error("model config: dim must be at least 1");
    }
    if (filter_widths.empty()) {
        throw Error("model config: at least one filter width is required");
    }
    for (auto w : filter_widths) {
        if (w == 0 || w > max_len) {
            throw Error("model config: filter width " + std::to_string(w) +
                        " must be in [1, max_len=" + std::to_string(max_len) + "]");
        }
    }
    if (filters_per_width == 0) {
        throw Error("model config: filters_per_width must be at least 1");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw Error("model config: learning rate must be finite and non-negative");
    }
}

EmbeddingMatrix& ModelParams::mutable_embedding() {
    if (!embedding) {
        throw Error("model has no embedding matrix");
    }
    if (embedding.use_count() > 1) {
        embedding = std::make_shared<const EmbeddingMatrix>(*embedding);
    }
    return const_cast<EmbeddingMatrix&>(*embedding);
}

std::size_t ModelParams::dense_parameter_count() const {
    std::size_t n = dense_weights.size() + 1;
    for (const auto& bank : conv) {
        n += bank.weights.size() + bank.bias.size();
    }
    return n;
}

Gradients Gradients::zeros_like(const ModelParams& params) {
    Gradients g;
    for (const auto& bank : params.conv) {
        g.conv.push_back({bank.width, std::vector<double>(bank.weights.size(), 0.0),
                          std::vector<double>(bank.bias.size(), 0.0)});
    }
    g.dense_weights.assign(params.dense_weights.size(), 0.0);
    return g;
}

ModelParams init_model(const ModelConfig& config, std::shared_ptr<const EmbeddingMatrix> embedding) {
    config.validate();
    if (!embedding) {
        throw Error("init_model: embedding matrix is required");
    }
    if (embedding->dim != config.dim) {
        throw Error("init_model: embedding dimension " + std::to_string(embedding->dim) +
                    " does not match config dimension " + std::to_string(config.dim));
    }
    if (embedding->rows < 2) {
        throw Error("init_model: embedding matrix needs padding and OOV rows");
    }
    rng::Engine engine(config.seed);
    ModelParams p;
    p.config = config;
    p.embedding = std::move(embedding);
    const auto fan_out = static_cast<double>(config.filters_per_width);
    for (auto width : config.filter_widths) {
        ConvBank bank;
        bank.width = width;
        const auto fan_in = static_cast<double>(width * config.dim);
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        bank.weights.resize(config.filters_per_width * width * config.dim);
        for (auto& w : bank.weights) {
            w = rng::uniform(engine, -a, a);
        }
        bank.bias.assign(config.filters_per_width, 0.0);
        p.conv.push_back(std::move(bank));
    }
    const double a = std::sqrt(6.0 / (static_cast<double>(config.feature_count()) + 1.0));
    p.dense_weights.resize(config.feature_count());
    for (auto& w : p.dense_weights) {
        w = rng::uniform(engine, -a, a);
    }
    p.dense_bias = 0.0;
    return p;
}

namespace {

struct Trace {
    std::vector<double> pooled;
    std::vector<std::size_t> argmax;
    double logit = 0.0;
    double probability = 0.5;
};

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double sigmoid(double z) {
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    return std::clamp(p, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
}

void check_input(const ModelParams& params, std::span<const TokenIndex> x) {
    if (x.size() != params.config.max_len) {
        throw Error("input length " + std::to_string(x.size()) + " does not match max_len " +
                    std::to_string(params.config.max_len));
    }
    const auto rows = static_cast<TokenIndex>(params.embedding->rows);
    for (auto idx : x) {
        if (idx < 0 || idx >= rows) {
            throw Error("token index " + std::to_string(idx) + " outside [0, " +
                        std::to_string(rows - 1) + "]");
        }
    }
}

Trace run_forward(const ModelParams& params, std::span<const TokenIndex> x) {
    check_input(params, x);
    const auto& cfg = params.config;
    const auto& emb = *params.embedding;
    const std::size_t len = x.size();
    const std::size_t dim = cfg.dim;
    const std::size_t nf = cfg.filters_per_width;

    Trace tr;
    tr.pooled.reserve(cfg.feature_count());
    tr.argmax.reserve(cfg.feature_count());

    // proj[k * len + p] = filter row k dotted with the embedding at position p.
    std::vector<double> proj;
    for (const auto& bank : params.conv) {
        const std::size_t w = bank.width;
        proj.assign(w * len, 0.0);
        for (std::size_t f = 0; f < nf; ++f) {
            const double* filter = bank.weights.data() + f * w * dim;
            for (std::size_t k = 0; k < w; ++k) {
                for (std::size_t pos = 0; pos < len; ++pos) {
                    if (x[pos] == kPaddingIndex) {
                        proj[k * len + pos] = 0.0;
                        continue;
                    }
                    proj[k * len + pos] =
                        dot(filter + k * dim, emb.values.data() + static_cast<std::size_t>(x[pos]) * dim, dim);
                }
            }
            double best = -1.0;
            std::size_t best_t = 0;
            for (std::size_t t = 0; t + w <= len; ++t) {
                double z = bank.bias[f];
                for (std::size_t k = 0; k < w; ++k) {
                    z += proj[k * len + t + k];
                }
                const double a = z > 0.0 ? z : 0.0;
                if (a > best) {
                    best = a;
                    best_t = t;
                }
            }
            tr.pooled.push_back(best);
            tr.argmax.push_back(best_t);
        }
    }
    tr.logit = params.dense_bias;
    for (std::size_t i = 0; i < tr.pooled.size(); ++i) {
        tr.logit += params.dense_weights[i] * tr.pooled[i];
    }
    tr.probability = sigmoid(tr.logit);
    return tr;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

}  // namespace

double forward(const ModelParams& params, std::span<const TokenIndex> x) {
    return run_forward(params, x).probability;
}

double bce_loss(double p, Label y) {
    const double c = std::clamp(p, kLossEpsilon, 1.0 - kLossEpsilon);
    return y == Label::bullying ? -std::log(c) : -std::log(1.0 - c);
}

LossAndGradients backward(const ModelParams& params, std::span<const TokenIndex> x, Label y) {
    const Trace tr = run_forward(params, x);
    const auto& cfg = params.config;
    const auto& emb = *params.embedding;
    const std::size_t dim = cfg.dim;
    const std::size_t nf = cfg.filters_per_width;

    LossAndGradients out;
    out.loss = bce_loss(tr.probability, y);
    out.grads = Gradients::zeros_like(params);
    auto& g = out.grads;

    const double p = tr.probability;
    const double target = y == Label::bullying ? 1.0 : 0.0;
    // Zero slope where the loss clamp is active.
    const double dlogit = (p < kLossEpsilon || p > 1.0 - kLossEpsilon) ? 0.0 : p - target;

    g.dense_bias = dlogit;
    for (std::size_t i = 0; i < tr.pooled.size(); ++i) {
        g.dense_weights[i] = dlogit * tr.pooled[i];
    }

    std::size_t feature = 0;
    for (std::size_t b = 0; b < params.conv.size(); ++b) {
        const auto& bank = params.conv[b];
        auto& gbank = g.conv[b];
        const std::size_t w = bank.width;
        for (std::size_t f = 0; f < nf; ++f, ++feature) {
            if (!(tr.pooled[feature] > 0.0)) {
                continue;
            }
            const double dz = dlogit * params.dense_weights[feature];
            if (dz == 0.0) {
                continue;
            }
            gbank.bias[f] += dz;
            const std::size_t t = tr.argmax[feature];
            for (std::size_t k = 0; k < w; ++k) {
                const TokenIndex idx = x[t + k];
                if (idx == kPaddingIndex) {
                    continue;
                }
                const double* e = emb.values.data() + static_cast<std::size_t>(idx) * dim;
                double* gw = gbank.weights.data() + (f * w + k) * dim;
                for (std::size_t d = 0; d < dim; ++d) {
                    gw[d] += dz * e[d];
                }
                if (cfg.fine_tune_embeddings) {
                    auto& row = g.embedding_rows[idx];
                    row.resize(dim, 0.0);
                    const double* wk = bank.weights.data() + (f * w + k) * dim;
                    for (std::size_t d = 0; d < dim; ++d) {
                        row[d] += dz * wk[d];
                    }
                }
            }
        }
    }
    if (cfg.fine_tune_embeddings) {
        // Rows referenced by x but untouched by the pooled windows still get
        // an explicit zero gradient so the block shape is predictable.
        for (auto idx : x) {
            if (idx != kPaddingIndex) {
                g.embedding_rows[idx].resize(dim, 0.0);
            }
        }
    }
    return out;
}

namespace {

std::vector<double*> parameter_slots(ModelParams& params) {
    std::vector<double*> slots;
    for (auto& bank : params.conv) {
        for (auto& w : bank.weights) {
            slots.push_back(&w);
        }
        for (auto& b : bank.bias) {
            slots.push_back(&b);
        }
    }
    for (auto& w : params.dense_weights) {
        slots.push_back(&w);
    }
    slots.push_back(&params.dense_bias);
    return slots;
}

std::vector<double*> gradient_slots(Gradients& grads) {
    std::vector<double*> slots;
    for (auto& bank : grads.conv) {
        for (auto& w : bank.weights) {
            slots.push_back(&w);
        }
        for (auto& b : bank.bias) {
            slots.push_back(&b);
        }
    }
    for (auto& w : grads.dense_weights) {
        slots.push_back(&w);
    }
    slots.push_back(&grads.dense_bias);
    return slots;
}

}  // namespace

std::vector<double> flatten(const ModelParams& params) {
    std::vector<double> out;
    for (double* slot : parameter_slots(const_cast<ModelParams&>(params))) {
        out.push_back(*slot);
    }
    return out;
}

std::vector<double> flatten(const Gradients& grads) {
    std::vector<double> out;
    for (double* slot : gradient_slots(const_cast<Gradients&>(grads))) {
        out.push_back(*slot);
    }
    return out;
}

Gradients numerical_gradient(const ModelParams& params, std::span<const TokenIndex> x, Label y,
                             double step) {
    if (!(step > 0.0)) {
        throw Error("numerical_gradient: step must be positive");
    }
    check_input(params, x);
    ModelParams probe = params;
    Gradients g = Gradients::zeros_like(params);
    auto loss_at = [&] { return bce_loss(forward(probe, x), y); };

    const auto slots = parameter_slots(probe);
    const auto gslots = gradient_slots(g);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double saved = *slots[i];
        *slots[i] = saved + step;
        const double up = loss_at();
        *slots[i] = saved - step;
        const double down = loss_at();
        *slots[i] = saved;
        *gslots[i] = (up - down) / (2.0 * step);
    }

    if (params.config.fine_tune_embeddings) {
        auto& emb = probe.mutable_embedding();
        const std::size_t dim = emb.dim;
        for (auto idx : x) {
            if (idx == kPaddingIndex || g.embedding_rows.contains(idx)) {
                continue;
            }
            auto& row = g.embedding_rows[idx];
            row.assign(dim, 0.0);
            auto values = emb.row(static_cast<std::size_t>(idx));
            for (std::size_t d = 0; d < dim; ++d) {
                const double saved = values[d];
                values[d] = saved + step;
                const double up = loss_at();
                values[d] = saved - step;
                const double down = loss_at();
                values[d] = saved;
                row[d] = (up - down) / (2.0 * step);
            }
        }
    }
    return g;
}

namespace {

// Running mean m += (v - m) / n: exact for repeated identical inputs.
void accumulate_mean(std::vector<double>& mean, const std::vector<double>& value, double n) {
    for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i] += (value[i] - mean[i]) / n;
    }
}

}  // namespace

double train_step_inplace(ModelParams& params, std::span<const Example> batch,
                          const ModelConfig& config) {
    if (batch.empty()) {
        throw Error("train_step: batch is empty");
    }
    std::vector<std::size_t> order(batch.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.fine_tune_embeddings != params.config.fine_tune_embeddings) {
        throw Error("train_step: fine-tuning setting differs from the model's config");
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& xa = batch[a].x;
        const auto& xb = batch[b].x;
        if (std::ranges::equal(xa, xb)) {
            return batch[a].y < batch[b].y;
        }
        return std::ranges::lexicographical_compare(xa, xb);
    });

    Gradients mean = Gradients::zeros_like(params);
    double mean_loss = 0.0;
    double n = 0.0;
    for (std::size_t i : order) {
        auto [loss, g] = backward(params, batch[i].x, batch[i].y);
        if (!std::isfinite(loss)) {
            throw TrainingError("non-finite loss on batch example " + std::to_string(i));
        }
        n += 1.0;
        mean_loss += (loss - mean_loss) / n;
        for (std::size_t b = 0; b < mean.conv.size(); ++b) {
            if (!all_finite(g.conv[b].weights) || !all_finite(g.conv[b].bias)) {
                throw TrainingError("non-finite gradient in conv bank " + std::to_string(b) +
                                    " on batch example " + std::to_string(i));
            }
            accumulate_mean(mean.conv[b].weights, g.conv[b].weights, n);
            accumulate_mean(mean.conv[b].bias, g.conv[b].bias, n);
        }
        if (!all_finite(g.dense_weights) || !std::isfinite(g.dense_bias)) {
            throw TrainingError("non-finite dense gradient on batch example " + std::to_string(i));
        }
        accumulate_mean(mean.dense_weights, g.dense_weights, n);
        mean.dense_bias += (g.dense_bias - mean.dense_bias) / n;
        if (config.fine_tune_embeddings) {
            for (auto& [idx, row] : mean.embedding_rows) {
                if (!g.embedding_rows.contains(idx)) {
                    for (auto& v : row) {
                        v += (0.0 - v) / n;
                    }
                }
            }
            for (const auto& [idx, row] : g.embedding_rows) {
                if (!all_finite(row)) {
                    throw TrainingError("non-finite embedding gradient for row " +
                                        std::to_string(idx));
                }
                auto [it, inserted] = mean.embedding_rows.try_emplace(idx, row.size(), 0.0);
                accumulate_mean(it->second, row, n);
            }
        }
    }

    const double lr = config.learning_rate;
    for (std::size_t b = 0; b < params.conv.size(); ++b) {
        auto& bank = params.conv[b];
        for (std::size_t i = 0; i < bank.weights.size(); ++i) {
            bank.weights[i] -= lr * mean.conv[b].weights[i];
        }
        for (std::size_t i = 0; i < bank.bias.size(); ++i) {
            bank.bias[i] -= lr * mean.conv[b].bias[i];
        }
    }
    for (std::size_t i = 0; i < params.dense_weights.size(); ++i) {
        params.dense_weights[i] -= lr * mean.dense_weights[i];
    }
    params.dense_bias -= lr * mean.dense_bias;

    if (config.fine_tune_embeddings && !mean.embedding_rows.empty() && lr != 0.0) {
        auto& emb = params.mutable_embedding();
        for (const auto& [idx, row] : mean.embedding_rows) {
            if (idx == kPaddingIndex) {
                continue;
            }
            auto values = emb.row(static_cast<std::size_t>(idx));
            for (std::size_t d = 0; d < row.size(); ++d) {
                values[d] -= lr * row[d];
            }
        }
    }

    for (double* slot : parameter_slots(params)) {
        if (!std::isfinite(*slot)) {
            throw TrainingError("parameter became non-finite after update");
        }
    }
    return mean_loss;
}

StepResult train_step(const ModelParams& params, std::span<const Example> batch,
                      const ModelConfig& config) {
    StepResult result{params, 0.0};
    result.mean_loss = train_step_inplace(result.params, batch, config);
    return result;
}

Prediction predict(const ModelParams& params, std::string_view text,
                   const PreprocessConfig& preprocess_config, const Vocabulary& vocab) {
    if (vocab.size() + 2 != params.embedding->rows) {
        throw Error("vocabulary size " + std::to_string(vocab.size()) +
                    " does not match the model's embedding matrix");
    }
    const auto seq = encode_sequence(preprocess(text, preprocess_config), vocab,
                                     params.config.max_len);
    const double p = forward(params, seq);
    return {threshold(p), p};
}

}  // namespace acoso

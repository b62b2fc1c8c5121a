#include "acoso/eval.hpp"

#include "acoso/error.hpp"
#include "acoso/io.hpp"
#include "acoso/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace acoso {

void TrainConfig::validate() const {
    if (iterations == 0) {
        throw Error("train config: iterations must be at least 1");
    }
    if (epochs == 0) {
        throw Error("train config: epochs must be at least 1");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error("train config: train fraction must be in (0, 1)");
    }
    if (batch_size == 0) {
        throw Error("train config: batch size must be at least 1");
    }
}

Split split_train_test(const EncodedDataset& dataset, double fraction, std::uint64_t seed) {
    if (dataset.empty()) {
        throw Error("split_train_test: dataset is empty");
    }
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw Error("split_train_test: fraction must be in (0, 1)");
    }
    const std::size_t n = dataset.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng::Engine engine(seed);
    rng::shuffle(std::span<std::size_t>(perm), engine);

    // Products such as 90 * 0.7 land a hair below the integer they denote.
    const double exact = static_cast<double>(n) * fraction;
    const double nearest = std::round(exact);
    const double snapped = std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact) ? nearest : exact;
    const auto n_train = static_cast<std::size_t>(std::floor(snapped));
    Split split;
    split.train_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    split.train = dataset.subset(split.train_rows);
    split.test = dataset.subset(split.test_rows);
    return split;
}

EvalResult evaluate(const ModelParams& params, const EncodedDataset& test) {
    if (test.empty()) {
        throw Error("evaluate: test set is empty");
    }
    EvalResult r;
    r.total = test.size();
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (threshold(forward(params, test.tweets[i])) == test.labels[i]) {
            ++r.correct;
        }
    }
    r.success_pct = 100.0 * static_cast<double>(r.correct) / static_cast<double>(r.total);
    r.fail_pct = 100.0 - r.success_pct;
    return r;
}

DatasetMetrics measure(const ModelParams& params, const EncodedDataset& data) {
    if (data.empty()) {
        throw Error("measure: dataset is empty");
    }
    std::size_t correct = 0;
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double p = forward(params, data.tweets[i]);
        loss += bce_loss(p, data.labels[i]);
        if (threshold(p) == data.labels[i]) {
            ++correct;
        }
    }
    const auto n = static_cast<double>(data.size());
    return {static_cast<double>(correct) / n, loss / n};
}

const Checkpoint& select_best_checkpoint(std::span<const Checkpoint> checkpoints) {
    if (checkpoints.empty()) {
        throw Error("select_best_checkpoint: no checkpoints");
    }
    const Checkpoint* best = &checkpoints.front();
    for (const auto& cp : checkpoints.subspan(1)) {
        bool better = cp.train_accuracy > best->train_accuracy;
        if (cp.train_accuracy == best->train_accuracy) {
            better = cp.train_loss < best->train_loss ||
                     (cp.train_loss == best->train_loss && cp.epoch >= best->epoch);
        }
        if (better) {
            best = &cp;
        }
    }
    return *best;
}

IterationResult run_iteration(const EncodedDataset& train, const EncodedDataset& test,
                              const ModelConfig& model_config,
                              std::shared_ptr<const EmbeddingMatrix> embedding,
                              std::size_t epochs, std::size_t batch_size, std::uint64_t seed,
                              std::size_t iteration, const CheckpointSink& sink) {
    if (epochs == 0) {
        throw Error("run_iteration: epochs must be at least 1");
    }
    if (batch_size == 0) {
        throw Error("run_iteration: batch size must be at least 1");
    }
    if (train.empty()) {
        throw Error("run_iteration: training set is empty");
    }
    if (train.max_len != model_config.max_len) {
        throw Error("run_iteration: dataset max_len differs from the model's");
    }

    ModelConfig cfg = model_config;
    cfg.seed = rng::derive_seed(seed, 0x1417);
    ModelParams params = init_model(cfg, std::move(embedding));
    rng::Engine engine(rng::derive_seed(seed, 0x5bf1));

    IterationResult result;
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Example> batch;
    for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
        rng::shuffle(std::span<std::size_t>(order), engine);
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(order.size(), start + batch_size);
            batch.clear();
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back({train.tweets[order[i]], train.labels[order[i]]});
            }
            try {
                train_step_inplace(params, batch, cfg);
            } catch (const TrainingError& e) {
                throw TrainingError("iteration " + std::to_string(iteration) + ", epoch " +
                                    std::to_string(epoch) + ": " + e.what());
            }
        }
        const auto metrics = measure(params, train);
        Checkpoint cp{iteration, epoch, params, metrics.accuracy, metrics.mean_loss};
        if (sink) {
            sink(cp);
        }
        result.checkpoints.push_back(std::move(cp));
    }

    const Checkpoint& best = select_best_checkpoint(result.checkpoints);
    result.report.iteration = iteration;
    result.report.selected = best;
    result.report.test = test.empty() ? EvalResult{} : evaluate(best.params, test);
    return result;
}

void finalize_averages(CrossValReport& report) {
    if (report.per_iteration.empty()) {
        report.average_success_pct = 0.0;
        report.average_fail_pct = 0.0;
        return;
    }
    double success = 0.0;
    double fail = 0.0;
    for (const auto& it : report.per_iteration) {
        success += it.test.success_pct;
        fail += it.test.fail_pct;
    }
    const auto n = static_cast<double>(report.per_iteration.size());
    report.average_success_pct = success / n;
    report.average_fail_pct = fail / n;
}

CrossValResult cross_validate(const EncodedDataset& dataset, const TrainConfig& train_config,
                              const ModelConfig& model_config,
                              std::shared_ptr<const EmbeddingMatrix> embedding,
                              const CheckpointSink& sink) {
    train_config.validate();
    model_config.validate();
    const std::size_t n_iter = train_config.iterations;
    std::vector<IterationResult> results(n_iter);

    auto run_one = [&](std::size_t i) {
        const std::size_t iteration = i + 1;
        const auto split = split_train_test(dataset, train_config.train_fraction,
                                            rng::derive_seed(train_config.seed, iteration, 1));
        if (split.test.empty()) {
            throw Error("cross_validate: test split is empty; dataset too small");
        }
        results[i] = run_iteration(split.train, split.test, model_config, embedding,
                                   train_config.epochs, train_config.batch_size,
                                   rng::derive_seed(train_config.seed, iteration, 2), iteration,
                                   sink);
    };

    const std::size_t jobs = std::clamp<std::size_t>(train_config.jobs, 1, n_iter);
    if (jobs == 1) {
        for (std::size_t i = 0; i < n_iter; ++i) {
            run_one(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> workers;
        for (std::size_t j = 0; j < jobs; ++j) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n_iter; i = next++) {
                    try {
                        run_one(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
        for (auto& w : workers) {
            w.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    CrossValResult out;
    for (auto& r : results) {
        out.report.per_iteration.push_back(std::move(r.report));
        out.checkpoints.push_back(std::move(r.checkpoints));
    }
    finalize_averages(out.report);
    return out;
}

std::string format_selection_table(const CrossValReport& report) {
    std::string out = "iteration,selected_epoch,accuracy,loss\n";
    for (const auto& it : report.per_iteration) {
        out += std::to_string(it.iteration) + ',' + std::to_string(it.selected.epoch) + ',' +
               io::format_percent(100.0 * it.selected.train_accuracy) + ',' +
               io::format_double(it.selected.train_loss) + '\n';
    }
    return out;
}

std::string format_success_table(const CrossValReport& report) {
    std::string out = "iteration,success_pct,fail_pct\n";
    for (const auto& it : report.per_iteration) {
        out += std::to_string(it.iteration) + ',' + io::format_percent(it.test.success_pct) + ',' +
               io::format_percent(it.test.fail_pct) + '\n';
    }
    out += "average," + io::format_percent(report.average_success_pct) + ',' +
           io::format_percent(report.average_fail_pct) + '\n';
    return out;
}

}  // namespace acoso

#pragma once

#include "acoso/checkpoint.hpp"
#include "acoso/model.hpp"
#include "acoso/vocab.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace acoso {

struct TrainConfig {
    std::size_t iterations = 4;
    std::size_t epochs = 8;
    double train_fraction = 0.9;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    /// Iterations trained concurrently; results do not depend on it.
    std::size_t jobs = 1;

    void validate() const;
};

struct Split {
    EncodedDataset train;
    EncodedDataset test;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

/// Seeded uniform permutation; the first floor(n * fraction) rows train.
Split split_train_test(const EncodedDataset& dataset, double fraction, std::uint64_t seed);

struct EvalResult {
    std::size_t correct = 0;
    std::size_t total = 0;
    double success_pct = 0.0;
    double fail_pct = 0.0;
};

/// Success = 100 * correct / total, fail = 100 - success.
EvalResult evaluate(const ModelParams& params, const EncodedDataset& test);

/// Mean loss and accuracy over a dataset at fixed parameters.
struct DatasetMetrics {
    double accuracy = 0.0;
    double mean_loss = 0.0;
};
DatasetMetrics measure(const ModelParams& params, const EncodedDataset& data);

/// Highest accuracy, then lowest loss, then latest position in the list.
const Checkpoint& select_best_checkpoint(std::span<const Checkpoint> checkpoints);

struct IterationReport {
    std::size_t iteration = 0;
    Checkpoint selected;
    EvalResult test;
};

struct IterationResult {
    std::vector<Checkpoint> checkpoints;
    IterationReport report;
};

/// Called once per finished epoch, possibly from a worker thread.
using CheckpointSink = std::function<void(const Checkpoint&)>;

/// Trains `epochs` epochs of shuffled mini-batches from a fresh model,
/// snapshots after each epoch, selects the best snapshot by training metrics
/// and scores it on the test set.
IterationResult run_iteration(const EncodedDataset& train, const EncodedDataset& test,
                              const ModelConfig& model_config,
                              std::shared_ptr<const EmbeddingMatrix> embedding,
                              std::size_t epochs, std::size_t batch_size, std::uint64_t seed,
                              std::size_t iteration = 1, const CheckpointSink& sink = {});

struct CrossValReport {
    std::vector<IterationReport> per_iteration;
    double average_success_pct = 0.0;
    double average_fail_pct = 0.0;
};

struct CrossValResult {
    CrossValReport report;
    std::vector<std::vector<Checkpoint>> checkpoints;  ///< [iteration][epoch]
};

/// Independent random split and training run per iteration; split and
/// training seeds derive from (train_config.seed, iteration).
CrossValResult cross_validate(const EncodedDataset& dataset, const TrainConfig& train_config,
                              const ModelConfig& model_config,
                              std::shared_ptr<const EmbeddingMatrix> embedding,
                              const CheckpointSink& sink = {});

/// Recomputes the averages from per_iteration.
void finalize_averages(CrossValReport& report);

/// `iteration,selected_epoch,accuracy,loss` with accuracy in percent.
std::string format_selection_table(const CrossValReport& report);
/// `iteration,success_pct,fail_pct` plus a final `average` row.
std::string format_success_table(const CrossValReport& report);

}  // namespace acoso

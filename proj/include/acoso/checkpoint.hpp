#pragma once

#include "acoso/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace acoso {

/// Model snapshot taken at the end of one epoch of one validation iteration.
struct Checkpoint {
    std::size_t iteration = 0;
    std::size_t epoch = 0;
    ModelParams params;
    double train_accuracy = 0.0;
    double train_loss = 0.0;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary container, little-endian throughout:
///   magic "ACOSOCKP", u32 version,
///   config (u64 max_len, u64 dim, u64 n_widths, u64 widths[], u64 filters,
///           f64 learning_rate, u8 fine_tune, u64 seed),
///   metrics (u64 iteration, u64 epoch, f64 accuracy, f64 loss),
///   embedding (u64 rows, u64 dim, f64 coverage, f64 values[rows*dim]),
///   per conv bank (u64 width, f64 weights[], f64 bias[]),
///   f64 dense_weights[], f64 dense_bias,
///   u32 CRC-32 of every preceding byte.
std::string encode_checkpoint(const Checkpoint& cp);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace acoso

#pragma once

#include "acoso/vocab.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace acoso {

struct RankEntry {
    std::size_t rank = 0;
    std::string token;
    std::uint64_t count = 0;
};

/// Ranks 1..K with non-increasing counts, ties ordered by token.
struct RankFrequency {
    std::vector<RankEntry> entries;
};

struct ZipfFit {
    double alpha = 0.0;
    double intercept = 0.0;  ///< ln of the fitted count at rank 1
    double log_log_r2 = 0.0;
    std::size_t n_points = 0;
};

RankFrequency rank_frequency(const FrequencyTable& freq);

/// scale / rank^alpha. With scale == alpha this is f(r) = alpha / r^alpha.
double zipf_expected(std::size_t rank, double alpha, double scale);

/// Ordinary least squares of ln(count) on ln(rank) over ranks
/// 1..min(K, max_rank); alpha is the negated slope.
ZipfFit fit_zipf(const RankFrequency& rf, std::optional<std::size_t> max_rank = std::nullopt);

/// Log-space residuals ln(observed) - ln(fitted) for the first n ranks.
std::vector<double> zipf_residuals(const RankFrequency& rf, const ZipfFit& fit, std::size_t n);

/// CSV `rank,token,observed_count,zipf_expected_count` for the first top_n
/// ranks. Expected counts are anchored to the observed rank-1 count.
std::string format_plot_data(const RankFrequency& rf, const ZipfFit& fit, std::size_t top_n);
void export_plot_data(const RankFrequency& rf, const ZipfFit& fit,
                      const std::filesystem::path& path, std::size_t top_n);

}  // namespace acoso

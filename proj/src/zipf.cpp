#include "acoso/zipf.hpp"

#include "acoso/error.hpp"
#include "acoso/io.hpp"

#include <algorithm>
#include <cmath>

namespace acoso {

RankFrequency rank_frequency(const FrequencyTable& freq) {
    if (freq.empty()) {
        throw Error("rank_frequency: frequency table is empty");
    }
    RankFrequency rf;
    std::size_t rank = 0;
    for (auto& [token, count] : rank_tokens(freq)) {
        rf.entries.push_back({++rank, std::move(token), count});
    }
    return rf;
}

double zipf_expected(std::size_t rank, double alpha, double scale) {
    if (rank == 0) {
        throw Error("zipf_expected: rank is 1-based");
    }
    return scale / std::pow(static_cast<double>(rank), alpha);
}

ZipfFit fit_zipf(const RankFrequency& rf, std::optional<std::size_t> max_rank) {
    const std::size_t n = std::min(rf.entries.size(), max_rank.value_or(rf.entries.size()));
    if (n < 2) {
        throw Error("fit_zipf: need at least 2 ranks");
    }
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = rf.entries[i];
        if (e.count == 0) {
            throw Error("fit_zipf: zero count at rank " + std::to_string(e.rank));
        }
        xs[i] = std::log(static_cast<double>(e.rank));
        ys[i] = std::log(static_cast<double>(e.count));
    }
    const bool all_equal = std::all_of(rf.entries.begin(), rf.entries.begin() + static_cast<std::ptrdiff_t>(n),
                                       [&](const RankEntry& e) { return e.count == rf.entries[0].count; });
    if (all_equal) {
        throw Error("fit_zipf: counts must take at least 2 distinct values");
    }

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    ZipfFit fit;
    fit.alpha = -slope;
    fit.intercept = mean_y - slope * mean_x;
    fit.log_log_r2 = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    fit.n_points = n;
    return fit;
}

std::vector<double> zipf_residuals(const RankFrequency& rf, const ZipfFit& fit, std::size_t n) {
    n = std::min(n, rf.entries.size());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = rf.entries[i];
        const double predicted = fit.intercept - fit.alpha * std::log(static_cast<double>(e.rank));
        out[i] = std::log(static_cast<double>(e.count)) - predicted;
    }
    return out;
}

std::string format_plot_data(const RankFrequency& rf, const ZipfFit& fit, std::size_t top_n) {
    if (top_n == 0) {
        throw Error("export_plot_data: top_n must be at least 1");
    }
    if (rf.entries.empty()) {
        throw Error("export_plot_data: empty rank-frequency table");
    }
    const auto n = std::min(top_n, rf.entries.size());
    const auto scale = static_cast<double>(rf.entries.front().count);
    std::string out = "rank,token,observed_count,zipf_expected_count\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = rf.entries[i];
        out += std::to_string(e.rank);
        out += ',';
        out += io::csv_escape(e.token);
        out += ',';
        out += std::to_string(e.count);
        out += ',';
        out += io::format_double(zipf_expected(e.rank, fit.alpha, scale));
        out += '\n';
    }
    return out;
}

void export_plot_data(const RankFrequency& rf, const ZipfFit& fit,
                      const std::filesystem::path& path, std::size_t top_n) {
    io::write_file_atomic(path, format_plot_data(rf, fit, top_n));
}

}  // namespace acoso

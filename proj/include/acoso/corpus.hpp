#pragma once

#include "acoso/random.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace acoso {

enum class Label : std::uint8_t { clean = 0, bullying = 1 };

inline int to_int(Label label) { return static_cast<int>(label); }

struct LabeledText {
    std::string id;
    std::string text;
    Label label = Label::clean;

    friend bool operator==(const LabeledText&, const LabeledText&) = default;
};

using Corpus = std::vector<LabeledText>;
using Tokens = std::vector<std::string>;

/// Keyword phrases targeting one class. Phrases are lowercase, non-empty and
/// unique; internal whitespace is collapsed to single spaces.
class KeywordSet {
public:
    KeywordSet() = default;
    KeywordSet(std::vector<std::string> phrases, Label polarity);

    /// One phrase per line; `#` starts a comment.
    static KeywordSet load(const std::filesystem::path& path, Label polarity);

    const std::vector<std::string>& phrases() const noexcept { return phrases_; }
    Label polarity() const noexcept { return polarity_; }
    bool empty() const noexcept { return phrases_.empty(); }

private:
    std::vector<std::string> phrases_;
    Label polarity_ = Label::bullying;
};

struct PreprocessConfig {
    std::set<std::string> stopwords;
    bool fold_accents = false;
    bool keep_letters_only = true;

    /// One token per line; rejects entries containing whitespace.
    static std::set<std::string> load_stopwords(const std::filesystem::path& path);
};

/// Headered CSV `id,label,text`. Errors name the offending line.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view csv, const std::string& source = "<corpus>");
std::string format_corpus(const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// Records whose lowercased, letters-only token stream contains one of the
/// phrases as a contiguous token run. Input order is kept.
Corpus keyword_filter(const Corpus& corpus, const KeywordSet& keywords);

/// Normalization in fixed order: lowercase, drop URL tokens (http*, www*),
/// drop @mentions, non-letters to spaces, optional accent folding, whitespace
/// split, stop-word removal. Input is NFC-composed first.
Tokens preprocess(std::string_view text, const PreprocessConfig& config);

/// Rank sampler with P(r) proportional to r^-alpha over ranks 1..n.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n_types, double alpha);

    /// Returns a 1-based rank.
    std::size_t draw(rng::Engine& engine) const;
    std::size_t size() const noexcept { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

/// Deterministic pseudo-word for a 1-based filler rank. Every filler starts
/// with 'k' so it never collides with keyword tokens or Spanish stop words.
std::string filler_word(std::size_t rank);

struct SyntheticSpec {
    std::size_t n_bullying = 0;
    std::size_t n_clean = 0;
    std::size_t filler_vocab_size = 500;
    double zipf_alpha = 1.0;
    std::uint64_t seed = 0;
};

/// Each text holds one class-matching keyword phrase at a random position
/// among 3-12 Zipf-distributed filler tokens. Records are shuffled; ids are
/// `syn-NNNNNN`.
Corpus generate_synthetic_corpus(const SyntheticSpec& spec, const KeywordSet& bullying,
                                 const KeywordSet& clean);

}  // namespace acoso

#pragma once

#include "acoso/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace acoso {

using TokenIndex = std::int32_t;
using Sequence = std::vector<TokenIndex>;

inline constexpr TokenIndex kPaddingIndex = 0;
inline constexpr std::size_t kDefaultMaxLen = 50;

/// Token occurrence counts. Ordered map so iteration is deterministic.
struct FrequencyTable {
    std::map<std::string, std::uint64_t> counts;

    std::uint64_t total() const;
    bool empty() const noexcept { return counts.empty(); }
};

FrequencyTable build_frequency(const std::vector<Tokens>& token_corpus);

/// (count descending, token ascending). Shared by the vocabulary and the
/// rank-frequency table.
std::vector<std::pair<std::string, std::uint64_t>> rank_tokens(const FrequencyTable& freq);

/// Frequency-ranked vocabulary: index 1 is the most frequent token, ties are
/// broken lexicographically. Index 0 is padding and size()+1 is the
/// out-of-vocabulary slot; neither maps to a token.
class Vocabulary {
public:
    Vocabulary() = default;

    static Vocabulary build(const FrequencyTable& freq,
                            std::optional<std::size_t> max_size = std::nullopt);

    std::size_t size() const noexcept { return tokens_.size(); }
    TokenIndex oov_index() const noexcept { return static_cast<TokenIndex>(tokens_.size() + 1); }

    /// Index of `token`, or oov_index() when absent.
    TokenIndex index_of(const std::string& token) const;
    bool contains(const std::string& token) const { return index_.contains(token); }

    /// Token for an index in [1, size()]; throws otherwise.
    const std::string& token_at(TokenIndex index) const;
    std::uint64_t count_at(TokenIndex index) const;

    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    /// `token<TAB>index<TAB>count` per line, sorted by index.
    std::string serialize() const;
    static Vocabulary parse(std::string_view text, const std::string& source = "<vocab>");
    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path);

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
    }

private:
    std::vector<std::string> tokens_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, TokenIndex> index_;
};

inline Vocabulary build_vocabulary(const FrequencyTable& freq,
                                   std::optional<std::size_t> max_size = std::nullopt) {
    return Vocabulary::build(freq, max_size);
}

/// Fixed-length encoding: tail-truncated to max_len, zero padded, unknown
/// tokens mapped to the OOV index.
Sequence encode_sequence(const Tokens& tokens, const Vocabulary& vocab, std::size_t max_len);

/// Inverse of encode_sequence for in-vocabulary tokens; padding is dropped and
/// OOV positions decode to an empty string.
Tokens decode_sequence(const Sequence& seq, const Vocabulary& vocab);

/// The three aligned vectors: encoded texts, labels and ids.
struct EncodedDataset {
    std::vector<Sequence> tweets;
    std::vector<Label> labels;
    std::vector<std::string> ids;
    std::size_t max_len = kDefaultMaxLen;

    std::size_t size() const noexcept { return tweets.size(); }
    bool empty() const noexcept { return tweets.empty(); }

    /// Rows selected by position, in the given order.
    EncodedDataset subset(const std::vector<std::size_t>& rows) const;

    friend bool operator==(const EncodedDataset&, const EncodedDataset&) = default;
};

EncodedDataset encode_dataset(const Corpus& corpus, const PreprocessConfig& config,
                              const Vocabulary& vocab, std::size_t max_len = kDefaultMaxLen);

/// Preprocesses every record; convenience for building frequency tables.
std::vector<Tokens> preprocess_corpus(const Corpus& corpus, const PreprocessConfig& config);

}  // namespace acoso

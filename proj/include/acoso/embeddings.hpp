#pragma once

#include "acoso/vocab.hpp"

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace acoso {

/// Pretrained word vectors, all of one dimensionality.
class WordVectorStore {
public:
    explicit WordVectorStore(std::size_t dim = 0) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return tokens_.size(); }

    /// Returns false (and keeps the existing vector) when `token` is present.
    bool insert(const std::string& token, std::span<const double> vector);

    /// Empty span when absent.
    std::span<const double> find(const std::string& token) const;
    bool contains(const std::string& token) const { return rows_.contains(token); }

    /// Tokens in insertion order.
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

private:
    std::size_t dim_;
    std::vector<std::string> tokens_;
    std::vector<double> data_;
    std::unordered_map<std::string, std::size_t> rows_;
};

/// word2vec text format: an optional "count dim" header line, then one
/// `token v1 ... vdim` line per word. Later duplicates are ignored. When
/// `keep` is set, only tokens it accepts are stored; the rest are still
/// validated. Streams the file line by line.
WordVectorStore load_word_vectors(const std::filesystem::path& path, std::size_t expected_dim,
                                  const std::function<bool(const std::string&)>& keep = {});
WordVectorStore parse_word_vectors(std::istream& in, std::size_t expected_dim,
                                   const std::string& source = "<vectors>",
                                   const std::function<bool(const std::string&)>& keep = {});

/// Vocabulary-aligned (V+2) x dim matrix. Row 0 is padding (zeros), rows
/// 1..V follow vocabulary indices and row V+1 holds the OOV vector.
struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> values;  ///< row-major
    double coverage = 0.0;

    std::span<const double> row(std::size_t r) const { return {values.data() + r * dim, dim}; }
    std::span<double> row(std::size_t r) { return {values.data() + r * dim, dim}; }
    std::size_t vocab_size() const noexcept { return rows >= 2 ? rows - 2 : 0; }

    friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;
};

/// Missing tokens and the OOV row take the mean of matched vectors (zeros
/// when nothing matched).
EmbeddingMatrix build_embedding_matrix(const Vocabulary& vocab, const WordVectorStore& store);

/// Gaussian vectors (scaled by 1/sqrt(dim)) for every listed token, in
/// word2vec text format with a header. Used to stand in for pretrained
/// vectors on synthetic corpora.
std::string format_random_vectors(const std::vector<std::string>& tokens, std::size_t dim,
                                  std::uint64_t seed);

}  // namespace acoso

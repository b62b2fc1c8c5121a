#include "acoso/vocab.hpp"

#include "acoso/error.hpp"
#include "acoso/io.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace acoso {

std::uint64_t FrequencyTable::total() const {
    std::uint64_t sum = 0;
    for (const auto& [token, count] : counts) {
        sum += count;
    }
    return sum;
}

FrequencyTable build_frequency(const std::vector<Tokens>& token_corpus) {
    FrequencyTable table;
    for (const auto& seq : token_corpus) {
        for (const auto& token : seq) {
            ++table.counts[token];
        }
    }
    return table;
}

std::vector<std::pair<std::string, std::uint64_t>> rank_tokens(const FrequencyTable& freq) {
    std::vector<std::pair<std::string, std::uint64_t>> ranked(freq.counts.begin(),
                                                              freq.counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    return ranked;
}

Vocabulary Vocabulary::build(const FrequencyTable& freq, std::optional<std::size_t> max_size) {
    auto ranked = rank_tokens(freq);
    if (max_size && ranked.size() > *max_size) {
        ranked.resize(*max_size);
    }
    Vocabulary vocab;
    vocab.tokens_.reserve(ranked.size());
    vocab.counts_.reserve(ranked.size());
    for (auto& [token, count] : ranked) {
        vocab.index_.emplace(token, static_cast<TokenIndex>(vocab.tokens_.size() + 1));
        vocab.tokens_.push_back(std::move(token));
        vocab.counts_.push_back(count);
    }
    return vocab;
}

TokenIndex Vocabulary::index_of(const std::string& token) const {
    const auto it = index_.find(token);
    return it == index_.end() ? oov_index() : it->second;
}

const std::string& Vocabulary::token_at(TokenIndex index) const {
    if (index < 1 || static_cast<std::size_t>(index) > tokens_.size()) {
        throw Error("vocabulary index " + std::to_string(index) + " does not map to a token");
    }
    return tokens_[static_cast<std::size_t>(index) - 1];
}

std::uint64_t Vocabulary::count_at(TokenIndex index) const {
    token_at(index);
    return counts_[static_cast<std::size_t>(index) - 1];
}

std::string Vocabulary::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        out += tokens_[i];
        out += '\t';
        out += std::to_string(i + 1);
        out += '\t';
        out += std::to_string(counts_[i]);
        out += '\n';
    }
    return out;
}

Vocabulary Vocabulary::parse(std::string_view text, const std::string& source) {
    Vocabulary vocab;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
            throw ParseError(source, line_no, "expected token<TAB>index<TAB>count");
        }
        const auto token = line.substr(0, t1);
        const auto index_field = line.substr(t1 + 1, t2 - t1 - 1);
        const auto count_field = line.substr(t2 + 1);
        std::uint64_t index = 0;
        std::uint64_t count = 0;
        auto parse_u64 = [](std::string_view s, std::uint64_t& v) {
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
        };
        if (token.empty() || !parse_u64(index_field, index) || !parse_u64(count_field, count)) {
            throw ParseError(source, line_no, "malformed vocabulary entry");
        }
        if (index != vocab.tokens_.size() + 1) {
            throw ParseError(source, line_no,
                             "index " + std::to_string(index) + " out of sequence");
        }
        if (count == 0) {
            throw ParseError(source, line_no, "count must be at least 1");
        }
        if (!vocab.counts_.empty() && count > vocab.counts_.back()) {
            throw ParseError(source, line_no, "counts must be non-increasing by index");
        }
        std::string tok(token);
        if (!vocab.index_.emplace(tok, static_cast<TokenIndex>(index)).second) {
            throw ParseError(source, line_no, "duplicate token '" + tok + "'");
        }
        vocab.tokens_.push_back(std::move(tok));
        vocab.counts_.push_back(count);
    }
    return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
    io::write_file_atomic(path, serialize());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    return parse(io::read_file(path), path.string());
}

Sequence encode_sequence(const Tokens& tokens, const Vocabulary& vocab, std::size_t max_len) {
    if (max_len == 0) {
        throw Error("encode_sequence: max_len must be at least 1");
    }
    Sequence seq(max_len, kPaddingIndex);
    const std::size_t n = std::min(tokens.size(), max_len);
    for (std::size_t i = 0; i < n; ++i) {
        seq[i] = vocab.index_of(tokens[i]);
    }
    return seq;
}

Tokens decode_sequence(const Sequence& seq, const Vocabulary& vocab) {
    Tokens out;
    for (TokenIndex idx : seq) {
        if (idx == kPaddingIndex) {
            continue;
        }
        out.push_back(idx == vocab.oov_index() ? std::string{} : vocab.token_at(idx));
    }
    return out;
}

EncodedDataset EncodedDataset::subset(const std::vector<std::size_t>& rows) const {
    EncodedDataset out;
    out.max_len = max_len;
    out.tweets.reserve(rows.size());
    out.labels.reserve(rows.size());
    out.ids.reserve(rows.size());
    for (std::size_t r : rows) {
        out.tweets.push_back(tweets.at(r));
        out.labels.push_back(labels.at(r));
        out.ids.push_back(ids.at(r));
    }
    return out;
}

std::vector<Tokens> preprocess_corpus(const Corpus& corpus, const PreprocessConfig& config) {
    std::vector<Tokens> out;
    out.reserve(corpus.size());
    for (const auto& rec : corpus) {
        out.push_back(preprocess(rec.text, config));
    }
    return out;
}

EncodedDataset encode_dataset(const Corpus& corpus, const PreprocessConfig& config,
                              const Vocabulary& vocab, std::size_t max_len) {
    EncodedDataset ds;
    ds.max_len = max_len;
    ds.tweets.reserve(corpus.size());
    ds.labels.reserve(corpus.size());
    ds.ids.reserve(corpus.size());
    for (const auto& rec : corpus) {
        ds.tweets.push_back(encode_sequence(preprocess(rec.text, config), vocab, max_len));
        ds.labels.push_back(rec.label);
        ds.ids.push_back(rec.id);
    }
    return ds;
}

}  // namespace acoso

#include "acoso/embeddings.hpp"

#include "acoso/error.hpp"
#include "acoso/io.hpp"
#include "acoso/random.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace acoso {

bool WordVectorStore::insert(const std::string& token, std::span<const double> vector) {
    if (vector.size() != dim_) {
        throw Error("vector for '" + token + "' has " + std::to_string(vector.size()) +
                    " components, expected " + std::to_string(dim_));
    }
    if (rows_.contains(token)) {
        return false;
    }
    rows_.emplace(token, tokens_.size());
    tokens_.push_back(token);
    data_.insert(data_.end(), vector.begin(), vector.end());
    return true;
}

std::span<const double> WordVectorStore::find(const std::string& token) const {
    const auto it = rows_.find(token);
    if (it == rows_.end()) {
        return {};
    }
    return {data_.data() + it->second * dim_, dim_};
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        if (i == line.size()) {
            break;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') {
            ++j;
        }
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
}

}  // namespace

WordVectorStore parse_word_vectors(std::istream& in, std::size_t expected_dim,
                                   const std::string& source,
                                   const std::function<bool(const std::string&)>& keep) {
    if (expected_dim == 0) {
        throw Error("expected dimension must be at least 1");
    }
    WordVectorStore store(expected_dim);
    std::vector<double> values(expected_dim);
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto fields = split_fields(line);
        if (fields.empty()) {
            continue;
        }
        if (!seen_content) {
            seen_content = true;
            std::uint64_t count = 0;
            std::uint64_t dim = 0;
            if (fields.size() == 2 && parse_number(fields[0], count) && parse_number(fields[1], dim)) {
                if (dim != expected_dim) {
                    throw ParseError(source, line_no,
                                     "header declares dimension " + std::to_string(dim) +
                                         ", expected " + std::to_string(expected_dim));
                }
                continue;
            }
        }
        if (fields.size() - 1 != expected_dim) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(expected_dim) + " components, found " +
                                 std::to_string(fields.size() - 1));
        }
        for (std::size_t d = 0; d < expected_dim; ++d) {
            if (!parse_number(fields[d + 1], values[d]) || !std::isfinite(values[d])) {
                throw ParseError(source, line_no,
                                 "component " + std::to_string(d + 1) + " is not a finite number");
            }
        }
        std::string token(fields[0]);
        if (!keep || keep(token)) {
            store.insert(token, values);
        }
    }
    if (!seen_content) {
        throw ParseError(source, 0, "empty word-vector file");
    }
    return store;
}

WordVectorStore load_word_vectors(const std::filesystem::path& path, std::size_t expected_dim,
                                  const std::function<bool(const std::string&)>& keep) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return parse_word_vectors(in, expected_dim, path.string(), keep);
}

EmbeddingMatrix build_embedding_matrix(const Vocabulary& vocab, const WordVectorStore& store) {
    if (store.dim() == 0) {
        throw Error("build_embedding_matrix: store dimension must be at least 1");
    }
    const std::size_t v = vocab.size();
    const std::size_t dim = store.dim();
    EmbeddingMatrix m;
    m.rows = v + 2;
    m.dim = dim;
    m.values.assign(m.rows * dim, 0.0);

    std::vector<double> mean(dim, 0.0);
    std::vector<bool> found(v + 1, false);
    std::size_t matched = 0;
    for (std::size_t i = 1; i <= v; ++i) {
        const auto vec = store.find(vocab.token_at(static_cast<TokenIndex>(i)));
        if (vec.empty()) {
            continue;
        }
        found[i] = true;
        ++matched;
        auto row = m.row(i);
        for (std::size_t d = 0; d < dim; ++d) {
            row[d] = vec[d];
            mean[d] += vec[d];
        }
    }
    if (matched > 0) {
        for (auto& x : mean) {
            x /= static_cast<double>(matched);
        }
    }
    for (std::size_t i = 1; i <= v; ++i) {
        if (!found[i]) {
            std::copy(mean.begin(), mean.end(), m.row(i).begin());
        }
    }
    std::copy(mean.begin(), mean.end(), m.row(v + 1).begin());
    m.coverage = v == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(v);
    return m;
}

std::string format_random_vectors(const std::vector<std::string>& tokens, std::size_t dim,
                                  std::uint64_t seed) {
    rng::Engine engine(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    std::string out = std::to_string(tokens.size()) + " " + std::to_string(dim) + "\n";
    for (const auto& token : tokens) {
        out += token;
        for (std::size_t d = 0; d < dim; ++d) {
            out += ' ';
            out += io::format_double(rng::normal(engine) * scale);
        }
        out += '\n';
    }
    return out;
}

}  // namespace acoso

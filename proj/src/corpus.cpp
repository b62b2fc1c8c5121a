#include "acoso/corpus.hpp"

#include "acoso/error.hpp"
#include "acoso/io.hpp"
#include "acoso/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace acoso {

namespace {

bool starts_with(std::u32string_view s, std::u32string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

bool is_url_or_mention(std::u32string_view token) {
    return starts_with(token, U"http") || starts_with(token, U"www") || starts_with(token, U"@");
}

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += w;
    }
    return out;
}

}  // namespace

KeywordSet::KeywordSet(std::vector<std::string> phrases, Label polarity) : polarity_(polarity) {
    std::unordered_set<std::string> seen;
    for (const auto& raw : phrases) {
        const auto words = text::split_whitespace(raw);
        if (words.empty()) {
            throw Error("keyword phrase is empty");
        }
        auto phrase = join(words);
        if (text::lower_words(phrase) != words) {
            throw Error("keyword phrase is not lowercase: " + phrase);
        }
        if (!seen.insert(phrase).second) {
            throw Error("duplicate keyword phrase: " + phrase);
        }
        phrases_.push_back(std::move(phrase));
    }
}

KeywordSet KeywordSet::load(const std::filesystem::path& path, Label polarity) {
    return KeywordSet(io::read_lines(path, true), polarity);
}

std::set<std::string> PreprocessConfig::load_stopwords(const std::filesystem::path& path) {
    std::set<std::string> out;
    for (auto& line : io::read_lines(path, false)) {
        if (text::split_whitespace(line).size() != 1) {
            throw Error("stop word contains whitespace: " + line);
        }
        out.insert(std::move(line));
    }
    return out;
}

Corpus parse_corpus(std::string_view csv, const std::string& source) {
    if (csv.substr(0, 3) == "\xEF\xBB\xBF") {
        csv.remove_prefix(3);
    }
    const auto records = io::parse_csv(csv, source);
    if (records.empty()) {
        throw ParseError(source, 1, "missing header id,label,text");
    }
    const auto& header = records.front();
    if (header.fields != std::vector<std::string>{"id", "label", "text"}) {
        throw ParseError(source, header.line, "header must be id,label,text");
    }

    Corpus corpus;
    corpus.reserve(records.size() - 1);
    std::unordered_set<std::string> ids;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != 3) {
            throw ParseError(source, rec.line,
                             "expected 3 columns, found " + std::to_string(rec.fields.size()));
        }
        const auto& id = rec.fields[0];
        const auto& label = rec.fields[1];
        if (id.empty()) {
            throw ParseError(source, rec.line, "empty id");
        }
        if (label != "0" && label != "1") {
            throw ParseError(source, rec.line, "label must be 0 or 1, got '" + label + "'");
        }
        if (!ids.insert(id).second) {
            throw ParseError(source, rec.line, "duplicate id '" + id + "'");
        }
        corpus.push_back({id, rec.fields[2], label == "1" ? Label::bullying : Label::clean});
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
    return parse_corpus(io::read_file(path), path.string());
}

std::string format_corpus(const Corpus& corpus) {
    std::string out = "id,label,text\n";
    for (const auto& rec : corpus) {
        out += io::csv_escape(rec.id);
        out += ',';
        out += rec.label == Label::bullying ? '1' : '0';
        out += ',';
        // Always quote text so that empty texts stay visible as "".
        out += '"';
        for (char c : rec.text) {
            if (c == '"') {
                out += '"';
            }
            out += c;
        }
        out += "\"\n";
    }
    return out;
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
    io::write_file_atomic(path, format_corpus(corpus));
}

Tokens preprocess(std::string_view raw, const PreprocessConfig& config) {
    auto chars = text::decode_utf8(text::to_nfc(raw));

    for (auto& c : chars) {
        c = text::to_lower(c);
    }

    // Blank out whitespace-delimited URL and mention tokens.
    for (std::size_t i = 0; i < chars.size();) {
        if (text::is_space(chars[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < chars.size() && !text::is_space(chars[j])) {
            ++j;
        }
        if (is_url_or_mention(std::u32string_view(chars).substr(i, j - i))) {
            std::fill(chars.begin() + static_cast<std::ptrdiff_t>(i),
                      chars.begin() + static_cast<std::ptrdiff_t>(j), U' ');
        }
        i = j;
    }

    auto letters_only = [&] {
        for (auto& c : chars) {
            if (!text::is_letter(c)) {
                c = U' ';
            }
        }
    };
    if (config.keep_letters_only) {
        letters_only();
    }
    if (config.fold_accents) {
        chars = text::fold_accents(chars);
        if (config.keep_letters_only) {
            letters_only();
        }
    }

    Tokens out;
    for (auto& token : text::split_whitespace(text::encode_utf8(chars))) {
        // Fragments such as "(https" survive the URL pass once punctuation is
        // stripped; drop them here so the pipeline is idempotent.
        if (token.starts_with("http") || token.starts_with("www")) {
            continue;
        }
        if (config.stopwords.contains(token)) {
            continue;
        }
        out.push_back(std::move(token));
    }
    return out;
}

Corpus keyword_filter(const Corpus& corpus, const KeywordSet& keywords) {
    if (keywords.empty()) {
        throw Error("keyword_filter: keyword set is empty");
    }
    const PreprocessConfig plain;
    std::vector<Tokens> phrases;
    for (const auto& phrase : keywords.phrases()) {
        auto tokens = preprocess(phrase, plain);
        if (!tokens.empty()) {
            phrases.push_back(std::move(tokens));
        }
    }

    Corpus out;
    for (const auto& rec : corpus) {
        const auto tokens = preprocess(rec.text, plain);
        const bool hit = std::any_of(phrases.begin(), phrases.end(), [&](const Tokens& phrase) {
            return std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end()) !=
                   tokens.end();
        });
        if (hit) {
            out.push_back(rec);
        }
    }
    return out;
}

ZipfSampler::ZipfSampler(std::size_t n_types, double alpha) {
    if (n_types == 0) {
        throw Error("ZipfSampler: need at least one type");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error("ZipfSampler: alpha must be positive");
    }
    cdf_.resize(n_types);
    double total = 0.0;
    for (std::size_t r = 1; r <= n_types; ++r) {
        total += std::pow(static_cast<double>(r), -alpha);
        cdf_[r - 1] = total;
    }
    for (auto& v : cdf_) {
        v /= total;
    }
    cdf_.back() = 1.0;
}

std::size_t ZipfSampler::draw(rng::Engine& engine) const {
    const double u = rng::uniform01(engine);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::size_t>(it - cdf_.begin()) + 1;
}

std::string filler_word(std::size_t rank) {
    static constexpr std::string_view kConsonants = "bcdfglmnprstv";
    static constexpr std::string_view kVowels = "aeiou";
    constexpr std::size_t kSyllables = kConsonants.size() * kVowels.size();
    if (rank == 0) {
        throw Error("filler_word: rank is 1-based");
    }
    std::string word = "k";
    std::size_t n = rank - 1;
    do {
        const std::size_t s = n % kSyllables;
        word += kVowels[s % kVowels.size()];
        word += kConsonants[s / kVowels.size()];
        n /= kSyllables;
    } while (n > 0);
    return word;
}

Corpus generate_synthetic_corpus(const SyntheticSpec& spec, const KeywordSet& bullying,
                                 const KeywordSet& clean) {
    if (spec.n_bullying > 0 && bullying.empty()) {
        throw Error("synthetic corpus: bullying keyword set is empty");
    }
    if (spec.n_clean > 0 && clean.empty()) {
        throw Error("synthetic corpus: clean keyword set is empty");
    }
    if (spec.filler_vocab_size == 0) {
        throw Error("synthetic corpus: filler vocabulary size must be positive");
    }
    const ZipfSampler sampler(spec.filler_vocab_size, spec.zipf_alpha);
    rng::Engine engine(spec.seed);

    std::vector<Label> labels(spec.n_bullying, Label::bullying);
    labels.insert(labels.end(), spec.n_clean, Label::clean);
    rng::shuffle(std::span<Label>(labels), engine);

    Corpus corpus;
    corpus.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& keywords = labels[i] == Label::bullying ? bullying : clean;
        const auto& phrase = keywords.phrases()[rng::below(engine, keywords.phrases().size())];
        const std::size_t n_filler = 3 + rng::below(engine, 10);
        const std::size_t slot = rng::below(engine, n_filler + 1);
        std::vector<std::string> words;
        for (std::size_t k = 0; k < n_filler; ++k) {
            if (k == slot) {
                words.push_back(phrase);
            }
            words.push_back(filler_word(sampler.draw(engine)));
        }
        if (slot == n_filler) {
            words.push_back(phrase);
        }
        char id[32];
        std::snprintf(id, sizeof(id), "syn-%06zu", i + 1);
        corpus.push_back({id, join(words), labels[i]});
    }
    return corpus;
}

}  // namespace acoso

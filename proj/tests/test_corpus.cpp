#include "acoso/corpus.hpp"
#include "acoso/error.hpp"
#include "acoso/io.hpp"
#include "acoso/text.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace acoso;

namespace {

PreprocessConfig with_stopwords(std::set<std::string> words) {
    PreprocessConfig cfg;
    cfg.stopwords = std::move(words);
    return cfg;
}

std::string join(const Tokens& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        out += (out.empty() ? "" : " ") + t;
    }
    return out;
}

}  // namespace

TEST_CASE("load_corpus returns records in file order") {
    const auto corpus = load_corpus(testing::fixture("corpus_small.csv"));
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[0] == LabeledText{"a", "te odio", Label::bullying});
    CHECK(corpus[1] == LabeledText{"b", "hola amiga", Label::clean});
}

TEST_CASE("load_corpus accepts a header-only file") {
    CHECK(parse_corpus("id,label,text\n").empty());
}

TEST_CASE("load_corpus reports the offending row") {
    auto line_of = [](const std::string& csv) {
        try {
            parse_corpus(csv, "c.csv");
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("id,label,text\na,1,x\nb,2,y\n") == 3);
    CHECK(line_of("id,label,text\na,1,x\nb,0\n") == 3);
    CHECK(line_of("id,label,text\na,1,x\na,0,y\n") == 3);
    CHECK(line_of("id,label,text\n,1,x\n") == 2);
    CHECK(line_of("id,text,label\n") == 1);
    CHECK(line_of("") == 1);
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.csv"), Error);
}

TEST_CASE("corpus files round-trip through save and load") {
    testing::TempDir dir;
    const Corpus corpus{{"x1", "dijo \"hola\", y\nse fue", Label::clean},
                        {"x2", "", Label::bullying},
                        {"x3", "eres patético", Label::bullying}};
    save_corpus(dir / "c.csv", corpus);
    CHECK(load_corpus(dir / "c.csv") == corpus);
}

TEST_CASE("preprocess applies the seven steps in order") {
    CHECK(preprocess("Hola @juan mira https://t.co/x QUE PATÉTICO!!!", with_stopwords({"que"})) ==
          Tokens{"hola", "mira", "patético"});
    CHECK(preprocess("", {}).empty());
    CHECK(preprocess("123 !!! @solo www.x.com", {}).empty());
}

TEST_CASE("preprocess accent folding keeps ñ") {
    PreprocessConfig cfg;
    cfg.fold_accents = true;
    CHECK(preprocess("Canción PATÉTICA del Niño pingüino", cfg) ==
          Tokens{"cancion", "patetica", "del", "niño", "pinguino"});
}

TEST_CASE("preprocess composes decomposed accents before the letters-only pass") {
    CHECK(preprocess("nin\xCC\x83o", {}) == Tokens{"niño"});
}

TEST_CASE("preprocess without the letters-only pass keeps punctuation") {
    PreprocessConfig cfg;
    cfg.keep_letters_only = false;
    CHECK(preprocess("Hola, @ana!! 2x", cfg) == Tokens{"hola,", "2x"});
}

TEST_CASE("preprocess is idempotent and emits lowercase letters only") {
    // Hand-rolled generator over a pool that mixes letters, accents, digits,
    // punctuation, URL and mention prefixes.
    const std::vector<std::string> pool = {
        "a", "B", "ñ", "Ñ", "é", "Ü", "z", "Q", " ", "  ", "\t", "1", "9", "!", ",", ".",
        "@", "#", "http", "HTTPS://", "www.", "(", ")", "_", "-", "/", "que", "de", "😀", "ç"};
    const auto stop = with_stopwords({"que", "de", "a"});
    rng::Engine engine(20240611);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text;
        const auto len = rng::below(engine, 25);
        for (std::size_t i = 0; i < len; ++i) {
            text += pool[rng::below(engine, pool.size())];
        }
        for (bool fold : {false, true}) {
            auto cfg = stop;
            cfg.fold_accents = fold;
            const auto once = preprocess(text, cfg);
            CHECK_MESSAGE(preprocess(join(once), cfg) == once, text);
            for (const auto& token : once) {
                REQUIRE_FALSE(token.empty());
                for (char32_t c : text::decode_utf8(token)) {
                    CHECK(text::is_letter(c));
                    CHECK_FALSE(text::is_upper(c));
                }
            }
        }
    }
}

TEST_CASE("keyword sets validate their phrases") {
    CHECK_NOTHROW(KeywordSet({"te odio", "gay"}, Label::bullying));
    CHECK(KeywordSet({"  te   odio "}, Label::bullying).phrases() == std::vector<std::string>{"te odio"});
    CHECK_THROWS_AS(KeywordSet({"Te odio"}, Label::bullying), Error);
    CHECK_THROWS_AS(KeywordSet({"gay", "gay"}, Label::bullying), Error);
    CHECK_THROWS_AS(KeywordSet({"   "}, Label::bullying), Error);
}

TEST_CASE("shipped keyword files reproduce the two keyword tables") {
    const auto bullying = KeywordSet::load(testing::shipped("keywords_bullying.txt"), Label::bullying);
    const auto clean = KeywordSet::load(testing::shipped("keywords_no_bullying.txt"), Label::clean);
    CHECK(bullying.phrases().size() == 30);
    CHECK(clean.phrases().size() == 21);
    CHECK(bullying.phrases().front() == "care asno");
    CHECK(bullying.phrases().back() == "eres patetico");
    CHECK(clean.phrases().back() == "vive feliz");
}

TEST_CASE("shipped stop words never remove a keyword token") {
    const auto stop = PreprocessConfig::load_stopwords(testing::shipped("stopwords_es.txt"));
    CHECK(stop.size() > 100);
    CHECK(stop.contains("que"));
    for (const char* file : {"keywords_bullying.txt", "keywords_no_bullying.txt"}) {
        const auto keywords = KeywordSet::load(testing::shipped(file), Label::clean);
        for (const auto& phrase : keywords.phrases()) {
            for (const auto& token : text::split_whitespace(phrase)) {
                CHECK_MESSAGE(!stop.contains(token), token);
            }
        }
    }
}

TEST_CASE("stop-word entries may not contain whitespace") {
    testing::TempDir dir;
    io::write_file_atomic(dir / "s.txt", "que\nde la\n");
    CHECK_THROWS_AS(PreprocessConfig::load_stopwords(dir / "s.txt"), Error);
}

TEST_CASE("keyword_filter matches contiguous token phrases case-insensitively") {
    const Corpus corpus{{"1", "eres patetico hoy", Label::bullying},
                        {"2", "buen dia", Label::clean},
                        {"3", "Te ODIO", Label::bullying},
                        {"4", "eres muy patetico", Label::bullying},
                        {"5", "¡Eres patetico!", Label::bullying}};
    const KeywordSet one({"eres patetico"}, Label::bullying);
    const auto hits = keyword_filter(corpus, one);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].id == "1");
    CHECK(hits[1].id == "5");

    const auto odio = keyword_filter(corpus, KeywordSet({"te odio"}, Label::bullying));
    REQUIRE(odio.size() == 1);
    CHECK(odio[0].id == "3");

    CHECK_THROWS_AS(keyword_filter(corpus, KeywordSet({}, Label::bullying)), Error);
}

TEST_CASE("keyword_filter output is an order-preserving subsequence") {
    rng::Engine engine(5);
    const std::vector<std::string> words{"te", "odio", "hola", "gay", "amiga", "mira"};
    Corpus corpus;
    for (int i = 0; i < 200; ++i) {
        std::string text;
        for (std::size_t k = 0, n = rng::below(engine, 6); k < n; ++k) {
            text += words[rng::below(engine, words.size())] + " ";
        }
        corpus.push_back({std::to_string(i), text, Label::clean});
    }
    const auto hits = keyword_filter(corpus, KeywordSet({"te odio", "gay"}, Label::bullying));
    auto it = corpus.begin();
    for (const auto& h : hits) {
        it = std::find(it, corpus.end(), h);
        REQUIRE(it != corpus.end());
        ++it;
    }
}

TEST_CASE("filler words are distinct, letters-only and start with k") {
    std::set<std::string> seen;
    for (std::size_t r = 1; r <= 5000; ++r) {
        const auto w = filler_word(r);
        CHECK(w.front() == 'k');
        CHECK(preprocess(w, {}) == Tokens{w});
        CHECK(seen.insert(w).second);
    }
}

TEST_CASE("zipf sampler follows the rank law") {
    const ZipfSampler sampler(10, 1.0);
    rng::Engine engine(3);
    std::vector<int> hist(11, 0);
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) {
        const auto r = sampler.draw(engine);
        REQUIRE(r >= 1);
        REQUIRE(r <= 10);
        ++hist[r];
    }
    double h = 0.0;
    for (int r = 1; r <= 10; ++r) {
        h += 1.0 / r;
    }
    for (int r = 1; r <= 10; ++r) {
        const double expected = draws / (r * h);
        CHECK(std::abs(hist[r] - expected) < 5.0 * std::sqrt(expected));
    }
    CHECK_THROWS_AS(ZipfSampler(10, 0.0), Error);
    CHECK_THROWS_AS(ZipfSampler(0, 1.0), Error);
}

TEST_CASE("synthetic corpus honours counts, labels and seeds") {
    const KeywordSet pos({"te odio", "eres patetico"}, Label::bullying);
    const KeywordSet neg({"te quiero", "hola"}, Label::clean);

    CHECK(generate_synthetic_corpus({0, 0, 50, 1.0, 1}, pos, neg).empty());

    const SyntheticSpec spec{100, 400, 200, 1.0, 7};
    const auto a = generate_synthetic_corpus(spec, pos, neg);
    CHECK(a == generate_synthetic_corpus(spec, pos, neg));
    REQUIRE(a.size() == 500);
    CHECK(std::count_if(a.begin(), a.end(), [](const auto& r) { return r.label == Label::bullying; }) == 100);

    auto other = spec;
    other.seed = 8;
    CHECK_FALSE(a == generate_synthetic_corpus(other, pos, neg));

    std::set<std::string> ids;
    for (const auto& rec : a) {
        CHECK(ids.insert(rec.id).second);
        const auto& keywords = rec.label == Label::bullying ? pos : neg;
        CHECK(keyword_filter({rec}, keywords).size() == 1);
        const auto tokens = preprocess(rec.text, {});
        const auto fillers = std::count_if(tokens.begin(), tokens.end(),
                                           [](const std::string& t) { return t.front() == 'k'; });
        CHECK(fillers >= 3);
        CHECK(fillers <= 12);
    }
}

TEST_CASE("synthetic corpus rejects empty keyword sets when texts are requested") {
    const KeywordSet pos({"te odio"}, Label::bullying);
    CHECK_THROWS_AS(generate_synthetic_corpus({0, 1, 10, 1.0, 1}, pos, KeywordSet{}), Error);
    CHECK_NOTHROW(generate_synthetic_corpus({1, 0, 10, 1.0, 1}, pos, KeywordSet{}));
    CHECK_THROWS_AS(generate_synthetic_corpus({1, 0, 10, -1.0, 1}, pos, KeywordSet{}), Error);
}

#include "acoso/error.hpp"
#include "acoso/vocab.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace acoso;

namespace {

FrequencyTable table(std::map<std::string, std::uint64_t> counts) {
    return FrequencyTable{std::move(counts)};
}

}  // namespace

TEST_CASE("build_frequency counts occurrences") {
    CHECK(build_frequency({{"hola", "hola", "amigo"}, {"hola"}}).counts ==
          std::map<std::string, std::uint64_t>{{"hola", 3}, {"amigo", 1}});
    CHECK(build_frequency({}).empty());
    const auto a = build_frequency({{"a"}, {"a"}, {"a"}});
    CHECK(a.counts == std::map<std::string, std::uint64_t>{{"a", 3}});
    CHECK(a.total() == 3);
}

TEST_CASE("vocabulary ranks by count then token") {
    const auto v = build_vocabulary(table({{"hola", 3}, {"amigo", 1}}));
    CHECK(v.index_of("hola") == 1);
    CHECK(v.index_of("amigo") == 2);
    CHECK(v.oov_index() == 3);
    CHECK(v.index_of("zzz") == 3);
    CHECK(v.token_at(1) == "hola");
    CHECK(v.count_at(2) == 1);

    const auto tie = build_vocabulary(table({{"b", 2}, {"a", 2}}));
    CHECK(tie.index_of("a") == 1);
    CHECK(tie.index_of("b") == 2);

    const auto empty = build_vocabulary({});
    CHECK(empty.size() == 0);
    CHECK(empty.oov_index() == 1);
    CHECK_THROWS_AS(empty.token_at(0), Error);
}

TEST_CASE("vocabulary cap keeps the most frequent tokens") {
    const auto v = build_vocabulary(table({{"a", 1}, {"b", 5}, {"c", 3}}), 2);
    CHECK(v.tokens() == std::vector<std::string>{"b", "c"});
    CHECK(v.index_of("a") == v.oov_index());
}

TEST_CASE("vocabulary indices are monotone in frequency") {
    rng::Engine engine(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::map<std::string, std::uint64_t> counts;
        for (int t = 0; t < 40; ++t) {
            counts[std::string(1, static_cast<char>('a' + rng::below(engine, 26))) +
                   static_cast<char>('a' + rng::below(engine, 3))] = 1 + rng::below(engine, 6);
        }
        const auto v = build_vocabulary(table(counts));
        for (TokenIndex i = 1; i < static_cast<TokenIndex>(v.size()); ++i) {
            CHECK(v.count_at(i) >= v.count_at(i + 1));
            if (v.count_at(i) == v.count_at(i + 1)) {
                CHECK(v.token_at(i) < v.token_at(i + 1));
            }
        }
    }
}

TEST_CASE("vocabulary files round-trip") {
    testing::TempDir dir;
    const auto v = build_vocabulary(table({{"hola", 3}, {"amigo", 1}, {"ñandú", 2}}));
    v.save(dir / "v.tsv");
    CHECK(Vocabulary::load(dir / "v.tsv") == v);
    CHECK(v.serialize() == "hola\t1\t3\nñandú\t2\t2\namigo\t3\t1\n");
}

TEST_CASE("vocabulary parser rejects malformed files") {
    CHECK_THROWS_AS(Vocabulary::parse("a\t2\t1\n"), ParseError);
    CHECK_THROWS_AS(Vocabulary::parse("a\t1\t1\nb\t2\t5\n"), ParseError);
    CHECK_THROWS_AS(Vocabulary::parse("a\t1\n"), ParseError);
    CHECK_THROWS_AS(Vocabulary::parse("a\t1\t0\n"), ParseError);
    CHECK_THROWS_AS(Vocabulary::parse("a\t1\t2\na\t2\t1\n"), ParseError);
    CHECK(Vocabulary::parse("").size() == 0);
}

TEST_CASE("encode_sequence pads, truncates and maps unknowns") {
    const auto v = Vocabulary::parse("hola\t1\t3\namigo\t2\t2\npatetico\t3\t1\n");
    CHECK(encode_sequence({"hola", "patetico"}, v, 5) == Sequence{1, 3, 0, 0, 0});
    CHECK(encode_sequence({}, v, 3) == Sequence{0, 0, 0});
    CHECK(encode_sequence({"zzz"}, v, 2) == Sequence{4, 0});
    CHECK(encode_sequence({"hola", "amigo", "patetico"}, v, 2) == Sequence{1, 2});
    CHECK_THROWS_AS(encode_sequence({"hola"}, v, 0), Error);
    CHECK(decode_sequence(Sequence{1, 4, 3, 0}, v) == Tokens{"hola", "", "patetico"});
}

TEST_CASE("encoded sequences decode back to the in-vocabulary prefix") {
    const auto v = Vocabulary::parse("a\t1\t3\nb\t2\t2\nc\t3\t1\n");
    rng::Engine engine(2);
    for (int trial = 0; trial < 100; ++trial) {
        Tokens tokens;
        for (std::size_t i = 0, n = rng::below(engine, 8); i < n; ++i) {
            tokens.push_back(std::string(1, static_cast<char>('a' + rng::below(engine, 3))));
        }
        const std::size_t max_len = 1 + rng::below(engine, 6);
        const auto seq = encode_sequence(tokens, v, max_len);
        CHECK(seq.size() == max_len);
        const Tokens prefix(tokens.begin(), tokens.begin() + std::min(tokens.size(), max_len));
        CHECK(decode_sequence(seq, v) == prefix);
    }
}

TEST_CASE("encode_dataset keeps rows aligned, including empty texts") {
    const Corpus corpus{{"a", "te odio", Label::bullying}, {"b", "123 !!!", Label::clean}};
    const auto tokens = preprocess_corpus(corpus, {});
    const auto vocab = build_vocabulary(build_frequency(tokens));
    const auto ds = encode_dataset(corpus, {}, vocab, 4);
    CHECK(ds.tweets.size() == 2);
    CHECK(ds.labels == std::vector<Label>{Label::bullying, Label::clean});
    CHECK(ds.ids == std::vector<std::string>{"a", "b"});
    CHECK(ds.tweets[1] == Sequence{0, 0, 0, 0});
    CHECK(ds == encode_dataset(corpus, {}, vocab, 4));

    const auto sub = ds.subset({1, 0});
    CHECK(sub.ids == std::vector<std::string>{"b", "a"});
    CHECK(sub.tweets[1] == ds.tweets[0]);
}

#include "acoso/embeddings.hpp"
#include "acoso/error.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <sstream>

using namespace acoso;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

WordVectorStore parse(const std::string& text, std::size_t dim) {
    std::istringstream in(text);
    return parse_word_vectors(in, dim, "inline");
}

std::size_t error_line(const std::string& text, std::size_t dim) {
    try {
        parse(text, dim);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("word vectors load with and without a header") {
    const auto plain = load_word_vectors(testing::fixture("vectors_plain.txt"), 3);
    CHECK(plain.size() == 2);
    CHECK(plain.dim() == 3);
    CHECK(vec(plain.find("hola")) == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(vec(plain.find("amigo")) == std::vector<double>{1, 0, 0});
    CHECK(plain.find("nada").empty());

    const auto header = load_word_vectors(testing::fixture("vectors_header.txt"), 3);
    CHECK(header.tokens() == plain.tokens());
    CHECK(vec(header.find("hola")) == vec(plain.find("hola")));
    CHECK(vec(header.find("amigo")) == vec(plain.find("amigo")));
}

TEST_CASE("word vector errors carry line numbers") {
    CHECK(error_line("hola 0.1 0.2\n", 3) == 1);
    CHECK(error_line("a 1 2 3\nb 1 2\n", 3) == 2);
    CHECK(error_line("a 1 2 3\nb 1 2 3 4\n", 3) == 2);
    CHECK(error_line("a 1 2 nan\n", 3) == 1);
    CHECK(error_line("2 4\na 1 2 3 4\n", 3) == 1);
    CHECK_THROWS_AS(load_word_vectors(testing::fixture("vectors_bad_dim.txt"), 3), ParseError);
    try {
        load_word_vectors(testing::fixture("vectors_bad_dim.txt"), 3);
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    try {
        load_word_vectors(testing::fixture("vectors_bad_number.txt"), 3);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
    CHECK_THROWS_AS(parse("", 3), ParseError);
    CHECK_THROWS_AS(load_word_vectors("/nonexistent/vecs.txt", 3), Error);
}

TEST_CASE("word vector loader keeps first duplicates and honours the filter") {
    const auto dup = parse("a 1 1\na 2 2\nb 3 3\n", 2);
    CHECK(dup.size() == 2);
    CHECK(vec(dup.find("a")) == std::vector<double>{1, 1});

    std::istringstream in("a 1 1\nb 2 2\n");
    const auto kept = parse_word_vectors(in, 2, "inline", [](const std::string& t) { return t == "b"; });
    CHECK(kept.tokens() == std::vector<std::string>{"b"});
    CHECK(parse("3 2\n", 2).size() == 0);
}

TEST_CASE("embedding matrix aligns rows with vocabulary indices") {
    WordVectorStore store(2);
    store.insert("a", std::vector<double>{2, 4});

    const auto one = build_embedding_matrix(Vocabulary::parse("a\t1\t1\n"), store);
    CHECK(one.rows == 3);
    CHECK(one.dim == 2);
    CHECK(vec(one.row(0)) == std::vector<double>{0, 0});
    CHECK(vec(one.row(1)) == std::vector<double>{2, 4});
    CHECK(one.coverage == 1.0);

    const auto none = build_embedding_matrix(Vocabulary::parse("zzz\t1\t1\n"), store);
    CHECK(none.coverage == 0.0);
    CHECK(vec(none.row(1)) == std::vector<double>{0, 0});
    CHECK(vec(none.row(2)) == std::vector<double>{0, 0});

    const auto half = build_embedding_matrix(Vocabulary::parse("a\t1\t2\nb\t2\t1\n"), store);
    CHECK(half.rows == 4);
    CHECK(half.coverage == 0.5);
    CHECK(vec(half.row(2)) == std::vector<double>{2, 4});
    CHECK(vec(half.row(3)) == std::vector<double>{2, 4});
    CHECK(half == build_embedding_matrix(Vocabulary::parse("a\t1\t2\nb\t2\t1\n"), store));
}

TEST_CASE("random vectors are reproducible and loadable") {
    const std::vector<std::string> tokens{"hola", "amigo", "odio"};
    const auto text = format_random_vectors(tokens, 5, 9);
    CHECK(text == format_random_vectors(tokens, 5, 9));
    CHECK(text != format_random_vectors(tokens, 5, 10));
    const auto store = parse(text, 5);
    CHECK(store.tokens() == tokens);
}

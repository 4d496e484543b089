#include <doctest.h>

#include <cmath>
#include <fstream>

#include "ctxmatch/errors.hpp"
#include "ctxmatch/textvec.hpp"

using namespace ctxmatch;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/ctxmatch_test_") + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

double norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

TEST_CASE("load_vectors reads word2vec text format") {
    auto path = write_temp("v1.vec", "1 3\nabc 0.1 0.2 0.3\n");
    VectorStore s = load_vectors(path);
    CHECK(s.dim == 3);
    REQUIRE(s.entries.count("abc"));
    CHECK(s.entries["abc"][1] == doctest::Approx(0.2));
}

TEST_CASE("load_vectors rejects dimension mismatch with line number") {
    auto path = write_temp("v2.vec", "1 3\nabc 0.1 0.2\n");
    try {
        load_vectors(path);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == "DimensionMismatch");
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("load_vectors rejects empty file") {
    auto path = write_temp("v3.vec", "");
    try {
        load_vectors(path);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == "MalformedHeader");
    }
}

TEST_CASE("load_vectors duplicate key: last wins") {
    auto path = write_temp("v4.vec", "2 2\nk 1 0\nk 0 1\n");
    VectorStore s = load_vectors(path);
    CHECK(s.entries["k"][0] == doctest::Approx(0.0));
    CHECK(s.entries["k"][1] == doctest::Approx(1.0));
}

TEST_CASE("embed_sentence is deterministic and trims input") {
    TextVectorProvider p;
    auto a = p.embed_sentence("funding which means the amount of financial support received");
    auto b = p.embed_sentence("funding which means the amount of financial support received");
    CHECK(cosine(a, b) == doctest::Approx(1.0));
    auto c = p.embed_sentence("funding which means the amount of financial support received  ");
    CHECK(cosine(a, c) == doctest::Approx(1.0));
}

TEST_CASE("fallback vectors are unit norm") {
    TextVectorProvider p;
    CHECK(norm(p.embed_sentence("some text")) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm(p.embed_token("token")) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm(p.embed_token("a")) == doctest::Approx(1.0).epsilon(1e-9));  // below ngram_min
}

TEST_CASE("near-spellings land nearer than unrelated tokens") {
    TextVectorProvider p;
    double near = cosine(p.embed_token("radcliffe"), p.embed_token("radclife"));
    double far = cosine(p.embed_token("radcliffe"), p.embed_token("zurich"));
    CHECK(near > far);
}

TEST_CASE("store lookup returns file vectors verbatim") {
    auto path = write_temp("v5.vec", "1 2\ntok 0.25 -0.5\n");
    TextVectorProvider p;
    p.set_token_store(load_vectors(path));
    auto v = p.embed_token("tok");
    CHECK(v[0] == doctest::Approx(0.25));
    CHECK(v[1] == doctest::Approx(-0.5));
    CHECK(p.token_dim() == 2);
}

TEST_CASE("cosine identities") {
    std::vector<double> u{1, 0}, v{0, 1}, w{-1, 0};
    CHECK(cosine(u, u) == doctest::Approx(1.0));
    CHECK(cosine(u, v) == doctest::Approx(0.0));
    CHECK(cosine(u, w) == doctest::Approx(-1.0));
}

TEST_CASE("cosine of a zero vector is 0; length mismatch is fatal") {
    std::vector<double> z{0, 0}, u{1, 0}, longer{1, 0, 0};
    CHECK(cosine(z, u) == doctest::Approx(0.0));
    CHECK_THROWS_AS(cosine(u, longer), Error);
}

TEST_CASE("sentence_key construction") {
    CHECK(sentence_key("funding", "the amount of financial support received") ==
          "funding which means the amount of financial support received");
    CHECK(sentence_key("funding", "") == "funding");
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "ctxmatch/embed.hpp"
#include "ctxmatch/errors.hpp"
#include "ctxmatch/textvec.hpp"

using namespace ctxmatch;

namespace {

WalkCorpus tiny_corpus(std::size_t repeats) {
    WalkCorpus c;
    c.node_ids = {"a", "b"};
    for (std::size_t i = 0; i < repeats; ++i) c.sequences.push_back({0, 1});
    return c;
}

WalkCorpus chain_corpus() {
    WalkCorpus c;
    c.node_ids = {"n1", "n2", "n3", "n4", "n5"};
    for (int i = 0; i < 30; ++i) c.sequences.push_back({0, 1, 2, 3, 4, 3, 2, 1});
    return c;
}

} // namespace

TEST_CASE("training on a repeated pair drives the loss down") {
    TrainConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 10;
    cfg.window = 1;
    cfg.negatives = 2;
    cfg.seed = 3;
    EmbeddingSpace space = train_skipgram(tiny_corpus(50), cfg);
    REQUIRE(space.epoch_loss.size() == 10);
    for (std::size_t e = 1; e < space.epoch_loss.size(); ++e)
        CHECK(space.epoch_loss[e] < space.epoch_loss[e - 1]);
}

TEST_CASE("deterministic training is bit-identical across runs") {
    TrainConfig cfg;
    cfg.dim = 12;
    cfg.epochs = 3;
    cfg.seed = 11;
    EmbeddingSpace a = train_skipgram(chain_corpus(), cfg);
    EmbeddingSpace b = train_skipgram(chain_corpus(), cfg);
    CHECK(a.input == b.input);
    CHECK(a.context == b.context);
    CHECK(a.epoch_loss == b.epoch_loss);
}

TEST_CASE("different seeds give different vectors") {
    TrainConfig cfg;
    cfg.dim = 12;
    cfg.epochs = 2;
    cfg.seed = 1;
    EmbeddingSpace a = train_skipgram(chain_corpus(), cfg);
    cfg.seed = 2;
    EmbeddingSpace b = train_skipgram(chain_corpus(), cfg);
    CHECK(a.input != b.input);
}

TEST_CASE("vocabulary covers every node above min_count") {
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 1;
    EmbeddingSpace space = train_skipgram(chain_corpus(), cfg);
    CHECK(space.vocab.size() == 5);
    for (const auto& id : {"n1", "n2", "n3", "n4", "n5"}) CHECK(space.index.count(id));
    CHECK(space.input.size() == 5 * 8);
}

TEST_CASE("min_count filtering can empty the vocabulary") {
    TrainConfig cfg;
    cfg.min_count = 1000;
    try {
        train_skipgram(chain_corpus(), cfg);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == "EmptyVocabulary");
    }
}

TEST_CASE("gradient check against central differences") {
    std::mt19937_64 rng(21);
    std::vector<GradientCheckSample> batch;
    for (int i = 0; i < 12; ++i) {
        GradientCheckSample s;
        s.center = rng() % 10;
        s.context = rng() % 10;
        for (int k = 0; k < 3; ++k) s.negatives.push_back(rng() % 10);
        batch.push_back(s);
    }
    double err = sgns_gradient_check(10, 8, batch, 7);
    CHECK(err <= 1e-4);
}

TEST_CASE("gradient check with no negatives") {
    std::vector<GradientCheckSample> batch{{0, 1, {}}};
    CHECK(sgns_gradient_check(4, 4, batch, 1) <= 1e-4);
}

TEST_CASE("nearest: ranking, filter, tie-break, unknown node") {
    EmbeddingSpace space;
    space.dim = 2;
    space.vocab = {"a", "b", "c", "d"};
    for (std::uint32_t i = 0; i < 4; ++i) space.index[space.vocab[i]] = i;
    // a=(1,0), b=(1,0.1), c=(0,1), d=(1,0.1) duplicate of b
    space.input = {1, 0, 1, 0.1f, 0, 1, 1, 0.1f};

    auto top = nearest(space, "a", 1, [](const std::string&) { return true; });
    REQUIRE(top.size() == 1);
    CHECK(top[0].node_id == "b");  // tie with d broken by id

    auto all = nearest(space, "a", 3, [](const std::string&) { return true; });
    REQUIRE(all.size() == 3);
    CHECK(all[0].node_id == "b");
    CHECK(all[1].node_id == "d");
    CHECK(all[2].node_id == "c");
    for (const auto& n : all) CHECK(n.node_id != "a");  // self excluded

    auto only_c = nearest(space, "a", 5, [](const std::string& id) { return id == "c"; });
    REQUIRE(only_c.size() == 1);
    CHECK(only_c[0].node_id == "c");

    CHECK_THROWS_AS(nearest(space, "zzz", 1, [](const std::string&) { return true; }), Error);
}

TEST_CASE("export round-trips through the vector loader") {
    TrainConfig cfg;
    cfg.dim = 6;
    cfg.epochs = 2;
    EmbeddingSpace space = train_skipgram(chain_corpus(), cfg);
    space.export_word2vec("/tmp/ctxmatch_test_embed.w2v");
    VectorStore store = load_vectors("/tmp/ctxmatch_test_embed.w2v");
    CHECK(store.dim == 6);
    CHECK(store.entries.size() == 5);
    for (std::uint32_t i = 0; i < 5; ++i) {
        const auto& v = store.entries.at(space.vocab[i]);
        for (std::size_t k = 0; k < 6; ++k)
            CHECK(v[k] == doctest::Approx(space.vector_of(i)[k]).epsilon(1e-6));
    }
}

TEST_CASE("non-deterministic mode still trains to finite vectors") {
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 3;
    cfg.deterministic = false;
    EmbeddingSpace space = train_skipgram(chain_corpus(), cfg);
    for (float v : space.input) CHECK(std::isfinite(v));
    REQUIRE(space.epoch_loss.size() == 3);
    // allow small stochastic upticks, forbid divergence
    CHECK(space.epoch_loss.back() < space.epoch_loss.front() * 1.01);
}

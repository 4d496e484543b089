#include <doctest.h>

#include <cstdlib>
#include <map>
#include <numeric>
#include <set>

#include "ctxmatch/errors.hpp"
#include "ctxmatch/walks.hpp"

using namespace ctxmatch;

namespace {

// star: one RID connected to four TOKs with given node weights and edge weights
FourPartiteGraph star_graph(const std::vector<double>& tok_weights,
                            const std::vector<double>& edge_weights) {
    FourPartiteGraph g;
    auto r = g.add_node("r1", NodeKind::RID, "r1", 0);
    g.node(r).weight = 1.0;
    for (std::size_t i = 0; i < tok_weights.size(); ++i) {
        auto t = g.add_node("t" + std::to_string(i), NodeKind::TOK, "t" + std::to_string(i));
        g.node(t).weight = tok_weights[i];
        g.add_edge(r, t, EdgeKind::RID_TOK, edge_weights[i]);
    }
    return g;
}

FourPartiteGraph cid_fixture(double s_total, double kappa_unused = 0) {
    (void)kappa_unused;
    FourPartiteGraph g;
    auto c = g.add_node("A_c", NodeKind::CID, "c", 0);
    auto c2 = g.add_node("B_c", NodeKind::CID, "c", 1);
    auto t1 = g.add_node("t1", NodeKind::TOK, "t1");
    auto t2 = g.add_node("t2", NodeKind::TOK, "t2");
    g.add_edge(c, t1, EdgeKind::TOK_CID, 1.0);
    g.add_edge(c, t2, EdgeKind::TOK_CID, 1.0);
    g.add_edge(c2, t1, EdgeKind::TOK_CID, 1.0);
    g.add_edge(c, c2, EdgeKind::CID_CID, s_total);
    return g;
}

std::map<std::uint32_t, double> dist_map(const TransitionDistribution& d) {
    std::map<std::uint32_t, double> m;
    for (std::size_t i = 0; i < d.targets.size(); ++i) m[d.targets[i]] = d.probs[i];
    return m;
}

} // namespace

TEST_CASE("RID transition blends token weight and edge weight") {
    FourPartiteGraph g = star_graph({0.7, 0.7, 0.3, 0.3}, {1, 1, 1, 1});
    WalkConfig cfg;
    auto d = transition_distribution(g, 0, cfg);
    auto m = dist_map(d);
    CHECK(m.at(1) == doctest::Approx(0.35));
    CHECK(m.at(2) == doctest::Approx(0.35));
    CHECK(m.at(3) == doctest::Approx(0.15));
    CHECK(m.at(4) == doctest::Approx(0.15));
}

TEST_CASE("baseline mode is edge-weight proportional regardless of node weights") {
    FourPartiteGraph g = star_graph({0.9, 0.1, 0.5}, {1, 1, 1});
    WalkConfig cfg;
    cfg.baseline_mode = true;
    auto d = transition_distribution(g, 0, cfg);
    for (double p : d.probs) CHECK(p == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("CID transition prices the similarity edge against mean token mass") {
    FourPartiteGraph g = cid_fixture(0.8);
    WalkConfig cfg;
    cfg.kappa_cid = 1.0;
    auto d = transition_distribution(g, 0, cfg);
    auto m = dist_map(d);
    // raw masses: t1 = 1, t2 = 1, CID = 0.8 * mean(1,1) -> {5/14, 5/14, 4/14}
    CHECK(m.at(1) == doctest::Approx(4.0 / 14.0));  // the other CID
    CHECK(m.at(2) == doctest::Approx(5.0 / 14.0));
    CHECK(m.at(3) == doctest::Approx(5.0 / 14.0));
}

TEST_CASE("kappa 0 removes CID-CID transitions") {
    FourPartiteGraph g = cid_fixture(0.8);
    WalkConfig cfg;
    cfg.kappa_cid = 0.0;
    auto d = transition_distribution(g, 0, cfg);
    auto m = dist_map(d);
    CHECK(m.count(1));
    CHECK(m.at(1) == doctest::Approx(0.0));
    CHECK(m.at(2) == doctest::Approx(0.5));
}

TEST_CASE("probabilities sum to one and cover only neighbors") {
    FourPartiteGraph g = cid_fixture(0.7);
    WalkConfig cfg;
    for (std::uint32_t n = 0; n < g.n_nodes(); ++n) {
        if (g.neighbors(n).empty()) continue;
        auto d = transition_distribution(g, n, cfg);
        double total = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        std::set<std::uint32_t> neighbor_set;
        for (const auto& a : g.neighbors(n)) neighbor_set.insert(a.to);
        for (auto t : d.targets) CHECK(neighbor_set.count(t) == 1);
    }
}

TEST_CASE("degeneration: uniform weights + kappa 0 equals baseline") {
    FourPartiteGraph g = cid_fixture(0.9);
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) g.node(i).weight = 1.0;
    WalkConfig prop;
    prop.kappa_cid = 0.0;
    WalkConfig base;
    base.baseline_mode = true;
    for (std::uint32_t n = 0; n < g.n_nodes(); ++n) {
        if (g.neighbors(n).empty()) continue;
        auto dp = dist_map(transition_distribution(g, n, prop));
        auto db = dist_map(transition_distribution(g, n, base));
        // compare over the union; CID_CID carries zero mass on both sides
        for (const auto& [t, p] : dp) CHECK(p == doctest::Approx(db.count(t) ? db.at(t) : 0.0)
                                                     .epsilon(1e-12));
    }
}

TEST_CASE("isolated node is rejected") {
    FourPartiteGraph g;
    g.add_node("r1", NodeKind::RID, "r1", 0);
    WalkConfig cfg;
    CHECK_THROWS_AS(transition_distribution(g, 0, cfg), Error);
}

TEST_CASE("two-node graph forces strict alternation") {
    FourPartiteGraph g;
    auto r = g.add_node("r1", NodeKind::RID, "r1", 0);
    auto t = g.add_node("t1", NodeKind::TOK, "t1");
    g.add_edge(r, t, EdgeKind::RID_TOK, 1.0);
    WalkConfig cfg;
    cfg.walk_length = 8;
    WalkEngine engine(g, cfg);
    std::mt19937_64 rng(1);
    auto seq = engine.random_walk(r, rng);
    REQUIRE(seq.size() == 8);
    for (std::size_t i = 0; i < seq.size(); ++i) CHECK(seq[i] == (i % 2 == 0 ? r : t));
}

TEST_CASE("corpus generation: cardinality, adjacency, determinism") {
    FourPartiteGraph g = cid_fixture(0.8);
    WalkConfig cfg;
    cfg.walk_length = 10;
    cfg.walks_per_node = 4;
    cfg.seed = 99;
    WalkCorpus c1 = generate_corpus(g, cfg);
    CHECK(c1.sequences.size() == 4 * g.n_nodes());  // all nodes non-isolated here
    for (const auto& seq : c1.sequences) {
        REQUIRE(seq.size() == 10);
        for (std::size_t i = 1; i < seq.size(); ++i) {
            bool adjacent = false;
            for (const auto& a : g.neighbors(seq[i - 1]))
                if (a.to == seq[i]) adjacent = true;
            CHECK(adjacent);
        }
    }
    WalkCorpus c2 = generate_corpus(g, cfg);
    CHECK(c1.fingerprint() == c2.fingerprint());
    CHECK(c1.sequences == c2.sequences);

    cfg.seed = 100;
    WalkCorpus c3 = generate_corpus(g, cfg);
    CHECK(c1.sequences != c3.sequences);
}

TEST_CASE("parallel corpus generation is byte-identical to sequential") {
    FourPartiteGraph g = cid_fixture(0.8);
    WalkConfig cfg;
    cfg.walk_length = 12;
    cfg.walks_per_node = 6;
    cfg.seed = 5;
    setenv("CTXMATCH_THREADS", "1", 1);
    WalkCorpus seq = generate_corpus(g, cfg);
    setenv("CTXMATCH_THREADS", "4", 1);
    WalkCorpus par = generate_corpus(g, cfg);
    unsetenv("CTXMATCH_THREADS");
    CHECK(seq.sequences == par.sequences);
}

TEST_CASE("empty graph is rejected") {
    FourPartiteGraph g;
    g.add_node("r1", NodeKind::RID, "r1", 0);  // isolated
    WalkConfig cfg;
    CHECK_THROWS_AS(generate_corpus(g, cfg), Error);
}

TEST_CASE("degree-proportional starts scale replica counts") {
    FourPartiteGraph g = star_graph({1, 1, 1, 1}, {1, 1, 1, 1});
    WalkConfig cfg;
    cfg.walk_length = 5;
    cfg.walks_per_node = 4;
    cfg.start_distribution = StartDistribution::DegreeProportional;
    WalkCorpus c = generate_corpus(g, cfg);
    // hub has degree 4, leaves degree 1; mean degree 8/5 -> hub gets more walks
    std::map<std::uint32_t, std::size_t> starts;
    for (const auto& seq : c.sequences) starts[seq[0]]++;
    CHECK(starts.at(0) > starts.at(1));
}

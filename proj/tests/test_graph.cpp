#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "ctxmatch/errors.hpp"
#include "ctxmatch/graph.hpp"
#include "ctxmatch/similarity.hpp"
#include "ctxmatch/tabular.hpp"

using namespace ctxmatch;

namespace {

TableData make_table(const std::string& id, const std::vector<std::string>& names,
                     const std::vector<std::vector<Cell>>& rows) {
    TableData t;
    t.table_id = id;
    for (const auto& n : names) {
        ColumnMeta m;
        m.name = n;
        t.columns.push_back(m);
    }
    t.rows = rows;
    return t;
}

// the two-table movie toy pair: identical values, renamed columns optional
std::pair<TableData, TableData> toy_pair() {
    TableData a = make_table("A", {"Title", "Year"},
                             {{Cell{"Harry Potter"}, Cell{"2001"}},
                              {Cell{"Iron Man"}, Cell{"2008"}}});
    TableData b = make_table("B", {"Title", "Year"},
                             {{Cell{"Harry Potter"}, Cell{"2001"}},
                              {Cell{"Iron Man"}, Cell{"2008"}}});
    return {a, b};
}

FourPartiteGraph build_toy(double tau_cid = 0.6) {
    auto [a, b] = toy_pair();
    TextVectorProvider provider;
    MergeConfig cfg;
    cfg.tau_cid = tau_cid;
    auto sim = column_similarity_matrix(a, b, profile_table(a), profile_table(b), provider, cfg);
    return build_four_partite(a, b, sim, cfg);
}

// random table with a small shared vocabulary so cross-table token reuse occurs
TableData random_table(const std::string& id, std::mt19937_64& rng, std::size_t max_rows = 50,
                       std::size_t max_cols = 8) {
    static const char* words[] = {"alpha", "beta", "gamma", "delta", "tokyo", "oslo",
                                  "12",    "340",  "7.5",   "x y",   "NA",   ""};
    std::size_t n_cols = 1 + rng() % max_cols;
    std::size_t n_rows = 1 + rng() % max_rows;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < n_cols; ++c) names.push_back("c" + std::to_string(c));
    std::vector<std::vector<Cell>> rows;
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::vector<Cell> row;
        for (std::size_t c = 0; c < n_cols; ++c) row.push_back(Cell{words[rng() % 12]});
        rows.push_back(row);
    }
    return normalize_missing(make_table(id, names, rows));
}

bool kinds_ok(NodeKind a, NodeKind b, EdgeKind e) {
    auto match = [&](NodeKind x, NodeKind y) {
        return (a == x && b == y) || (a == y && b == x);
    };
    switch (e) {
        case EdgeKind::RID_TOK: return match(NodeKind::RID, NodeKind::TOK);
        case EdgeKind::TOK_CID: return match(NodeKind::TOK, NodeKind::CID);
        case EdgeKind::CID_CID: return a == NodeKind::CID && b == NodeKind::CID;
    }
    return false;
}

// multiset of (RID, CID) pairs reachable through any token in two hops
std::map<std::pair<std::string, std::string>, double> two_hop(const FourPartiteGraph& g) {
    std::map<std::pair<std::string, std::string>, double> out;
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        if (g.node(i).kind != NodeKind::TOK) continue;
        for (const auto& r : g.neighbors(i)) {
            if (r.kind != EdgeKind::RID_TOK) continue;
            for (const auto& c : g.neighbors(i)) {
                if (c.kind != EdgeKind::TOK_CID) continue;
                out[{g.node(r.to).id, g.node(c.to).id}] += r.weight * c.weight;
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("toy pair builds the expected 4-partite structure") {
    FourPartiteGraph g = build_toy();
    std::size_t rid = 0, tok = 0, cid = 0;
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        switch (g.node(i).kind) {
            case NodeKind::RID: ++rid; break;
            case NodeKind::TOK: ++tok; break;
            case NodeKind::CID: ++cid; break;
        }
    }
    CHECK(rid == 4);
    CHECK(cid == 4);
    CHECK(tok == 4);  // harry_potter, iron_man, 2001, 2008 shared across tables

    auto at = g.find("A_Title");
    auto bt = g.find("B_Title");
    auto ay = g.find("A_Year");
    auto by = g.find("B_Year");
    REQUIRE(at.has_value());
    REQUIRE(bt.has_value());
    REQUIRE(ay.has_value());
    REQUIRE(by.has_value());
    CHECK(g.has_edge(*at, *bt, EdgeKind::CID_CID));
    CHECK(g.has_edge(*ay, *by, EdgeKind::CID_CID));
    CHECK(g.edge_weight(*at, *bt, EdgeKind::CID_CID) >= 0.6);
}

TEST_CASE("tau_cid above 1 produces a CID-edge-free graph") {
    FourPartiteGraph g = build_toy(1.01);
    GraphStats s = graph_stats(g);
    CHECK(s.edges_by_kind.at("CID_CID") == 0);
}

TEST_CASE("fully-missing row leaves an isolated RID") {
    TableData a = make_table("A", {"x"}, {{Cell{"v"}}, {Cell{}}});
    TableData b = make_table("B", {"x"}, {{Cell{"v"}}});
    TextVectorProvider provider;
    MergeConfig cfg;
    auto sim = column_similarity_matrix(a, b, profile_table(a), profile_table(b), provider, cfg);
    FourPartiteGraph g = build_four_partite(a, b, sim, cfg);
    auto r1 = g.find("A_r1");
    REQUIRE(r1.has_value());
    CHECK(g.neighbors(*r1).empty());
}

TEST_CASE("identical cell across tables shares one TOK node") {
    auto [a, b] = toy_pair();
    TextVectorProvider provider;
    MergeConfig cfg;
    auto sim = column_similarity_matrix(a, b, profile_table(a), profile_table(b), provider, cfg);
    FourPartiteGraph g = build_four_partite(a, b, sim, cfg);
    std::size_t harry_nodes = 0;
    std::uint32_t tok = 0;
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        if (g.node(i).kind == NodeKind::TOK && g.node(i).label == "harry_potter") {
            ++harry_nodes;
            tok = i;
        }
    }
    REQUIRE(harry_nodes == 1);
    std::set<int> rid_sides, cid_sides;
    for (const auto& adj : g.neighbors(tok)) {
        if (adj.kind == EdgeKind::RID_TOK) rid_sides.insert(g.node(adj.to).side);
        if (adj.kind == EdgeKind::TOK_CID) cid_sides.insert(g.node(adj.to).side);
    }
    CHECK(rid_sides == std::set<int>{0, 1});
    CHECK(cid_sides == std::set<int>{0, 1});
}

TEST_CASE("repeated token doubles the folded edge weight") {
    TableData a = make_table("A", {"x"}, {{Cell{"dup"}}, {Cell{"dup"}}});
    TableData b = make_table("B", {"x"}, {{Cell{"other"}}});
    TextVectorProvider provider;
    MergeConfig cfg;
    auto sim = column_similarity_matrix(a, b, profile_table(a), profile_table(b), provider, cfg);
    FourPartiteGraph g = build_four_partite(a, b, sim, cfg);
    auto tok = g.find("t#dup");
    auto cid = g.find("A_x");
    REQUIRE(tok.has_value());
    REQUIRE(cid.has_value());
    CHECK(g.edge_weight(*tok, *cid, EdgeKind::TOK_CID) == doctest::Approx(2.0));
}

TEST_CASE("partition purity holds on random table pairs") {
    std::mt19937_64 rng(17);
    TextVectorProvider provider;
    MergeConfig cfg;
    for (int it = 0; it < 10; ++it) {
        TableData a = random_table("A", rng);
        TableData b = random_table("B", rng);
        auto sim =
            column_similarity_matrix(a, b, profile_table(a), profile_table(b), provider, cfg);
        FourPartiteGraph g = build_four_partite(a, b, sim, cfg);
        for (std::uint32_t i = 0; i < g.n_nodes(); ++i)
            for (const auto& adj : g.neighbors(i))
                CHECK(kinds_ok(g.node(i).kind, g.node(adj.to).kind, adj.kind));
    }
}

TEST_CASE("empty inputs are rejected") {
    TableData a = make_table("A", {}, {});
    TableData b = make_table("B", {}, {});
    TextVectorProvider provider;
    MergeConfig cfg;
    SimilarityMatrix sim;
    CHECK_THROWS_AS(build_four_partite(a, b, sim, cfg), Error);
}

TEST_CASE("merge_tokens with tau 1.0 and distinct labels is a no-op") {
    FourPartiteGraph g = build_toy();
    TextVectorProvider provider;
    auto merged = merge_tokens(g, provider, 1.0);
    CHECK(merged.log.empty());
    CHECK(merged.graph.n_nodes() == g.n_nodes());
    CHECK(merged.graph.n_edges() == g.n_edges());
}

TEST_CASE("merge_tokens unions near-duplicates and conserves weight") {
    TableData a = make_table("A", {"name"},
                             {{Cell{"daniel jacob radcliffe"}}, {Cell{"daniel radcliffe"}}});
    TableData b = make_table("B", {"name"}, {{Cell{"daniel radcliffe"}}});
    TextVectorProvider provider;
    MergeConfig cfg;
    auto sim = column_similarity_matrix(a, b, profile_table(a), profile_table(b), provider, cfg);
    FourPartiteGraph g = build_four_partite(a, b, sim, cfg);

    // pick a threshold below the actual cosine so the pair merges
    double cos = cosine(provider.embed_token("daniel_jacob_radcliffe"),
                        provider.embed_token("daniel_radcliffe"));
    REQUIRE(cos > 0.5);
    auto merged = merge_tokens(g, provider, cos - 0.01);
    REQUIRE(merged.log.size() == 1);
    CHECK(merged.log[0].kept == "daniel_radcliffe");  // higher summed RID weight survives
    CHECK(merged.log[0].absorbed == "daniel_jacob_radcliffe");
    CHECK(merged.graph.total_edge_weight() == doctest::Approx(g.total_edge_weight()));
    // merging can only add RID->CID reachability, never remove it
    auto before = two_hop(g);
    auto after = two_hop(merged.graph);
    for (const auto& [pair, w] : before) CHECK(after.count(pair) == 1);
}

TEST_CASE("merge_tokens never merges numeric tokens") {
    TableData a = make_table("A", {"y"}, {{Cell{"2001"}}, {Cell{"2002"}}});
    TableData b = make_table("B", {"y"}, {{Cell{"2001"}}});
    TextVectorProvider provider;
    MergeConfig cfg;
    auto sim = column_similarity_matrix(a, b, profile_table(a), profile_table(b), provider, cfg);
    FourPartiteGraph g = build_four_partite(a, b, sim, cfg);
    auto merged = merge_tokens(g, provider, 1e-6);  // even at a near-zero threshold
    CHECK(merged.log.empty());
}

TEST_CASE("column_importance evaluates the four-indicator blend") {
    ImportanceConfig cfg;  // defaults: 0.25 each, shipped freq list starting with "id"
    ColumnMeta meta;
    ColumnProfile p;

    meta.name = "id";
    p.missing_rate = 0.0;
    p.linguistic_fraction = 1.0;
    p.distinct_ratio = 1.0;
    CHECK(column_importance(p, meta, cfg) == doctest::Approx(1.0));

    meta.name = "zzz_unlisted";
    p.linguistic_fraction = 0.0;
    p.missing_rate = 0.5;
    p.distinct_ratio = 0.5;
    CHECK(column_importance(p, meta, cfg) == doctest::Approx(0.25));

    ImportanceConfig only_freq;
    only_freq.c_m = only_freq.c_l = only_freq.c_v = 0.0;
    only_freq.c_f = 1.0;
    CHECK(column_importance(p, meta, only_freq) == doctest::Approx(0.0));
}

TEST_CASE("freq rank decays linearly") {
    ImportanceConfig cfg;
    cfg.c_m = cfg.c_l = cfg.c_v = 0.0;
    cfg.c_f = 1.0;
    cfg.freq_list = {"id", "name", "date", "zip"};
    ColumnProfile p;
    ColumnMeta meta;
    meta.name = "name";
    CHECK(column_importance(p, meta, cfg) == doctest::Approx(1.0 - 1.0 / 4.0));
    meta.name = "Zip";  // normalized before lookup
    CHECK(column_importance(p, meta, cfg) == doctest::Approx(1.0 - 3.0 / 4.0));
}

TEST_CASE("assign_node_weights: TOK gets the mean of adjacent CIDs") {
    FourPartiteGraph g = build_toy();
    std::map<std::string, double> imp{
        {"A_Title", 0.8}, {"B_Title", 0.6}, {"A_Year", 0.5}, {"B_Year", 0.5}};
    assign_node_weights(g, imp);
    auto tok = g.find("t#harry_potter");
    REQUIRE(tok.has_value());
    CHECK(g.node(*tok).weight == doctest::Approx(0.7));
    auto year_tok = g.find("t#2001");
    REQUIRE(year_tok.has_value());
    CHECK(g.node(*year_tok).weight == doctest::Approx(0.5));
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i)
        if (g.node(i).kind == NodeKind::RID) CHECK(g.node(i).weight == doctest::Approx(1.0));
}

TEST_CASE("assign_node_weights with uniform importances is uniform on TOKs") {
    FourPartiteGraph g = build_toy();
    std::map<std::string, double> imp{
        {"A_Title", 0.4}, {"B_Title", 0.4}, {"A_Year", 0.4}, {"B_Year", 0.4}};
    assign_node_weights(g, imp);
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i)
        if (g.node(i).kind == NodeKind::TOK) CHECK(g.node(i).weight == doctest::Approx(0.4));
}

TEST_CASE("graph_stats reports the toy structure") {
    GraphStats s = graph_stats(build_toy());
    CHECK(s.nodes_by_kind["RID"] == 4);
    CHECK(s.nodes_by_kind["TOK"] == 4);
    CHECK(s.nodes_by_kind["CID"] == 4);
    CHECK(s.edges_by_kind.at("RID_TOK") > 0);
    CHECK(s.edges_by_kind.at("TOK_CID") > 0);
    CHECK(s.edges_by_kind.at("CID_CID") == 2);
    CHECK(s.isolated_nodes == 0);
    CHECK(s.components >= 1);

    GraphStats empty = graph_stats(FourPartiteGraph{});
    for (const auto& [kind, count] : empty.nodes_by_kind) CHECK(count == 0);
    for (const auto& [kind, count] : empty.edges_by_kind) CHECK(count == 0);
    CHECK(empty.components == 0);
}

TEST_CASE("graph dump/restore round-trips") {
    FourPartiteGraph g = build_toy();
    std::map<std::string, double> imp{
        {"A_Title", 0.8}, {"B_Title", 0.6}, {"A_Year", 0.5}, {"B_Year", 0.5}};
    assign_node_weights(g, imp);
    g.dump("/tmp/ctxmatch_test_graph.txt");
    FourPartiteGraph r = FourPartiteGraph::restore("/tmp/ctxmatch_test_graph.txt");
    REQUIRE(r.n_nodes() == g.n_nodes());
    CHECK(r.n_edges() == g.n_edges());
    CHECK(r.total_edge_weight() == doctest::Approx(g.total_edge_weight()));
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        auto j = r.find(g.node(i).id);
        REQUIRE(j.has_value());
        CHECK(r.node(*j).kind == g.node(i).kind);
        CHECK(r.node(*j).weight == doctest::Approx(g.node(i).weight));
    }
}

TEST_CASE("self-loops and kind mismatches are rejected") {
    FourPartiteGraph g;
    auto a = g.add_node("r1", NodeKind::RID, "r1", 0);
    auto b = g.add_node("t1", NodeKind::TOK, "t1");
    CHECK_THROWS_AS(g.add_edge(a, a, EdgeKind::RID_TOK, 1.0), Error);
    CHECK_THROWS_AS(g.add_edge(a, b, EdgeKind::TOK_CID, 1.0), Error);
    CHECK_NOTHROW(g.add_edge(a, b, EdgeKind::RID_TOK, 1.0));
}

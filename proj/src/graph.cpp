#include "ctxmatch/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "ctxmatch/errors.hpp"

namespace ctxmatch {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::RID: return "RID";
        case NodeKind::TOK: return "TOK";
        case NodeKind::CID: return "CID";
    }
    return "?";
}

const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::RID_TOK: return "RID_TOK";
        case EdgeKind::TOK_CID: return "TOK_CID";
        case EdgeKind::CID_CID: return "CID_CID";
    }
    return "?";
}

namespace {

NodeKind node_kind_from(const std::string& s) {
    if (s == "RID") return NodeKind::RID;
    if (s == "TOK") return NodeKind::TOK;
    if (s == "CID") return NodeKind::CID;
    throw Error("MalformedGraphFile", "unknown node kind: " + s);
}

EdgeKind edge_kind_from(const std::string& s) {
    if (s == "RID_TOK") return EdgeKind::RID_TOK;
    if (s == "TOK_CID") return EdgeKind::TOK_CID;
    if (s == "CID_CID") return EdgeKind::CID_CID;
    throw Error("MalformedGraphFile", "unknown edge kind: " + s);
}

// Edge endpoint kinds must match the edge kind.
void check_edge_kinds(NodeKind a, NodeKind b, EdgeKind k) {
    bool ok = false;
    switch (k) {
        case EdgeKind::RID_TOK:
            ok = (a == NodeKind::RID && b == NodeKind::TOK) ||
                 (a == NodeKind::TOK && b == NodeKind::RID);
            break;
        case EdgeKind::TOK_CID:
            ok = (a == NodeKind::TOK && b == NodeKind::CID) ||
                 (a == NodeKind::CID && b == NodeKind::TOK);
            break;
        case EdgeKind::CID_CID:
            ok = a == NodeKind::CID && b == NodeKind::CID;
            break;
    }
    if (!ok)
        throw Error("EdgeKindMismatch", std::string("edge kind ") + to_string(k) +
                                            " between " + to_string(a) + " and " + to_string(b));
}

} // namespace

std::uint32_t FourPartiteGraph::add_node(const std::string& id, NodeKind kind,
                                         const std::string& label, int side) {
    auto it = index_.find(id);
    if (it != index_.end()) {
        if (nodes_[it->second].kind != kind)
            throw Error("NodeIdClash", "node id " + id + " reused with a different kind");
        return it->second;
    }
    std::uint32_t idx = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{id, kind, label, 1.0, side});
    adj_.emplace_back();
    index_.emplace(id, idx);
    return idx;
}

void FourPartiteGraph::add_edge(std::uint32_t u, std::uint32_t v, EdgeKind kind, double weight) {
    if (u == v) throw Error("SelfLoop", "self loop on " + nodes_[u].id);
    check_edge_kinds(nodes_[u].kind, nodes_[v].kind, kind);
    for (auto& a : adj_[u]) {
        if (a.to == v && a.kind == kind) {
            a.weight += weight;
            for (auto& b : adj_[v]) {
                if (b.to == u && b.kind == kind) {
                    b.weight += weight;
                    return;
                }
            }
            throw Error("InternalError", "asymmetric adjacency");
        }
    }
    adj_[u].push_back(Adj{v, kind, weight});
    adj_[v].push_back(Adj{u, kind, weight});
}

std::optional<std::uint32_t> FourPartiteGraph::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool FourPartiteGraph::has_edge(std::uint32_t u, std::uint32_t v, EdgeKind kind) const {
    for (const auto& a : adj_[u])
        if (a.to == v && a.kind == kind) return true;
    return false;
}

double FourPartiteGraph::edge_weight(std::uint32_t u, std::uint32_t v, EdgeKind kind) const {
    for (const auto& a : adj_[u])
        if (a.to == v && a.kind == kind) return a.weight;
    return 0.0;
}

std::size_t FourPartiteGraph::n_edges() const {
    std::size_t deg = 0;
    for (const auto& a : adj_) deg += a.size();
    return deg / 2;
}

double FourPartiteGraph::total_edge_weight() const {
    double w = 0;
    for (const auto& a : adj_)
        for (const auto& e : a) w += e.weight;
    return w / 2.0;
}

void FourPartiteGraph::dump(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", "cannot write " + path);
    char buf[64];
    for (const auto& n : nodes_) {
        std::snprintf(buf, sizeof(buf), "%.17g", n.weight);
        out << "N " << n.id << ' ' << to_string(n.kind) << ' ' << n.label << ' ' << buf << ' '
            << n.side << "\n";
    }
    for (std::uint32_t u = 0; u < nodes_.size(); ++u) {
        for (const auto& a : adj_[u]) {
            if (a.to < u) continue;  // each undirected edge once
            std::snprintf(buf, sizeof(buf), "%.17g", a.weight);
            out << "E " << nodes_[u].id << ' ' << nodes_[a.to].id << ' ' << to_string(a.kind)
                << ' ' << buf << "\n";
        }
    }
}

FourPartiteGraph FourPartiteGraph::restore(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", "cannot open graph file: " + path);
    FourPartiteGraph g;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "N") {
            std::string id, kind, label;
            double weight;
            int side;
            if (!(ss >> id >> kind >> label >> weight >> side))
                throw Error("MalformedGraphFile", "bad node line " + std::to_string(lineno));
            std::uint32_t idx = g.add_node(id, node_kind_from(kind), label, side);
            g.nodes_[idx].weight = weight;
        } else if (tag == "E") {
            std::string u, v, kind;
            double weight;
            if (!(ss >> u >> v >> kind >> weight))
                throw Error("MalformedGraphFile", "bad edge line " + std::to_string(lineno));
            auto ui = g.find(u), vi = g.find(v);
            if (!ui || !vi)
                throw Error("MalformedGraphFile",
                            "edge references unknown node at line " + std::to_string(lineno));
            g.add_edge(*ui, *vi, edge_kind_from(kind), weight);
        } else {
            throw Error("MalformedGraphFile", "unknown tag at line " + std::to_string(lineno));
        }
    }
    return g;
}

std::string cid_node_id(const std::string& table_id, const std::string& column_name) {
    return table_id + "_" + normalize_column_name(column_name);
}

std::string rid_node_id(const std::string& table_id, std::size_t row_index) {
    return table_id + "_r" + std::to_string(row_index);
}

FourPartiteGraph build_four_partite(const TableData& ta, const TableData& tb,
                                    const SimilarityMatrix& sim, const MergeConfig& cfg,
                                    TokenMode token_mode) {
    if (ta.n_rows() == 0 && tb.n_rows() == 0)
        throw Error("EmptyInput", "both tables are empty");
    if (sim.n_a != ta.n_cols() || sim.n_b != tb.n_cols())
        throw Error("SimilarityMismatch", "similarity matrix shape does not match tables");

    FourPartiteGraph g;

    const TableData* tables[2] = {&ta, &tb};
    std::vector<std::vector<std::uint32_t>> cid_idx(2);
    for (int side = 0; side < 2; ++side) {
        const TableData& t = *tables[side];
        for (const auto& col : t.columns) {
            cid_idx[side].push_back(
                g.add_node(cid_node_id(t.table_id, col.name), NodeKind::CID,
                           normalize_column_name(col.name), side));
        }
    }

    // accumulate folded edge weights, then materialize
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> rid_tok, tok_cid;
    for (int side = 0; side < 2; ++side) {
        const TableData& t = *tables[side];
        for (std::size_t r = 0; r < t.n_rows(); ++r) {
            std::uint32_t rid =
                g.add_node(rid_node_id(t.table_id, r), NodeKind::RID,
                           rid_node_id(t.table_id, r), side);
            for (std::size_t c = 0; c < t.n_cols(); ++c) {
                const Cell& cell = t.rows[r][c];
                if (!cell.has_value()) continue;  // missing: no node, no edges
                for (const auto& token : tokenize_cell(*cell, token_mode)) {
                    // "t#" prefix keeps TOK ids disjoint from RID/CID ids
                    std::uint32_t tok = g.add_node("t#" + token, NodeKind::TOK, token, -1);
                    rid_tok[{rid, tok}] += 1.0;
                    tok_cid[{tok, cid_idx[side][c]}] += 1.0;
                }
            }
        }
    }
    for (const auto& [uv, w] : rid_tok) g.add_edge(uv.first, uv.second, EdgeKind::RID_TOK, w);
    for (const auto& [uv, w] : tok_cid) g.add_edge(uv.first, uv.second, EdgeKind::TOK_CID, w);

    for (std::size_t i = 0; i < sim.n_a; ++i) {
        for (std::size_t j = 0; j < sim.n_b; ++j) {
            double s = sim.at(i, j).s_total;
            if (s >= cfg.tau_cid)
                g.add_edge(cid_idx[0][i], cid_idx[1][j], EdgeKind::CID_CID, s);
        }
    }
    return g;
}

namespace {

// occurrence frequency of a TOK = summed RID_TOK edge weight
double token_frequency(const FourPartiteGraph& g, std::uint32_t tok) {
    double f = 0;
    for (const auto& a : g.neighbors(tok))
        if (a.kind == EdgeKind::RID_TOK) f += a.weight;
    return f;
}

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

} // namespace

TokenMergeResult merge_tokens(const FourPartiteGraph& g, const TextVectorProvider& provider,
                              double tau_tok) {
    if (tau_tok <= 0.0 || tau_tok > 1.0)
        throw Error("BadThreshold", "tau_tok must be in (0, 1]");

    // mergeable = non-numeric TOK nodes
    std::vector<std::uint32_t> toks;
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        const auto& n = g.node(i);
        if (n.kind == NodeKind::TOK && !parse_number(n.label).has_value()) toks.push_back(i);
    }

    // blocking: candidate pairs share at least one character 3-gram
    std::map<std::string, std::vector<std::uint32_t>> blocks;
    for (std::uint32_t t : toks) {
        const std::string& s = g.node(t).label;
        std::set<std::string> grams;
        if (s.size() < 3) grams.insert(s);
        else
            for (std::size_t i = 0; i + 3 <= s.size(); ++i) grams.insert(s.substr(i, 3));
        for (const auto& gram : grams) blocks[gram].push_back(t);
    }

    UnionFind uf(g.n_nodes());
    std::set<std::pair<std::uint32_t, std::uint32_t>> tested;
    std::vector<MergeLogEntry> log;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> pair_cos;

    for (const auto& [gram, members] : blocks) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                auto key = std::minmax(members[i], members[j]);
                if (!tested.insert({key.first, key.second}).second) continue;
                double cos = cosine(provider.embed_token(g.node(key.first).label),
                                    provider.embed_token(g.node(key.second).label));
                if (cos >= tau_tok) {
                    uf.unite(key.first, key.second);
                    pair_cos[{key.first, key.second}] = cos;
                }
            }
        }
    }

    // class -> members, survivor = highest frequency (ties by id)
    std::map<std::uint32_t, std::vector<std::uint32_t>> classes;
    for (std::uint32_t t : toks) classes[uf.find(t)].push_back(t);

    std::vector<std::uint32_t> survivor_of(g.n_nodes());
    std::iota(survivor_of.begin(), survivor_of.end(), 0);
    for (auto& [root, members] : classes) {
        if (members.size() < 2) continue;
        std::uint32_t best = members[0];
        double best_freq = token_frequency(g, best);
        for (std::uint32_t m : members) {
            double f = token_frequency(g, m);
            if (f > best_freq || (f == best_freq && g.node(m).id < g.node(best).id)) {
                best = m;
                best_freq = f;
            }
        }
        for (std::uint32_t m : members) {
            if (m == best) continue;
            survivor_of[m] = best;
            auto key = std::minmax(m, best);
            auto it = pair_cos.find({key.first, key.second});
            // cosine to the survivor when directly tested, else to some class member
            double cos = it != pair_cos.end() ? it->second : -2.0;
            if (cos == -2.0)
                cos = cosine(provider.embed_token(g.node(m).label),
                             provider.embed_token(g.node(best).label));
            log.push_back(MergeLogEntry{g.node(best).label, g.node(m).label, cos});
        }
    }

    // rebuild the graph with absorbed nodes folded into survivors
    TokenMergeResult result;
    FourPartiteGraph& out = result.graph;
    std::vector<std::uint32_t> new_index(g.n_nodes(), UINT32_MAX);
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        if (survivor_of[i] != i) continue;
        const auto& n = g.node(i);
        new_index[i] = out.add_node(n.id, n.kind, n.label, n.side);
        out.node(new_index[i]).weight = n.weight;
    }
    std::map<std::tuple<std::uint32_t, std::uint32_t, EdgeKind>, double> edges;
    for (std::uint32_t u = 0; u < g.n_nodes(); ++u) {
        std::uint32_t su = new_index[survivor_of[u]];
        for (const auto& a : g.neighbors(u)) {
            if (a.to < u) continue;
            std::uint32_t sv = new_index[survivor_of[a.to]];
            auto [x, y] = std::minmax(su, sv);
            edges[{x, y, a.kind}] += a.weight;
        }
    }
    for (const auto& [key, w] : edges)
        out.add_edge(std::get<0>(key), std::get<1>(key), std::get<2>(key), w);

    std::sort(log.begin(), log.end(), [](const MergeLogEntry& a, const MergeLogEntry& b) {
        return std::tie(a.kept, a.absorbed) < std::tie(b.kept, b.absorbed);
    });
    result.log = std::move(log);
    return result;
}

ImportanceConfig::ImportanceConfig() {
    static const char* defaults[] = {
        "id", "name", "date", "address", "city", "country", "state", "year", "type", "title",
        "description", "price", "category", "status", "email", "phone", "gender", "age",
        "value", "code", "region", "count", "amount", "time", "label", "text", "url", "user",
        "location", "company", "product", "rating", "score", "size", "color", "brand", "model",
        "number", "quantity", "total", "group", "level", "source", "target", "key", "index",
        "month", "day", "week", "duration", "start", "end", "latitude", "longitude", "zip",
        "postal_code", "first_name", "last_name", "full_name", "username", "password",
        "currency", "language", "nationality", "occupation", "department", "salary", "revenue",
        "cost", "profit", "tax", "discount", "weight", "height", "width", "length", "area",
        "population", "density", "temperature", "humidity", "pressure", "speed", "distance",
        "frequency", "percentage", "ratio", "rank", "position", "grade", "class", "school",
        "team", "genre", "author", "publisher", "isbn", "sku", "order_id", "customer_id",
    };
    freq_list.assign(std::begin(defaults), std::end(defaults));
}

std::vector<std::string> load_freq_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", "cannot open frequency list: " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = normalize_token(line);
        if (!t.empty() && t[0] != '#') out.push_back(t);
    }
    return out;
}

double column_importance(const ColumnProfile& p, const ColumnMeta& meta,
                         const ImportanceConfig& cfg) {
    double s_miss = 1.0 - p.missing_rate;
    double s_ling = p.linguistic_fraction;
    double s_variety = p.distinct_ratio;
    double s_freq = 0.0;
    if (!cfg.freq_list.empty()) {
        std::string norm = normalize_token(meta.name);
        for (std::size_t rank = 0; rank < cfg.freq_list.size(); ++rank) {
            if (cfg.freq_list[rank] == norm) {
                s_freq = 1.0 - static_cast<double>(rank) / static_cast<double>(cfg.freq_list.size());
                break;
            }
        }
    }
    return cfg.c_m * s_miss + cfg.c_l * s_ling + cfg.c_v * s_variety + cfg.c_f * s_freq;
}

void assign_node_weights(FourPartiteGraph& g,
                         const std::map<std::string, double>& cid_importance) {
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        auto& n = g.node(i);
        if (n.kind != NodeKind::CID) continue;
        auto it = cid_importance.find(n.id);
        if (it == cid_importance.end())
            throw Error("MissingImportance", "no importance for CID " + n.id);
        n.weight = it->second;
    }
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        auto& n = g.node(i);
        if (n.kind == NodeKind::RID) {
            n.weight = 1.0;
        } else if (n.kind == NodeKind::TOK) {
            double sum = 0;
            std::size_t count = 0;
            for (const auto& a : g.neighbors(i)) {
                if (a.kind == EdgeKind::TOK_CID) {
                    sum += g.node(a.to).weight;
                    ++count;
                }
            }
            if (count == 0)
                throw Error("InternalError", "TOK node without CID neighbor: " + n.id);
            n.weight = sum / static_cast<double>(count);
        }
    }
}

GraphStats graph_stats(const FourPartiteGraph& g) {
    GraphStats s;
    s.nodes_by_kind["RID"] = 0;
    s.nodes_by_kind["TOK"] = 0;
    s.nodes_by_kind["CID"] = 0;
    s.edges_by_kind["RID_TOK"] = 0;
    s.edges_by_kind["TOK_CID"] = 0;
    s.edges_by_kind["CID_CID"] = 0;

    std::vector<bool> visited(g.n_nodes(), false);
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        const auto& n = g.node(i);
        s.nodes_by_kind[to_string(n.kind)]++;
        std::size_t deg = g.neighbors(i).size();
        s.degree_histogram[deg]++;
        if (deg == 0) s.isolated_nodes++;
        for (const auto& a : g.neighbors(i))
            if (a.to > i) s.edges_by_kind[to_string(a.kind)]++;
        if (!visited[i]) {
            s.components++;
            std::queue<std::uint32_t> q;
            q.push(i);
            visited[i] = true;
            while (!q.empty()) {
                std::uint32_t u = q.front();
                q.pop();
                for (const auto& a : g.neighbors(u)) {
                    if (!visited[a.to]) {
                        visited[a.to] = true;
                        q.push(a.to);
                    }
                }
            }
        }
    }
    return s;
}

std::string format_stats(const GraphStats& s) {
    std::ostringstream out;
    out << "[nodes]\n";
    for (const auto& [k, v] : s.nodes_by_kind) out << k << " = " << v << "\n";
    out << "\n[edges]\n";
    for (const auto& [k, v] : s.edges_by_kind) out << k << " = " << v << "\n";
    out << "\n[structure]\n";
    out << "components = " << s.components << "\n";
    out << "isolated_nodes = " << s.isolated_nodes << "\n";
    out << "\n[degree_histogram]\n";
    for (const auto& [deg, count] : s.degree_histogram)
        out << "d" << deg << " = " << count << "\n";
    return out.str();
}

} // namespace ctxmatch

#include "ctxmatch/match.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ctxmatch/errors.hpp"

namespace ctxmatch {

namespace {

// mutual-nearest-neighbor (or greedy top-1) selection over a sparse
// cosine table between two sides
std::vector<ScoredPair> select_pairs(
    const std::map<std::string, std::map<std::string, double>>& cos_ab, double tau,
    DecisionRule rule) {
    // best partner per left and per right node
    std::map<std::string, std::pair<std::string, double>> best_a, best_b;
    for (const auto& [a, row] : cos_ab) {
        for (const auto& [b, c] : row) {
            auto ita = best_a.find(a);
            if (ita == best_a.end() || c > ita->second.second ||
                (c == ita->second.second && b < ita->second.first))
                best_a[a] = {b, c};
            auto itb = best_b.find(b);
            if (itb == best_b.end() || c > itb->second.second ||
                (c == itb->second.second && a < itb->second.first))
                best_b[b] = {a, c};
        }
    }

    std::vector<ScoredPair> out;
    if (rule == DecisionRule::MutualNearest) {
        for (const auto& [a, bb] : best_a) {
            const auto& [b, c] = bb;
            if (c < tau) continue;
            auto itb = best_b.find(b);
            if (itb != best_b.end() && itb->second.first == a)
                out.push_back(ScoredPair{{a, b}, c});
        }
    } else {
        // greedy top-1 by descending score, each node used once
        std::vector<ScoredPair> all;
        for (const auto& [a, row] : cos_ab)
            for (const auto& [b, c] : row)
                if (c >= tau) all.push_back(ScoredPair{{a, b}, c});
        std::sort(all.begin(), all.end(), [](const ScoredPair& x, const ScoredPair& y) {
            if (x.cos != y.cos) return x.cos > y.cos;
            return x.pair < y.pair;
        });
        std::set<std::string> used_a, used_b;
        for (const auto& p : all) {
            if (used_a.count(p.pair.first) || used_b.count(p.pair.second)) continue;
            used_a.insert(p.pair.first);
            used_b.insert(p.pair.second);
            out.push_back(p);
        }
        std::sort(out.begin(), out.end(),
                  [](const ScoredPair& x, const ScoredPair& y) { return x.pair < y.pair; });
    }
    return out;
}

} // namespace

std::vector<ScoredPair> schema_match(const EmbeddingSpace& space, const FourPartiteGraph& g,
                                     double tau_match, DecisionRule rule) {
    // all cross-table CID pairs present in the vocabulary
    std::vector<std::uint32_t> cids_a, cids_b;
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        const auto& n = g.node(i);
        if (n.kind != NodeKind::CID) continue;
        if (!space.index.count(n.id)) continue;
        (n.side == 0 ? cids_a : cids_b).push_back(i);
    }

    std::map<std::string, std::map<std::string, double>> cos_ab;
    for (std::uint32_t a : cids_a) {
        const float* va = space.vector_of(space.index.at(g.node(a).id));
        for (std::uint32_t b : cids_b) {
            const float* vb = space.vector_of(space.index.at(g.node(b).id));
            cos_ab[g.node(a).label][g.node(b).label] = cosine_f(va, vb, space.dim);
        }
    }
    return select_pairs(cos_ab, tau_match, rule);
}

std::set<Pair> entity_candidates(const FourPartiteGraph& g, bool complete_pairs) {
    std::set<Pair> out;
    if (complete_pairs) {
        std::vector<std::string> rids_a, rids_b;
        for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
            const auto& n = g.node(i);
            if (n.kind != NodeKind::RID) continue;
            (n.side == 0 ? rids_a : rids_b).push_back(n.id);
        }
        for (const auto& a : rids_a)
            for (const auto& b : rids_b) out.insert({a, b});
        return out;
    }
    // blocking: RID pairs sharing a TOK neighbor
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        if (g.node(i).kind != NodeKind::TOK) continue;
        std::vector<std::uint32_t> rids_a, rids_b;
        for (const auto& adj : g.neighbors(i)) {
            if (adj.kind != EdgeKind::RID_TOK) continue;
            (g.node(adj.to).side == 0 ? rids_a : rids_b).push_back(adj.to);
        }
        for (std::uint32_t a : rids_a)
            for (std::uint32_t b : rids_b) out.insert({g.node(a).id, g.node(b).id});
    }
    return out;
}

std::vector<ScoredPair> entity_resolve(const EmbeddingSpace& space,
                                       const std::set<Pair>& candidates, double tau_er,
                                       DecisionRule rule) {
    std::map<std::string, std::map<std::string, double>> cos_ab;
    for (const auto& [a, b] : candidates) {
        auto ia = space.index.find(a);
        auto ib = space.index.find(b);
        if (ia == space.index.end() || ib == space.index.end()) continue;
        cos_ab[a][b] =
            cosine_f(space.vector_of(ia->second), space.vector_of(ib->second), space.dim);
    }
    return select_pairs(cos_ab, tau_er, rule);
}

MatchReport evaluate(const std::vector<ScoredPair>& predicted, const GroundTruth& truth,
                     MatchTask task) {
    MatchReport r;
    r.task = task;
    r.predicted = predicted;
    const std::set<Pair>& t = task == MatchTask::SM ? truth.column_pairs : truth.row_pairs;

    std::size_t hits = 0;
    for (const auto& p : predicted)
        if (t.count(p.pair)) ++hits;

    if (predicted.empty()) {
        r.precision = t.empty() ? 1.0 : 0.0;
    } else {
        r.precision = static_cast<double>(hits) / static_cast<double>(predicted.size());
    }
    r.recall = t.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(t.size());
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

OverlapRates overlap_rates(const GroundTruth& truth, const TableData& ta, const TableData& tb) {
    std::size_t n_col = std::min(ta.n_cols(), tb.n_cols());
    std::size_t n_row = std::min(ta.n_rows(), tb.n_rows());
    if (n_col == 0 || n_row == 0)
        throw Error("DegenerateTable", "overlap rates need non-empty tables on both sides");
    return {static_cast<double>(truth.t_sm()) / static_cast<double>(n_col),
            static_cast<double>(truth.t_er()) / static_cast<double>(n_row)};
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", "cannot open ground truth file: " + path);
    GroundTruth truth;
    std::string line;
    std::size_t lineno = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string side_a, side_b, kind;
        if (!std::getline(ss, side_a, ',') || !std::getline(ss, side_b, ',') ||
            !std::getline(ss, kind, ','))
            throw Error("MalformedTruth", "expected side_a,side_b,kind at line " +
                                              std::to_string(lineno) + " of " + path);
        if (!header_checked) {
            header_checked = true;
            if (side_a == "side_a") continue;  // optional header row
        }
        if (kind == "column") truth.column_pairs.insert({side_a, side_b});
        else if (kind == "row") truth.row_pairs.insert({side_a, side_b});
        else
            throw Error("MalformedTruth",
                        "unknown pair kind '" + kind + "' at line " + std::to_string(lineno));
    }
    return truth;
}

void write_ground_truth(const GroundTruth& truth, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", "cannot write " + path);
    out << "side_a,side_b,kind\n";
    for (const auto& [a, b] : truth.column_pairs) out << a << ',' << b << ",column\n";
    for (const auto& [a, b] : truth.row_pairs) out << a << ',' << b << ",row\n";
}

void write_report(const MatchReport& report, const std::string& report_path,
                  const std::string& pairs_csv_path) {
    {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) throw Error("FileWriteError", "cannot write " + report_path);
        char buf[64];
        out << "[report]\n";
        out << "task = " << (report.task == MatchTask::SM ? "SM" : "ER") << "\n";
        out << "predicted = " << report.predicted.size() << "\n";
        std::snprintf(buf, sizeof(buf), "%.6f", report.precision);
        out << "precision = " << buf << "\n";
        std::snprintf(buf, sizeof(buf), "%.6f", report.recall);
        out << "recall = " << buf << "\n";
        std::snprintf(buf, sizeof(buf), "%.6f", report.f1);
        out << "f1 = " << buf << "\n";
    }
    {
        std::ofstream out(pairs_csv_path, std::ios::binary);
        if (!out) throw Error("FileWriteError", "cannot write " + pairs_csv_path);
        out << "side_a,side_b,cosine\n";
        char buf[64];
        for (const auto& p : report.predicted) {
            std::snprintf(buf, sizeof(buf), "%.6f", p.cos);
            out << p.pair.first << ',' << p.pair.second << ',' << buf << "\n";
        }
    }
}

} // namespace ctxmatch

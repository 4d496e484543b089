#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctxmatch/similarity.hpp"
#include "ctxmatch/tabular.hpp"
#include "ctxmatch/textvec.hpp"

namespace ctxmatch {

enum class NodeKind : std::uint8_t { RID, TOK, CID };
enum class EdgeKind : std::uint8_t { RID_TOK, TOK_CID, CID_CID };

const char* to_string(NodeKind k);
const char* to_string(EdgeKind k);

// 4-partite graph over two tables: RID/TOK/CID nodes, undirected
// weighted edges of kinds RID_TOK, TOK_CID, CID_CID only. Parallel
// edges are folded into the edge weight. TOK nodes are shared across
// tables; RID/CID nodes carry their side (0 = first table, 1 = second).
class FourPartiteGraph {
public:
    struct Node {
        std::string id;
        NodeKind kind;
        std::string label;
        double weight = 1.0;
        int side = -1;  // -1 for TOK
    };

    struct Adj {
        std::uint32_t to;
        EdgeKind kind;
        double weight;
    };

    std::uint32_t add_node(const std::string& id, NodeKind kind, const std::string& label,
                           int side = -1);
    // Folds into the existing edge weight if (u, v, kind) already exists.
    void add_edge(std::uint32_t u, std::uint32_t v, EdgeKind kind, double weight);

    std::size_t n_nodes() const { return nodes_.size(); }
    const Node& node(std::uint32_t i) const { return nodes_[i]; }
    Node& node(std::uint32_t i) { return nodes_[i]; }
    const std::vector<Adj>& neighbors(std::uint32_t i) const { return adj_[i]; }
    const std::vector<Node>& nodes() const { return nodes_; }

    std::optional<std::uint32_t> find(const std::string& id) const;
    bool has_edge(std::uint32_t u, std::uint32_t v, EdgeKind kind) const;
    double edge_weight(std::uint32_t u, std::uint32_t v, EdgeKind kind) const;

    std::size_t n_edges() const;          // undirected count
    double total_edge_weight() const;     // undirected sum

    void dump(const std::string& path) const;
    static FourPartiteGraph restore(const std::string& path);

private:
    std::vector<Node> nodes_;
    std::vector<std::vector<Adj>> adj_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

FourPartiteGraph build_four_partite(const TableData& ta, const TableData& tb,
                                    const SimilarityMatrix& sim, const MergeConfig& cfg,
                                    TokenMode token_mode = TokenMode::Cell);

struct MergeLogEntry {
    std::string kept;
    std::string absorbed;
    double cosine;
};

struct TokenMergeResult {
    FourPartiteGraph graph;
    std::vector<MergeLogEntry> log;
};

// Unions near-duplicate non-numeric TOK nodes (shared 3-gram blocking,
// token-vector cosine >= tau_tok); survivor is the highest-frequency
// member, edge weights are summed.
TokenMergeResult merge_tokens(const FourPartiteGraph& g, const TextVectorProvider& provider,
                              double tau_tok);

struct ImportanceConfig {
    double c_m = 0.25;
    double c_l = 0.25;
    double c_v = 0.25;
    double c_f = 0.25;
    std::vector<std::string> freq_list;  // ranked, most common first

    ImportanceConfig();
};

std::vector<std::string> load_freq_list(const std::string& path);

double column_importance(const ColumnProfile& p, const ColumnMeta& meta,
                         const ImportanceConfig& cfg);

// CID.weight = importance, TOK.weight = mean of adjacent CID weights,
// RID.weight = 1.
void assign_node_weights(FourPartiteGraph& g,
                         const std::map<std::string, double>& cid_importance);

struct GraphStats {
    std::map<std::string, std::size_t> nodes_by_kind;
    std::map<std::string, std::size_t> edges_by_kind;
    std::map<std::size_t, std::size_t> degree_histogram;
    std::size_t components = 0;
    std::size_t isolated_nodes = 0;
};

GraphStats graph_stats(const FourPartiteGraph& g);
std::string format_stats(const GraphStats& s);

std::string cid_node_id(const std::string& table_id, const std::string& column_name);
std::string rid_node_id(const std::string& table_id, std::size_t row_index);

} // namespace ctxmatch

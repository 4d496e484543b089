#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctxmatch/embed.hpp"
#include "ctxmatch/graph.hpp"

namespace ctxmatch {

// Unordered cross-table pair, stored (side A, side B).
using Pair = std::pair<std::string, std::string>;

struct GroundTruth {
    std::set<Pair> column_pairs;  // normalized column names
    std::set<Pair> row_pairs;     // RID node ids

    std::size_t t_sm() const { return column_pairs.size(); }
    std::size_t t_er() const { return row_pairs.size(); }
};

GroundTruth load_ground_truth(const std::string& path);
void write_ground_truth(const GroundTruth& truth, const std::string& path);

struct ScoredPair {
    Pair pair;
    double cos;
};

enum class MatchTask { SM, ER };

struct MatchReport {
    MatchTask task;
    std::vector<ScoredPair> predicted;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

enum class DecisionRule { MutualNearest, GreedyTop1 };

// Columns of the two tables: mutual nearest neighbor among cross-table
// CIDs, cosine >= tau_match. Pairs are keyed by normalized column name.
std::vector<ScoredPair> schema_match(const EmbeddingSpace& space, const FourPartiteGraph& g,
                                     double tau_match,
                                     DecisionRule rule = DecisionRule::MutualNearest);

// Blocking: cross-table RID pairs sharing at least one TOK neighbor.
std::set<Pair> entity_candidates(const FourPartiteGraph& g, bool complete_pairs = false);

std::vector<ScoredPair> entity_resolve(const EmbeddingSpace& space,
                                       const std::set<Pair>& candidates, double tau_er,
                                       DecisionRule rule = DecisionRule::MutualNearest);

MatchReport evaluate(const std::vector<ScoredPair>& predicted, const GroundTruth& truth,
                     MatchTask task);

struct OverlapRates {
    double overlap_column;
    double overlap_row;
};

OverlapRates overlap_rates(const GroundTruth& truth, const TableData& ta, const TableData& tb);

void write_report(const MatchReport& report, const std::string& report_path,
                  const std::string& pairs_csv_path);

} // namespace ctxmatch

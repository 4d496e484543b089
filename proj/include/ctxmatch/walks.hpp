#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctxmatch/graph.hpp"

namespace ctxmatch {

enum class StartDistribution { UniformNodes, DegreeProportional };

struct WalkConfig {
    std::size_t walk_length = 60;
    std::size_t walks_per_node = 10;
    StartDistribution start_distribution = StartDistribution::UniformNodes;
    double kappa_cid = 1.0;  // CID-CID transition mass multiplier
    std::uint64_t seed = 1;
    bool baseline_mode = false;
};

struct WalkCorpus {
    std::vector<std::string> node_ids;                  // index -> id
    std::vector<std::vector<std::uint32_t>> sequences;  // node indices
    std::uint64_t seed = 0;
    std::uint64_t graph_fingerprint = 0;

    std::uint64_t fingerprint() const;
    void dump(const std::string& path) const;
};

// Analytic next-node distribution for one node; targets are sorted by
// node index and probabilities sum to 1.
struct TransitionDistribution {
    std::vector<std::uint32_t> targets;
    std::vector<double> probs;
};

TransitionDistribution transition_distribution(const FourPartiteGraph& g, std::uint32_t node,
                                               const WalkConfig& cfg);

// Frozen per-node cumulative tables for fast sampling.
class WalkEngine {
public:
    WalkEngine(const FourPartiteGraph& g, const WalkConfig& cfg);

    std::vector<std::uint32_t> random_walk(std::uint32_t start, std::mt19937_64& rng) const;
    bool isolated(std::uint32_t node) const { return cum_[node].empty(); }

    const WalkConfig& config() const { return cfg_; }

private:
    const FourPartiteGraph& g_;
    WalkConfig cfg_;
    std::vector<std::vector<std::uint32_t>> targets_;
    std::vector<std::vector<double>> cum_;
};

WalkCorpus generate_corpus(const FourPartiteGraph& g, const WalkConfig& cfg);

std::uint64_t graph_fingerprint(const FourPartiteGraph& g);

} // namespace ctxmatch

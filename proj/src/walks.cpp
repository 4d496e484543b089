#include "ctxmatch/walks.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "ctxmatch/errors.hpp"
#include "ctxmatch/parallel.hpp"

namespace ctxmatch {

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ull ^ seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double mean_tok_edge_weight(const FourPartiteGraph& g, std::uint32_t cid) {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& a : g.neighbors(cid)) {
        if (a.kind == EdgeKind::TOK_CID) {
            sum += a.weight;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

// Raw (unnormalized) transition masses in adjacency order.
std::vector<double> raw_masses(const FourPartiteGraph& g, std::uint32_t node,
                               const WalkConfig& cfg) {
    const auto& adj = g.neighbors(node);
    std::vector<double> mass(adj.size(), 0.0);
    NodeKind kind = g.node(node).kind;

    if (cfg.baseline_mode) {
        for (std::size_t i = 0; i < adj.size(); ++i)
            mass[i] = adj[i].kind == EdgeKind::CID_CID ? 0.0 : adj[i].weight;
        return mass;
    }

    switch (kind) {
        case NodeKind::RID:
            for (std::size_t i = 0; i < adj.size(); ++i)
                mass[i] = g.node(adj[i].to).weight * adj[i].weight;
            break;
        case NodeKind::CID: {
            double mean_tok = mean_tok_edge_weight(g, node);
            for (std::size_t i = 0; i < adj.size(); ++i) {
                if (adj[i].kind == EdgeKind::CID_CID)
                    mass[i] = cfg.kappa_cid * adj[i].weight * mean_tok;
                else
                    mass[i] = adj[i].weight;
            }
            break;
        }
        case NodeKind::TOK:
            for (std::size_t i = 0; i < adj.size(); ++i) mass[i] = adj[i].weight;
            break;
    }
    return mass;
}

} // namespace

TransitionDistribution transition_distribution(const FourPartiteGraph& g, std::uint32_t node,
                                               const WalkConfig& cfg) {
    const auto& adj = g.neighbors(node);
    if (adj.empty()) throw Error("IsolatedNode", "node " + g.node(node).id + " has no neighbors");

    std::vector<double> mass = raw_masses(g, node, cfg);
    double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (total <= 0.0) {
        // all candidate masses vanished: fall back to edge-weight proportional
        for (std::size_t i = 0; i < adj.size(); ++i) mass[i] = adj[i].weight;
        total = std::accumulate(mass.begin(), mass.end(), 0.0);
    }

    // collapse onto sorted unique targets
    std::vector<std::size_t> order(adj.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return adj[a].to < adj[b].to; });

    TransitionDistribution dist;
    for (std::size_t k : order) {
        double p = mass[k] / total;
        if (!dist.targets.empty() && dist.targets.back() == adj[k].to)
            dist.probs.back() += p;
        else {
            dist.targets.push_back(adj[k].to);
            dist.probs.push_back(p);
        }
    }
    return dist;
}

WalkEngine::WalkEngine(const FourPartiteGraph& g, const WalkConfig& cfg) : g_(g), cfg_(cfg) {
    if (cfg.walk_length < 2) throw Error("BadWalkConfig", "walk_length must be >= 2");
    targets_.resize(g.n_nodes());
    cum_.resize(g.n_nodes());
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        if (g.neighbors(i).empty()) continue;
        TransitionDistribution d = transition_distribution(g, i, cfg);
        targets_[i] = std::move(d.targets);
        cum_[i].resize(d.probs.size());
        double acc = 0;
        for (std::size_t k = 0; k < d.probs.size(); ++k) {
            acc += d.probs[k];
            cum_[i][k] = acc;
        }
        cum_[i].back() = 1.0;
    }
}

std::vector<std::uint32_t> WalkEngine::random_walk(std::uint32_t start,
                                                   std::mt19937_64& rng) const {
    if (cum_[start].empty())
        throw Error("IsolatedNode", "walk started at isolated node " + g_.node(start).id);
    std::vector<std::uint32_t> seq;
    seq.reserve(cfg_.walk_length);
    seq.push_back(start);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uint32_t cur = start;
    while (seq.size() < cfg_.walk_length) {
        const auto& cum = cum_[cur];
        double u = unit(rng);
        std::size_t k = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        if (k >= cum.size()) k = cum.size() - 1;
        cur = targets_[cur][k];
        seq.push_back(cur);
    }
    return seq;
}

std::uint64_t graph_fingerprint(const FourPartiteGraph& g) {
    std::uint64_t h = 0;
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
        const auto& n = g.node(i);
        h = splitmix64(h ^ fnv1a(n.id, 0));
        h = splitmix64(h ^ static_cast<std::uint64_t>(n.kind));
        for (const auto& a : g.neighbors(i)) {
            if (a.to < i) continue;
            h = splitmix64(h ^ fnv1a(g.node(a.to).id, 1));
            std::uint64_t wbits;
            static_assert(sizeof(wbits) == sizeof(a.weight));
            std::memcpy(&wbits, &a.weight, sizeof(wbits));
            h = splitmix64(h ^ wbits);
        }
    }
    return h;
}

WalkCorpus generate_corpus(const FourPartiteGraph& g, const WalkConfig& cfg) {
    WalkEngine engine(g, cfg);

    // starts in canonical order: sorted by node id
    std::vector<std::uint32_t> starts;
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i)
        if (!engine.isolated(i)) starts.push_back(i);
    if (starts.empty()) throw Error("EmptyGraph", "graph has no non-isolated nodes");
    std::sort(starts.begin(), starts.end(), [&](std::uint32_t a, std::uint32_t b) {
        return g.node(a).id < g.node(b).id;
    });

    // degree-proportional start distribution: replica count scaled by degree
    std::vector<std::size_t> replicas(starts.size(), cfg.walks_per_node);
    if (cfg.start_distribution == StartDistribution::DegreeProportional) {
        double mean_deg = 0;
        for (std::uint32_t s : starts) mean_deg += static_cast<double>(g.neighbors(s).size());
        mean_deg /= static_cast<double>(starts.size());
        for (std::size_t i = 0; i < starts.size(); ++i) {
            double scaled = static_cast<double>(cfg.walks_per_node) *
                            static_cast<double>(g.neighbors(starts[i]).size()) / mean_deg;
            replicas[i] = std::max<std::size_t>(1, static_cast<std::size_t>(scaled + 0.5));
        }
    }

    WalkCorpus corpus;
    corpus.seed = cfg.seed;
    corpus.graph_fingerprint = graph_fingerprint(g);
    corpus.node_ids.reserve(g.n_nodes());
    for (std::uint32_t i = 0; i < g.n_nodes(); ++i) corpus.node_ids.push_back(g.node(i).id);

    std::vector<std::size_t> offset(starts.size() + 1, 0);
    for (std::size_t i = 0; i < starts.size(); ++i) offset[i + 1] = offset[i] + replicas[i];
    corpus.sequences.resize(offset.back());

    // independent stream per (start, replica): byte-identical regardless
    // of scheduling
    parallel_for(starts.size(), [&](std::size_t i) {
        std::uint32_t start = starts[i];
        std::uint64_t node_hash = fnv1a(g.node(start).id, 0);
        for (std::size_t r = 0; r < replicas[i]; ++r) {
            std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(node_hash + r)));
            corpus.sequences[offset[i] + r] = engine.random_walk(start, rng);
        }
    });
    return corpus;
}

std::uint64_t WalkCorpus::fingerprint() const {
    std::uint64_t h = splitmix64(seed ^ graph_fingerprint);
    for (const auto& seq : sequences) {
        for (std::uint32_t n : seq) h = splitmix64(h ^ (static_cast<std::uint64_t>(n) + 1));
        h = splitmix64(h);
    }
    return h;
}

void WalkCorpus::dump(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", "cannot write " + path);
    for (const auto& seq : sequences) {
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (i) out << ' ';
            out << node_ids[seq[i]];
        }
        out << "\n";
    }
}

} // namespace ctxmatch

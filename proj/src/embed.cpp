#include "ctxmatch/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "ctxmatch/errors.hpp"
#include "ctxmatch/parallel.hpp"

namespace ctxmatch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);  // [0, 1)
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct NoiseTable {
    std::vector<double> cum;  // cumulative over vocab

    std::uint32_t sample(double u) const {
        std::size_t k = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        if (k >= cum.size()) k = cum.size() - 1;
        return static_cast<std::uint32_t>(k);
    }
};

} // namespace

EmbeddingSpace train_skipgram(const WalkCorpus& corpus, const TrainConfig& cfg) {
    if (corpus.sequences.empty()) throw Error("EmptyCorpus", "walk corpus has no sequences");

    // vocabulary: corpus nodes with count >= min_count, sorted by id
    std::unordered_map<std::uint32_t, std::size_t> counts;
    for (const auto& seq : corpus.sequences)
        for (std::uint32_t n : seq) counts[n]++;

    std::vector<std::uint32_t> kept;
    for (const auto& [n, c] : counts)
        if (c >= cfg.min_count) kept.push_back(n);
    if (kept.empty()) throw Error("EmptyVocabulary", "no node meets min_count");
    std::sort(kept.begin(), kept.end(), [&](std::uint32_t a, std::uint32_t b) {
        return corpus.node_ids[a] < corpus.node_ids[b];
    });

    EmbeddingSpace space;
    space.dim = cfg.dim;
    space.config = cfg;
    space.corpus_fingerprint = corpus.fingerprint();
    std::unordered_map<std::uint32_t, std::uint32_t> vocab_of;  // corpus node -> vocab index
    for (std::uint32_t v = 0; v < kept.size(); ++v) {
        space.vocab.push_back(corpus.node_ids[kept[v]]);
        space.index[corpus.node_ids[kept[v]]] = v;
        vocab_of[kept[v]] = v;
    }
    const std::size_t V = space.vocab.size();
    const std::size_t D = cfg.dim;

    // sentences re-encoded into vocab indices, rare nodes dropped
    std::vector<std::vector<std::uint32_t>> sentences;
    sentences.reserve(corpus.sequences.size());
    std::size_t total_pairs_per_epoch = 0;
    for (const auto& seq : corpus.sequences) {
        std::vector<std::uint32_t> s;
        s.reserve(seq.size());
        for (std::uint32_t n : seq) {
            auto it = vocab_of.find(n);
            if (it != vocab_of.end()) s.push_back(it->second);
        }
        if (s.size() >= 2) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
                std::size_t hi = std::min(s.size() - 1, i + cfg.window);
                total_pairs_per_epoch += hi - lo;  // window size minus the center itself
            }
            sentences.push_back(std::move(s));
        }
    }
    if (total_pairs_per_epoch == 0)
        throw Error("EmptyCorpus", "no training pairs under the window");

    // unigram^noise_exponent table
    NoiseTable noise;
    noise.cum.resize(V);
    double acc = 0;
    for (std::uint32_t v = 0; v < V; ++v) {
        acc += std::pow(static_cast<double>(counts[kept[v]]), cfg.noise_exponent);
        noise.cum[v] = acc;
    }
    for (double& c : noise.cum) c /= acc;
    noise.cum.back() = 1.0;

    // init: input uniform in [-0.5/dim, 0.5/dim], context zero
    space.input.resize(V * D);
    space.context.assign(V * D, 0.0f);
    {
        std::uint64_t h = splitmix64(cfg.seed ^ 0xABCDEF12ull);
        for (std::size_t i = 0; i < space.input.size(); ++i) {
            h = splitmix64(h);
            space.input[i] = static_cast<float>((to_unit(h) - 0.5) / static_cast<double>(D));
        }
    }

    const double lr_floor = cfg.lr_initial / 100.0;
    const std::size_t total_pairs = total_pairs_per_epoch * cfg.epochs;
    std::vector<float> grad(D);

    auto train_pair = [&](std::uint32_t center, std::uint32_t ctx, std::uint64_t pair_key,
                          double lr, double& loss) {
        float* v_w = space.input.data() + static_cast<std::size_t>(center) * D;
        std::fill(grad.begin(), grad.end(), 0.0f);
        for (std::size_t k = 0; k <= cfg.negatives; ++k) {
            std::uint32_t target;
            double label;
            if (k == 0) {
                target = ctx;
                label = 1.0;
            } else {
                // negatives fixed by pair identity: identical across epochs
                target = noise.sample(to_unit(splitmix64(pair_key ^ (0x5DEECE66Dull * k))));
                if (target == ctx) continue;
                label = 0.0;
            }
            float* u_t = space.context.data() + static_cast<std::size_t>(target) * D;
            double dot = 0;
            for (std::size_t d = 0; d < D; ++d) dot += static_cast<double>(v_w[d]) * u_t[d];
            double f = sigmoid(dot);
            loss += label == 1.0 ? -std::log(std::max(f, 1e-12))
                                 : -std::log(std::max(1.0 - f, 1e-12));
            float g = static_cast<float>((label - f) * lr);
            for (std::size_t d = 0; d < D; ++d) {
                grad[d] += g * u_t[d];
                u_t[d] += g * v_w[d];
            }
        }
        for (std::size_t d = 0; d < D; ++d) v_w[d] += grad[d];
    };

    if (cfg.deterministic) {
        std::size_t processed = 0;
        for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
            double epoch_loss = 0;
            std::size_t epoch_pairs = 0;
            for (std::size_t s = 0; s < sentences.size(); ++s) {
                const auto& sent = sentences[s];
                for (std::size_t i = 0; i < sent.size(); ++i) {
                    std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
                    std::size_t hi = std::min(sent.size() - 1, i + cfg.window);
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        double lr = std::max(cfg.lr_initial *
                                                 (1.0 - static_cast<double>(processed) /
                                                            static_cast<double>(total_pairs)),
                                             lr_floor);
                        std::uint64_t pair_key =
                            splitmix64(cfg.seed ^ splitmix64((s << 24) ^ (i << 8) ^ j));
                        train_pair(sent[i], sent[j], pair_key, lr, epoch_loss);
                        ++processed;
                        ++epoch_pairs;
                    }
                }
            }
            space.epoch_loss.push_back(epoch_loss / static_cast<double>(epoch_pairs));
        }
        return space;
    }

    // parallel mode: hogwild over sentences, benign unsynchronized
    // updates, epoch-constant learning rate; results vary across runs
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double lr = std::max(cfg.lr_initial * (1.0 - static_cast<double>(epoch) /
                                                          static_cast<double>(cfg.epochs)),
                             lr_floor);
        std::vector<double> sentence_loss(sentences.size(), 0.0);
        parallel_for(sentences.size(), [&](std::size_t s) {
            const auto& sent = sentences[s];
            std::vector<float> local_grad(D);
            std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(s * 2654435761ull + epoch)));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            double loss = 0;
            for (std::size_t i = 0; i < sent.size(); ++i) {
                std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
                std::size_t hi = std::min(sent.size() - 1, i + cfg.window);
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    float* v_w = space.input.data() + static_cast<std::size_t>(sent[i]) * D;
                    std::fill(local_grad.begin(), local_grad.end(), 0.0f);
                    for (std::size_t k = 0; k <= cfg.negatives; ++k) {
                        std::uint32_t target;
                        double label;
                        if (k == 0) {
                            target = sent[j];
                            label = 1.0;
                        } else {
                            target = noise.sample(unit(rng));
                            if (target == sent[j]) continue;
                            label = 0.0;
                        }
                        float* u_t = space.context.data() + static_cast<std::size_t>(target) * D;
                        double dot = 0;
                        for (std::size_t d = 0; d < D; ++d)
                            dot += static_cast<double>(v_w[d]) * u_t[d];
                        double f = sigmoid(dot);
                        loss += label == 1.0 ? -std::log(std::max(f, 1e-12))
                                             : -std::log(std::max(1.0 - f, 1e-12));
                        float gg = static_cast<float>((label - f) * lr);
                        for (std::size_t d = 0; d < D; ++d) {
                            local_grad[d] += gg * u_t[d];
                            u_t[d] += gg * v_w[d];
                        }
                    }
                    for (std::size_t d = 0; d < D; ++d) v_w[d] += local_grad[d];
                }
            }
            sentence_loss[s] = loss;
        });
        double epoch_loss = std::accumulate(sentence_loss.begin(), sentence_loss.end(), 0.0);
        space.epoch_loss.push_back(epoch_loss / static_cast<double>(total_pairs_per_epoch));
    }
    return space;
}

double sgns_gradient_check(std::size_t vocab_size, std::size_t dim,
                           const std::vector<GradientCheckSample>& batch, std::uint64_t seed) {
    const std::size_t n_params = vocab_size * dim;
    std::vector<double> input(n_params), context(n_params);
    std::uint64_t h = splitmix64(seed);
    for (double& x : input) {
        h = splitmix64(h);
        x = to_unit(h) - 0.5;
    }
    for (double& x : context) {
        h = splitmix64(h);
        x = to_unit(h) - 0.5;
    }

    auto loss_fn = [&](const std::vector<double>& in, const std::vector<double>& ctx) {
        double loss = 0;
        for (const auto& s : batch) {
            const double* v_w = in.data() + s.center * dim;
            auto term = [&](std::uint32_t t, double label) {
                const double* u_t = ctx.data() + t * dim;
                double dot = 0;
                for (std::size_t d = 0; d < dim; ++d) dot += v_w[d] * u_t[d];
                double f = sigmoid(dot);
                loss += label == 1.0 ? -std::log(f) : -std::log(1.0 - f);
            };
            term(s.context, 1.0);
            for (std::uint32_t n : s.negatives) term(n, 0.0);
        }
        return loss;
    };

    // analytic gradient
    std::vector<double> g_input(n_params, 0.0), g_context(n_params, 0.0);
    for (const auto& s : batch) {
        const double* v_w = input.data() + s.center * dim;
        auto accumulate = [&](std::uint32_t t, double label) {
            const double* u_t = context.data() + t * dim;
            double dot = 0;
            for (std::size_t d = 0; d < dim; ++d) dot += v_w[d] * u_t[d];
            double coeff = sigmoid(dot) - label;
            for (std::size_t d = 0; d < dim; ++d) {
                g_input[s.center * dim + d] += coeff * u_t[d];
                g_context[t * dim + d] += coeff * v_w[d];
            }
        };
        accumulate(s.context, 1.0);
        for (std::uint32_t n : s.negatives) accumulate(n, 0.0);
    }

    // central finite differences over every parameter
    const double step = 1e-5;
    double max_rel = 0;
    auto check = [&](std::vector<double>& params, const std::vector<double>& analytic,
                     bool is_input) {
        for (std::size_t i = 0; i < n_params; ++i) {
            double saved = params[i];
            params[i] = saved + step;
            double up = is_input ? loss_fn(params, context) : loss_fn(input, params);
            params[i] = saved - step;
            double down = is_input ? loss_fn(params, context) : loss_fn(input, params);
            params[i] = saved;
            double numeric = (up - down) / (2.0 * step);
            double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
            max_rel = std::max(max_rel, std::abs(numeric - analytic[i]) / denom);
        }
    };
    check(input, g_input, true);
    check(context, g_context, false);
    return max_rel;
}

double cosine_f(const float* u, const float* v, std::size_t dim) {
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t d = 0; d < dim; ++d) {
        dot += static_cast<double>(u[d]) * v[d];
        nu += static_cast<double>(u[d]) * u[d];
        nv += static_cast<double>(v[d]) * v[d];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::vector<Neighbor> nearest(const EmbeddingSpace& space, const std::string& node_id,
                              std::size_t k,
                              const std::function<bool(const std::string&)>& filter) {
    auto it = space.index.find(node_id);
    if (it == space.index.end()) throw Error("UnknownNode", "node not in vocabulary: " + node_id);
    const float* q = space.vector_of(it->second);

    std::vector<Neighbor> all;
    for (std::uint32_t v = 0; v < space.vocab.size(); ++v) {
        if (v == it->second) continue;
        if (filter && !filter(space.vocab[v])) continue;
        all.push_back(Neighbor{space.vocab[v], cosine_f(q, space.vector_of(v), space.dim)});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.cos != b.cos) return a.cos > b.cos;
        return a.node_id < b.node_id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

void EmbeddingSpace::export_word2vec(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", "cannot write " + path);
    out << vocab.size() << ' ' << dim << "\n";
    char buf[32];
    for (std::uint32_t v = 0; v < vocab.size(); ++v) {
        out << vocab[v];
        const float* vec = vector_of(v);
        for (std::size_t d = 0; d < dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(vec[d]));
            out << ' ' << buf;
        }
        out << "\n";
    }
}

} // namespace ctxmatch

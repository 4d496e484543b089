#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctxmatch/walks.hpp"

namespace ctxmatch {

struct TrainConfig {
    std::size_t dim = 300;
    std::size_t window = 3;
    std::size_t negatives = 5;
    std::size_t epochs = 10;
    double lr_initial = 0.025;  // linear decay to lr_initial / 100
    std::size_t min_count = 1;
    double noise_exponent = 0.75;
    std::uint64_t seed = 1;
    bool deterministic = true;
};

struct EmbeddingSpace {
    std::vector<std::string> vocab;                       // index -> node id
    std::unordered_map<std::string, std::uint32_t> index; // node id -> index
    std::size_t dim = 0;
    std::vector<float> input;    // |V| x dim, the published vectors
    std::vector<float> context;  // |V| x dim
    std::vector<double> epoch_loss;
    TrainConfig config;
    std::uint64_t corpus_fingerprint = 0;

    const float* vector_of(std::uint32_t idx) const { return input.data() + idx * dim; }
    const float* context_of(std::uint32_t idx) const { return context.data() + idx * dim; }

    void export_word2vec(const std::string& path) const;
};

EmbeddingSpace train_skipgram(const WalkCorpus& corpus, const TrainConfig& cfg);

// Analytic vs central-finite-difference gradient of the SGNS loss on a
// small synthetic batch; returns the max relative error.
struct GradientCheckSample {
    std::uint32_t center;
    std::uint32_t context;
    std::vector<std::uint32_t> negatives;
};

double sgns_gradient_check(std::size_t vocab_size, std::size_t dim,
                           const std::vector<GradientCheckSample>& batch,
                           std::uint64_t seed = 7);

struct Neighbor {
    std::string node_id;
    double cos;
};

std::vector<Neighbor> nearest(const EmbeddingSpace& space, const std::string& node_id,
                              std::size_t k,
                              const std::function<bool(const std::string&)>& filter);

double cosine_f(const float* u, const float* v, std::size_t dim);

} // namespace ctxmatch

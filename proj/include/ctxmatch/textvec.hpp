#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace ctxmatch {

enum class VectorSource { File, Hashed };

struct VectorStore {
    std::size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> entries;
    VectorSource source = VectorSource::File;
};

// word2vec text format: "count dim" header, then "key v1 ... v_dim".
VectorStore load_vectors(const std::string& path);

struct HashEmbedConfig {
    std::size_t dim = 300;
    std::size_t ngram_min = 3;
    std::size_t ngram_max = 6;
    std::uint64_t seed = 0x9E3779B97F4A7C15ull;
};

// Sentence/token vector provider: exact store lookup first, signed
// feature-hashing fallback otherwise. Pure and thread-safe after
// construction.
class TextVectorProvider {
public:
    TextVectorProvider() = default;
    explicit TextVectorProvider(HashEmbedConfig cfg) : cfg_(cfg) {}

    void set_sentence_store(VectorStore store);
    void set_token_store(VectorStore store);

    std::vector<double> embed_sentence(const std::string& text) const;
    std::vector<double> embed_token(const std::string& token) const;

    // Dim of sentence / token vectors (store dim when loaded, else cfg dim).
    std::size_t sentence_dim() const;
    std::size_t token_dim() const;

    bool sentence_store_loaded() const { return sentence_store_.dim != 0; }
    bool token_store_loaded() const { return token_store_.dim != 0; }

    const HashEmbedConfig& config() const { return cfg_; }

private:
    std::vector<double> hash_embed(const std::string& text, bool boundary_pad) const;

    HashEmbedConfig cfg_;
    VectorStore sentence_store_;
    VectorStore token_store_;
};

// Standard cosine; zero vector against anything is 0 (with a warning to
// stderr). Length mismatch is a hard error.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

// Sentence key for schema similarity: name alone, or
// "<name> which means <description>".
std::string sentence_key(const std::string& name, const std::string& description);

} // namespace ctxmatch

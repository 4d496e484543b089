#include "ctxmatch/textvec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ctxmatch/errors.hpp"

namespace ctxmatch {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string casefold(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ull ^ seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void l2_normalize(std::vector<double>& v) {
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0)
        for (double& x : v) x /= norm;
}

} // namespace

VectorStore load_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", "cannot open vector file: " + path);

    std::string line;
    if (!std::getline(in, line) || trim(line).empty())
        throw Error("MalformedHeader", "missing 'count dim' header in " + path);

    std::istringstream header(line);
    long long count = -1, dim = -1;
    if (!(header >> count >> dim) || count < 0 || dim <= 0)
        throw Error("MalformedHeader", "bad 'count dim' header in " + path);

    VectorStore store;
    store.dim = static_cast<std::size_t>(dim);
    store.source = VectorSource::File;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        std::vector<double> vec;
        vec.reserve(store.dim);
        double x;
        while (ss >> x) vec.push_back(x);
        if (vec.size() != store.dim)
            throw Error("DimensionMismatch",
                        "line " + std::to_string(lineno) + " has " + std::to_string(vec.size()) +
                            " values, expected " + std::to_string(store.dim) + " in " + path);
        if (store.entries.count(key))
            std::cerr << "warning: duplicate key '" << key << "' in " << path
                      << ", last occurrence wins\n";
        store.entries[key] = std::move(vec);
    }
    if (store.entries.size() != static_cast<std::size_t>(count))
        std::cerr << "warning: header declares " << count << " entries, file has "
                  << store.entries.size() << " (" << path << ")\n";
    return store;
}

void TextVectorProvider::set_sentence_store(VectorStore store) {
    sentence_store_ = std::move(store);
}

void TextVectorProvider::set_token_store(VectorStore store) { token_store_ = std::move(store); }

std::size_t TextVectorProvider::sentence_dim() const {
    return sentence_store_.dim != 0 ? sentence_store_.dim : cfg_.dim;
}

std::size_t TextVectorProvider::token_dim() const {
    return token_store_.dim != 0 ? token_store_.dim : cfg_.dim;
}

std::vector<double> TextVectorProvider::hash_embed(const std::string& text,
                                                   bool boundary_pad) const {
    std::string s = casefold(trim(text));
    if (boundary_pad) s = "<" + s + ">";
    std::size_t dim = boundary_pad ? token_dim() : sentence_dim();

    std::vector<double> v(dim, 0.0);
    std::size_t grams = 0;
    for (std::size_t n = cfg_.ngram_min; n <= cfg_.ngram_max && n <= s.size(); ++n) {
        for (std::size_t i = 0; i + n <= s.size(); ++i) {
            std::uint64_t h = fnv1a(s.substr(i, n), cfg_.seed);
            double sign = (h >> 63) ? 1.0 : -1.0;
            v[h % dim] += sign;
            ++grams;
        }
    }
    if (grams == 0 && !s.empty()) {
        // shorter than ngram_min: hash the whole string as one gram
        std::uint64_t h = fnv1a(s, cfg_.seed);
        v[h % dim] += (h >> 63) ? 1.0 : -1.0;
    }
    l2_normalize(v);
    return v;
}

std::vector<double> TextVectorProvider::embed_sentence(const std::string& text) const {
    std::string key = trim(text);
    if (sentence_store_.dim != 0) {
        auto it = sentence_store_.entries.find(key);
        if (it != sentence_store_.entries.end()) return it->second;
    }
    return hash_embed(key, /*boundary_pad=*/false);
}

std::vector<double> TextVectorProvider::embed_token(const std::string& token) const {
    std::string key = trim(token);
    if (token_store_.dim != 0) {
        auto it = token_store_.entries.find(key);
        if (it != token_store_.entries.end()) return it->second;
    }
    return hash_embed(key, /*boundary_pad=*/true);
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw Error("LengthMismatch", "cosine of vectors with lengths " +
                                          std::to_string(u.size()) + " and " +
                                          std::to_string(v.size()));
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        std::cerr << "warning: cosine with zero vector, returning 0\n";
        return 0.0;
    }
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::string sentence_key(const std::string& name, const std::string& description) {
    std::string n = trim(name);
    std::string d = trim(description);
    if (d.empty()) return n;
    return n + " which means " + d;
}

} // namespace ctxmatch

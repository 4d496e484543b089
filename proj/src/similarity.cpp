#include "ctxmatch/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ctxmatch/errors.hpp"
#include "ctxmatch/parallel.hpp"

namespace ctxmatch {

namespace {

std::string casefold(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

std::size_t levenshtein(const std::string& a, const std::string& b) {
    if (a.size() < b.size()) return levenshtein(b, a);
    // b is the shorter string; single-row DP
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t keep = diag;
            diag = row[j];
            if (a[i - 1] == b[j - 1]) {
                row[j] = keep;
            } else {
                row[j] = 1 + std::min({keep, row[j], row[j - 1]});
            }
        }
    }
    return row[b.size()];
}

SchemaSimilarity schema_similarity(const ColumnMeta& meta_i, const ColumnMeta& meta_j,
                                   const TextVectorProvider& provider) {
    std::string key_i = sentence_key(meta_i.name, meta_i.description.value_or(""));
    std::string key_j = sentence_key(meta_j.name, meta_j.description.value_or(""));
    double cos = cosine(provider.embed_sentence(key_i), provider.embed_sentence(key_j));
    double s_cos = (cos + 1.0) / 2.0;

    std::string e_i = casefold(meta_i.name);
    std::string e_j = casefold(meta_j.name);
    double s_lev;
    std::size_t longest = std::max(e_i.size(), e_j.size());
    if (longest == 0) {
        s_lev = 1.0;
    } else {
        s_lev = 1.0 - static_cast<double>(levenshtein(e_i, e_j)) / static_cast<double>(longest);
    }
    return {s_cos, s_lev, (s_cos + s_lev) / 2.0};
}

InstanceSimilarity instance_similarity(const ColumnProfile& p_i, const ColumnProfile& p_j,
                                       const MergeConfig& cfg) {
    auto v_i = p_i.flat();
    auto v_j = p_j.flat();

    // cosine over the full 9-vector, -1 fill included
    double dot = 0, ni = 0, nj = 0;
    for (std::size_t k = 0; k < v_i.size(); ++k) {
        dot += v_i[k] * v_j[k];
        ni += v_i[k] * v_i[k];
        nj += v_j[k] * v_j[k];
    }
    double v_cos;
    if (ni == 0.0 || nj == 0.0) v_cos = 0.5;  // zero vector: neutral midpoint
    else v_cos = (dot / (std::sqrt(ni) * std::sqrt(nj)) + 1.0) / 2.0;

    // relative gap only over indices applicable on both sides
    auto m_i = p_i.applicable();
    auto m_j = p_j.applicable();
    double sum = 0;
    std::size_t n_applicable = 0;
    for (std::size_t k = 0; k < v_i.size(); ++k) {
        if (!m_i[k] || !m_j[k]) continue;
        double delta = std::pow(std::abs(v_i[k] - v_j[k]), cfg.beta) /
                       (v_i[k] + v_j[k] + cfg.epsilon);
        sum += delta;
        ++n_applicable;
    }
    double s_diff;
    bool low_confidence = n_applicable == 0;
    if (low_confidence) {
        s_diff = 0.0;
    } else {
        double d = sum / static_cast<double>(n_applicable);
        s_diff = 1.0 - std::clamp(d, 0.0, 1.0);
    }
    double s_instance = (v_cos + s_diff) / 2.0;
    return {v_cos, s_diff, s_instance, low_confidence};
}

double confidence(const ColumnProfile& p_i, const ColumnProfile& p_j, std::size_t n_rows_i,
                  std::size_t n_rows_j, const MergeConfig& cfg) {
    double completeness = (1.0 - p_i.missing_rate) * (1.0 - p_j.missing_rate);
    double smaller = static_cast<double>(std::min(n_rows_i, n_rows_j));
    double size_factor =
        std::min(1.0, smaller / static_cast<double>(cfg.size_saturation_rows));
    return completeness * size_factor;
}

MergedSimilarity merge_similarity(double s_schema, double s_instance, double r_value,
                                  const MergeConfig& cfg) {
    double alpha = cfg.alpha_max - (cfg.alpha_max - cfg.alpha_min) * r_value;
    double s_total = alpha * s_schema + (1.0 - alpha) * s_instance;
    return {alpha, s_total};
}

SimilarityMatrix column_similarity_matrix(const TableData& ta, const TableData& tb,
                                          const std::vector<ColumnProfile>& profiles_a,
                                          const std::vector<ColumnProfile>& profiles_b,
                                          const TextVectorProvider& provider,
                                          const MergeConfig& cfg) {
    if (profiles_a.size() != ta.n_cols() || profiles_b.size() != tb.n_cols())
        throw Error("ProfileMismatch", "profile count does not match column count");

    SimilarityMatrix m;
    m.n_a = ta.n_cols();
    m.n_b = tb.n_cols();
    m.scores.resize(m.n_a * m.n_b);

    parallel_for(m.n_a * m.n_b, [&](std::size_t idx) {
        std::size_t i = idx / m.n_b;
        std::size_t j = idx % m.n_b;
        SimilarityScore s;
        auto schema = schema_similarity(ta.columns[i], tb.columns[j], provider);
        auto inst = instance_similarity(profiles_a[i], profiles_b[j], cfg);
        double r = confidence(profiles_a[i], profiles_b[j], ta.n_rows(), tb.n_rows(), cfg);
        auto merged = merge_similarity(schema.s_schema, inst.s_instance, r, cfg);
        s.s_cos = schema.s_cos;
        s.s_lev = schema.s_lev;
        s.s_schema = schema.s_schema;
        s.v_cos = inst.v_cos;
        s.s_diff = inst.s_diff;
        s.s_instance = inst.s_instance;
        s.alpha = merged.alpha;
        s.s_total = merged.s_total;
        s.low_confidence = inst.low_confidence;
        m.scores[idx] = s;
    });
    return m;
}

void write_similarity_csv(const SimilarityMatrix& m, const TableData& ta, const TableData& tb,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", "cannot write " + path);
    out << "col_a,col_b,s_cos,s_lev,S_schema,v_cos,s_diff,S_instance,alpha,S_total\n";
    char buf[256];
    for (std::size_t i = 0; i < m.n_a; ++i) {
        for (std::size_t j = 0; j < m.n_b; ++j) {
            const auto& s = m.at(i, j);
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", s.s_cos,
                          s.s_lev, s.s_schema, s.v_cos, s.s_diff, s.s_instance, s.alpha,
                          s.s_total);
            out << normalize_column_name(ta.columns[i].name) << ','
                << normalize_column_name(tb.columns[j].name) << ',' << buf << "\n";
        }
    }
}

} // namespace ctxmatch

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ctxmatch/tabular.hpp"
#include "ctxmatch/textvec.hpp"

namespace ctxmatch {

struct MergeConfig {
    double alpha_min = 0.3;
    double alpha_max = 0.9;
    double beta = 0.5;       // outlier-damping exponent in the relative gap
    double epsilon = 1e-9;
    double tau_cid = 0.6;    // CID-CID edge threshold
    std::size_t size_saturation_rows = 1000;
};

struct SimilarityScore {
    double s_cos = 0.0;
    double s_lev = 0.0;
    double s_schema = 0.0;
    double v_cos = 0.0;
    double s_diff = 0.0;
    double s_instance = 0.0;
    double alpha = 0.0;
    double s_total = 0.0;
    bool low_confidence = false;  // no applicable instance features at all
};

std::size_t levenshtein(const std::string& a, const std::string& b);

struct SchemaSimilarity {
    double s_cos;
    double s_lev;
    double s_schema;
};

SchemaSimilarity schema_similarity(const ColumnMeta& meta_i, const ColumnMeta& meta_j,
                                   const TextVectorProvider& provider);

struct InstanceSimilarity {
    double v_cos;
    double s_diff;
    double s_instance;
    bool low_confidence;
};

InstanceSimilarity instance_similarity(const ColumnProfile& p_i, const ColumnProfile& p_j,
                                       const MergeConfig& cfg);

double confidence(const ColumnProfile& p_i, const ColumnProfile& p_j,
                  std::size_t n_rows_i, std::size_t n_rows_j, const MergeConfig& cfg);

struct MergedSimilarity {
    double alpha;
    double s_total;
};

MergedSimilarity merge_similarity(double s_schema, double s_instance, double r_value,
                                  const MergeConfig& cfg);

struct SimilarityMatrix {
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    std::vector<SimilarityScore> scores;  // row-major, n_a x n_b

    const SimilarityScore& at(std::size_t i, std::size_t j) const { return scores[i * n_b + j]; }
};

SimilarityMatrix column_similarity_matrix(const TableData& ta, const TableData& tb,
                                          const std::vector<ColumnProfile>& profiles_a,
                                          const std::vector<ColumnProfile>& profiles_b,
                                          const TextVectorProvider& provider,
                                          const MergeConfig& cfg);

void write_similarity_csv(const SimilarityMatrix& m, const TableData& ta, const TableData& tb,
                          const std::string& path);

} // namespace ctxmatch

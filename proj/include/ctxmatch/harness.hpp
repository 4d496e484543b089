#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctxmatch/embed.hpp"
#include "ctxmatch/graph.hpp"
#include "ctxmatch/kvconfig.hpp"
#include "ctxmatch/match.hpp"
#include "ctxmatch/similarity.hpp"
#include "ctxmatch/tabular.hpp"
#include "ctxmatch/walks.hpp"

namespace ctxmatch {

enum class PipelineMode { Proposed, Baseline };

struct PipelineConfig {
    std::string table_a_path;
    std::string table_b_path;
    std::string meta_a_path;
    std::string meta_b_path;
    std::string truth_path;
    std::string sentence_vectors_path;
    std::string token_vectors_path;
    std::string freq_list_path;

    MergeConfig merge;
    ImportanceConfig importance;
    WalkConfig walk;
    TrainConfig train;
    HashEmbedConfig hash;

    double tau_match = 0.5;
    double tau_er = 0.5;
    double tau_tok = 0.9;
    bool token_merge = true;
    bool er_complete_pairs = false;
    TokenMode token_mode = TokenMode::Cell;

    PipelineMode mode = PipelineMode::Proposed;
    std::string out_dir;
    std::uint64_t seed = 1;

    static PipelineConfig from_file(const std::string& path);
    void apply(const KvConfig& kv);
    KvConfig resolved() const;
};

struct PipelineResult {
    MatchReport sm;
    MatchReport er;
    GraphStats stats;
    std::uint64_t corpus_fingerprint = 0;
};

// load -> normalize -> profile -> similarity -> graph -> merge ->
// weights -> walks -> train -> match -> evaluate, writing all artifacts
// under cfg.out_dir. Deterministic given seed in deterministic mode.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// In-memory variant used by the sweep and by tests: tables already
// loaded and normalized, truth in memory. Writes artifacts only when
// out_dir is non-empty.
PipelineResult run_pipeline(const PipelineConfig& cfg, const TableData& ta, const TableData& tb,
                            const GroundTruth& truth);

// --- property perturbation ------------------------------------------------

// Blanks non-missing cells until the overall missing rate hits
// target_rate (within one cell). Per-column blanking probability is
// (1 - bias) + bias * (1 - importance).
TableData inject_missing(const TableData& t, double target_rate, double importance_bias,
                         std::uint64_t seed, const ImportanceConfig& icfg = {});

// Uniform row subsampling without replacement down to
// ceil(target_cells / n_cols) rows; original row order preserved.
TableData subsample(const TableData& t, std::size_t target_cells, std::uint64_t seed);

struct OverlapPair {
    TableData a;
    TableData b;
    GroundTruth truth;
};

// Carves two overlapping views out of a base table so that the overlap
// rates evaluate to the targets within 1/n rounding. Shared columns in
// B are optionally renamed with abbreviation noise.
OverlapPair make_overlap_pair(const TableData& base, double target_col_overlap,
                              double target_row_overlap, bool rename_noise, std::uint64_t seed);

// --- synthetic data -------------------------------------------------------

struct SyntheticSpec {
    std::size_t n_rows = 200;
    std::size_t n_text_cols = 5;
    std::size_t n_num_cols = 3;
    bool with_descriptions = true;
    std::uint64_t seed = 42;
};

TableData make_synthetic_base(const SyntheticSpec& spec);

// --- sweeps ---------------------------------------------------------------

enum class SweepProperty { MissingRate, DataSize, OverlapColumn, OverlapRow };

struct SweepSpec {
    SweepProperty property = SweepProperty::MissingRate;
    std::vector<double> grid;
    std::size_t replicates = 3;
    std::uint64_t base_seed = 1;
    bool both_modes = true;
    double importance_bias = 0.7;
    // overlap targets used when the swept property is not the overlap itself
    double col_overlap = 1.0;
    double row_overlap = 1.0;
    bool rename_noise = true;
};

struct SweepRow {
    double property_value;
    std::size_t replicate;
    PipelineMode mode;
    double sm_f1;  // NaN when the run failed
    double er_f1;
};

std::vector<SweepRow> sweep(const SweepSpec& spec, const PipelineConfig& base_cfg,
                            const TableData& base);

void write_sweep_csv(const std::vector<SweepRow>& rows, SweepProperty property,
                     const std::string& path);
void write_sweep_summary(const std::vector<SweepRow>& rows, SweepProperty property,
                         const std::string& path);

const char* to_string(SweepProperty p);
const char* to_string(PipelineMode m);

} // namespace ctxmatch

#include "ctxmatch/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>

#include "ctxmatch/errors.hpp"

namespace ctxmatch {

namespace fs = std::filesystem;

const char* to_string(SweepProperty p) {
    switch (p) {
        case SweepProperty::MissingRate: return "missing_rate";
        case SweepProperty::DataSize: return "data_size";
        case SweepProperty::OverlapColumn: return "overlap_column";
        case SweepProperty::OverlapRow: return "overlap_row";
    }
    return "?";
}

const char* to_string(PipelineMode m) {
    return m == PipelineMode::Proposed ? "proposed" : "baseline";
}

// --- config ---------------------------------------------------------------

void PipelineConfig::apply(const KvConfig& kv) {
    table_a_path = kv.get_string("io", "table_a", table_a_path);
    table_b_path = kv.get_string("io", "table_b", table_b_path);
    meta_a_path = kv.get_string("io", "meta_a", meta_a_path);
    meta_b_path = kv.get_string("io", "meta_b", meta_b_path);
    truth_path = kv.get_string("io", "truth", truth_path);
    sentence_vectors_path = kv.get_string("io", "sentence_vectors", sentence_vectors_path);
    token_vectors_path = kv.get_string("io", "token_vectors", token_vectors_path);
    freq_list_path = kv.get_string("io", "freq_list", freq_list_path);
    out_dir = kv.get_string("io", "out_dir", out_dir);

    merge.alpha_min = kv.get_double("merge", "alpha_min", merge.alpha_min);
    merge.alpha_max = kv.get_double("merge", "alpha_max", merge.alpha_max);
    merge.beta = kv.get_double("merge", "beta", merge.beta);
    merge.epsilon = kv.get_double("merge", "epsilon", merge.epsilon);
    merge.tau_cid = kv.get_double("merge", "tau_cid", merge.tau_cid);
    merge.size_saturation_rows = static_cast<std::size_t>(
        kv.get_int("merge", "size_saturation_rows", static_cast<long long>(merge.size_saturation_rows)));

    importance.c_m = kv.get_double("importance", "c_m", importance.c_m);
    importance.c_l = kv.get_double("importance", "c_l", importance.c_l);
    importance.c_v = kv.get_double("importance", "c_v", importance.c_v);
    importance.c_f = kv.get_double("importance", "c_f", importance.c_f);

    walk.walk_length = static_cast<std::size_t>(
        kv.get_int("walk", "walk_length", static_cast<long long>(walk.walk_length)));
    walk.walks_per_node = static_cast<std::size_t>(
        kv.get_int("walk", "walks_per_node", static_cast<long long>(walk.walks_per_node)));
    walk.kappa_cid = kv.get_double("walk", "kappa_cid", walk.kappa_cid);
    std::string sd = kv.get_string("walk", "start_distribution",
                                   walk.start_distribution == StartDistribution::UniformNodes
                                       ? "uniform_nodes"
                                       : "degree_proportional");
    walk.start_distribution = sd == "degree_proportional" ? StartDistribution::DegreeProportional
                                                          : StartDistribution::UniformNodes;

    train.dim = static_cast<std::size_t>(kv.get_int("train", "dim", static_cast<long long>(train.dim)));
    train.window =
        static_cast<std::size_t>(kv.get_int("train", "window", static_cast<long long>(train.window)));
    train.negatives = static_cast<std::size_t>(
        kv.get_int("train", "negatives", static_cast<long long>(train.negatives)));
    train.epochs =
        static_cast<std::size_t>(kv.get_int("train", "epochs", static_cast<long long>(train.epochs)));
    train.lr_initial = kv.get_double("train", "lr_initial", train.lr_initial);
    train.min_count = static_cast<std::size_t>(
        kv.get_int("train", "min_count", static_cast<long long>(train.min_count)));
    train.noise_exponent = kv.get_double("train", "noise_exponent", train.noise_exponent);
    train.deterministic = kv.get_bool("train", "deterministic", train.deterministic);

    hash.dim = static_cast<std::size_t>(kv.get_int("hash", "dim", static_cast<long long>(hash.dim)));

    tau_match = kv.get_double("match", "tau_match", tau_match);
    tau_er = kv.get_double("match", "tau_er", tau_er);
    tau_tok = kv.get_double("match", "tau_tok", tau_tok);
    token_merge = kv.get_bool("match", "token_merge", token_merge);
    er_complete_pairs = kv.get_bool("match", "er_complete_pairs", er_complete_pairs);

    std::string tm = kv.get_string("pipeline", "token_mode",
                                   token_mode == TokenMode::Cell ? "cell" : "word");
    token_mode = tm == "word" ? TokenMode::Word : TokenMode::Cell;
    std::string md =
        kv.get_string("pipeline", "mode", mode == PipelineMode::Proposed ? "proposed" : "baseline");
    mode = md == "baseline" ? PipelineMode::Baseline : PipelineMode::Proposed;
    seed = static_cast<std::uint64_t>(kv.get_int("pipeline", "seed", static_cast<long long>(seed)));
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    PipelineConfig cfg;
    cfg.apply(KvConfig::parse_file(path));
    if (!cfg.freq_list_path.empty()) cfg.importance.freq_list = load_freq_list(cfg.freq_list_path);
    return cfg;
}

KvConfig PipelineConfig::resolved() const {
    KvConfig kv;
    kv.set("io", "table_a", table_a_path);
    kv.set("io", "table_b", table_b_path);
    kv.set("io", "meta_a", meta_a_path);
    kv.set("io", "meta_b", meta_b_path);
    kv.set("io", "truth", truth_path);
    kv.set("io", "sentence_vectors", sentence_vectors_path);
    kv.set("io", "token_vectors", token_vectors_path);
    kv.set("io", "freq_list", freq_list_path);
    kv.set("io", "out_dir", out_dir);
    kv.set_double("merge", "alpha_min", merge.alpha_min);
    kv.set_double("merge", "alpha_max", merge.alpha_max);
    kv.set_double("merge", "beta", merge.beta);
    kv.set_double("merge", "epsilon", merge.epsilon);
    kv.set_double("merge", "tau_cid", merge.tau_cid);
    kv.set_int("merge", "size_saturation_rows", static_cast<long long>(merge.size_saturation_rows));
    kv.set_double("importance", "c_m", importance.c_m);
    kv.set_double("importance", "c_l", importance.c_l);
    kv.set_double("importance", "c_v", importance.c_v);
    kv.set_double("importance", "c_f", importance.c_f);
    kv.set_int("walk", "walk_length", static_cast<long long>(walk.walk_length));
    kv.set_int("walk", "walks_per_node", static_cast<long long>(walk.walks_per_node));
    kv.set_double("walk", "kappa_cid", walk.kappa_cid);
    kv.set("walk", "start_distribution",
           walk.start_distribution == StartDistribution::DegreeProportional
               ? "degree_proportional"
               : "uniform_nodes");
    kv.set_int("train", "dim", static_cast<long long>(train.dim));
    kv.set_int("train", "window", static_cast<long long>(train.window));
    kv.set_int("train", "negatives", static_cast<long long>(train.negatives));
    kv.set_int("train", "epochs", static_cast<long long>(train.epochs));
    kv.set_double("train", "lr_initial", train.lr_initial);
    kv.set_int("train", "min_count", static_cast<long long>(train.min_count));
    kv.set_double("train", "noise_exponent", train.noise_exponent);
    kv.set_bool("train", "deterministic", train.deterministic);
    kv.set_int("hash", "dim", static_cast<long long>(hash.dim));
    kv.set_double("match", "tau_match", tau_match);
    kv.set_double("match", "tau_er", tau_er);
    kv.set_double("match", "tau_tok", tau_tok);
    kv.set_bool("match", "token_merge", token_merge);
    kv.set_bool("match", "er_complete_pairs", er_complete_pairs);
    kv.set("pipeline", "token_mode", token_mode == TokenMode::Cell ? "cell" : "word");
    kv.set("pipeline", "mode", to_string(mode));
    kv.set_int("pipeline", "seed", static_cast<long long>(seed));
    return kv;
}

// --- pipeline -------------------------------------------------------------

PipelineResult run_pipeline(const PipelineConfig& cfg, const TableData& ta, const TableData& tb,
                            const GroundTruth& truth) {
    const bool baseline = cfg.mode == PipelineMode::Baseline;
    const bool emit = !cfg.out_dir.empty();
    if (emit) fs::create_directories(cfg.out_dir);
    auto artifact = [&](const std::string& name) { return cfg.out_dir + "/" + name; };

    TextVectorProvider provider{cfg.hash};
    try {
        if (!cfg.sentence_vectors_path.empty())
            provider.set_sentence_store(load_vectors(cfg.sentence_vectors_path));
        if (!cfg.token_vectors_path.empty())
            provider.set_token_store(load_vectors(cfg.token_vectors_path));
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage=vectors: ") + e.what());
    }

    auto profiles_a = profile_table(ta);
    auto profiles_b = profile_table(tb);

    MergeConfig mc = cfg.merge;
    if (baseline) mc.tau_cid = 2.0;  // no CID edge can clear this

    SimilarityMatrix sim;
    try {
        sim = column_similarity_matrix(ta, tb, profiles_a, profiles_b, provider, mc);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage=similarity: ") + e.what());
    }
    if (emit) write_similarity_csv(sim, ta, tb, artifact("simmatrix.csv"));

    FourPartiteGraph graph;
    try {
        graph = build_four_partite(ta, tb, sim, mc, cfg.token_mode);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage=graph: ") + e.what());
    }

    std::vector<MergeLogEntry> merge_log;
    if (!baseline && cfg.token_merge) {
        auto merged = merge_tokens(graph, provider, cfg.tau_tok);
        graph = std::move(merged.graph);
        merge_log = std::move(merged.log);
    }
    if (emit) {
        std::ofstream out(artifact("merge_log.csv"), std::ios::binary);
        out << "kept,absorbed,cosine\n";
        char buf[64];
        for (const auto& e : merge_log) {
            std::snprintf(buf, sizeof(buf), "%.6f", e.cosine);
            out << e.kept << ',' << e.absorbed << ',' << buf << "\n";
        }
    }

    std::map<std::string, double> importances;
    const TableData* tables[2] = {&ta, &tb};
    const std::vector<ColumnProfile>* profs[2] = {&profiles_a, &profiles_b};
    for (int side = 0; side < 2; ++side) {
        for (std::size_t c = 0; c < tables[side]->n_cols(); ++c) {
            double w = baseline ? 1.0
                                : column_importance((*profs[side])[c], tables[side]->columns[c],
                                                    cfg.importance);
            importances[cid_node_id(tables[side]->table_id, tables[side]->columns[c].name)] = w;
        }
    }
    assign_node_weights(graph, importances);

    GraphStats stats = graph_stats(graph);
    if (emit) {
        std::ofstream out(artifact("graph_stats.txt"), std::ios::binary);
        out << format_stats(stats);
    }

    WalkConfig wc = cfg.walk;
    wc.seed = cfg.seed;
    wc.baseline_mode = baseline;
    WalkCorpus corpus;
    try {
        corpus = generate_corpus(graph, wc);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage=walks: ") + e.what());
    }

    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed + 1;
    EmbeddingSpace space;
    try {
        space = train_skipgram(corpus, tc);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage=train: ") + e.what());
    }
    if (emit) space.export_word2vec(artifact("embeddings.w2v"));

    PipelineResult result;
    result.stats = stats;
    result.corpus_fingerprint = corpus.fingerprint();

    auto sm_pairs = schema_match(space, graph, cfg.tau_match);
    result.sm = evaluate(sm_pairs, truth, MatchTask::SM);

    auto candidates = entity_candidates(graph, cfg.er_complete_pairs);
    auto er_pairs = entity_resolve(space, candidates, cfg.tau_er);
    result.er = evaluate(er_pairs, truth, MatchTask::ER);

    if (emit) {
        cfg.resolved().write_file(artifact("resolved_config.toml"));
        write_report(result.sm, artifact("sm_report.toml"), artifact("sm_pairs.csv"));
        write_report(result.er, artifact("er_report.toml"), artifact("er_pairs.csv"));
        std::ofstream out(artifact("provenance.txt"), std::ios::binary);
        out << "mode = " << to_string(cfg.mode) << "\n";
        out << "seed = " << cfg.seed << "\n";
        out << "graph_fingerprint = " << corpus.graph_fingerprint << "\n";
        out << "corpus_fingerprint = " << result.corpus_fingerprint << "\n";
        out << "corpus_sequences = " << corpus.sequences.size() << "\n";
        out << "vocab = " << space.vocab.size() << "\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.9g",
                      space.epoch_loss.empty() ? 0.0 : space.epoch_loss.back());
        out << "final_loss = " << buf << "\n";
        out << "sentence_vectors = "
            << (provider.sentence_store_loaded() ? "file" : "hashed") << "\n";
        out << "token_vectors = " << (provider.token_store_loaded() ? "file" : "hashed") << "\n";
    }
    return result;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    TableData ta, tb;
    try {
        ta = load_table(cfg.table_a_path, {}, "A");
        tb = load_table(cfg.table_b_path, {}, "B");
        if (!cfg.meta_a_path.empty()) apply_metadata_file(ta, cfg.meta_a_path);
        if (!cfg.meta_b_path.empty()) apply_metadata_file(tb, cfg.meta_b_path);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage=load: ") + e.what());
    }
    auto zero_fill_cols = [](const TableData& t) {
        std::set<std::string> out;
        for (const auto& c : t.columns)
            if (c.zero_fill) out.insert(c.name);
        return out;
    };
    ta = normalize_missing(ta, default_missing_tokens(), zero_fill_cols(ta));
    tb = normalize_missing(tb, default_missing_tokens(), zero_fill_cols(tb));

    GroundTruth truth;
    if (!cfg.truth_path.empty()) truth = load_ground_truth(cfg.truth_path);
    return run_pipeline(cfg, ta, tb, truth);
}

// --- perturbation ---------------------------------------------------------

TableData inject_missing(const TableData& t, double target_rate, double importance_bias,
                         std::uint64_t seed, const ImportanceConfig& icfg) {
    if (t.n_cells() == 0) throw Error("EmptyInput", "cannot inject missing into empty table");
    std::size_t total = t.n_cells();
    std::size_t current = 0;
    for (const auto& row : t.rows)
        for (const auto& cell : row)
            if (!cell.has_value()) ++current;

    auto target_count =
        static_cast<std::size_t>(std::llround(target_rate * static_cast<double>(total)));
    if (target_count < current)
        throw Error("RateBelowCurrent",
                    "target rate " + std::to_string(target_rate) + " is below current rate " +
                        std::to_string(static_cast<double>(current) / static_cast<double>(total)));

    TableData out = t;
    if (target_count == current) return out;

    // per-column blanking weight from importance
    std::vector<double> col_weight(t.n_cols());
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        double w = column_importance(profile_column(t, c), t.columns[c], icfg);
        col_weight[c] = (1.0 - importance_bias) + importance_bias * (1.0 - w);
    }

    std::vector<std::vector<std::size_t>> live(t.n_cols());
    for (std::size_t c = 0; c < t.n_cols(); ++c)
        for (std::size_t r = 0; r < t.n_rows(); ++r)
            if (out.rows[r][c].has_value()) live[c].push_back(r);

    std::mt19937_64 rng(seed);
    std::size_t to_blank = target_count - current;
    while (to_blank > 0) {
        double total_w = 0;
        for (std::size_t c = 0; c < t.n_cols(); ++c)
            if (!live[c].empty()) total_w += col_weight[c];
        std::size_t chosen = t.n_cols();
        if (total_w > 0) {
            std::uniform_real_distribution<double> unit(0.0, total_w);
            double u = unit(rng);
            for (std::size_t c = 0; c < t.n_cols(); ++c) {
                if (live[c].empty()) continue;
                if (u < col_weight[c]) {
                    chosen = c;
                    break;
                }
                u -= col_weight[c];
            }
        }
        if (chosen == t.n_cols()) {
            // all remaining weights zero: uniform over columns with live cells
            std::vector<std::size_t> nonempty;
            for (std::size_t c = 0; c < t.n_cols(); ++c)
                if (!live[c].empty()) nonempty.push_back(c);
            if (nonempty.empty()) break;  // nothing left to blank
            chosen = nonempty[rng() % nonempty.size()];
        }
        auto& cells = live[chosen];
        std::size_t pick = rng() % cells.size();
        out.rows[cells[pick]][chosen] = std::nullopt;
        cells[pick] = cells.back();
        cells.pop_back();
        --to_blank;
    }
    return out;
}

TableData subsample(const TableData& t, std::size_t target_cells, std::uint64_t seed) {
    if (t.n_cols() == 0) throw Error("EmptyInput", "table has no columns");
    if (target_cells < t.n_cols())
        throw Error("TooSmall", "target_cells " + std::to_string(target_cells) +
                                    " is below one row (" + std::to_string(t.n_cols()) + ")");
    std::size_t keep = (target_cells + t.n_cols() - 1) / t.n_cols();
    if (keep >= t.n_rows()) return t;

    std::vector<std::size_t> order(t.n_rows());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(keep);
    std::sort(order.begin(), order.end());  // original row order preserved

    TableData out;
    out.table_id = t.table_id;
    out.columns = t.columns;
    out.rows.reserve(keep);
    for (std::size_t r : order) out.rows.push_back(t.rows[r]);
    return out;
}

namespace {

// closest shared-count for target = k / (k + floor((n - k) / 2))
struct OverlapSplit {
    std::size_t shared;
    std::size_t excl_a;
    std::size_t excl_b;
    double achieved;
};

OverlapSplit solve_overlap(std::size_t n, double target, const char* what) {
    if (n == 0) throw Error("InfeasibleOverlap", std::string("no ") + what + " to split");
    OverlapSplit best{0, 0, 0, -1.0};
    double best_err = 1e9;
    for (std::size_t k = (target > 0.0 ? 1u : 0u); k <= n; ++k) {
        std::size_t rest = n - k;
        std::size_t ea = (rest + 1) / 2;
        std::size_t eb = rest / 2;
        std::size_t smaller = k + std::min(ea, eb);
        if (smaller == 0) continue;
        double rate = static_cast<double>(k) / static_cast<double>(smaller);
        double err = std::abs(rate - target);
        // ties go to the larger shared count (fuller overlap)
        if (err <= best_err) {
            best_err = err;
            best = {k, ea, eb, rate};
        }
    }
    std::size_t smaller = best.shared + std::min(best.excl_a, best.excl_b);
    double tolerance = smaller > 0 ? 1.0 / static_cast<double>(smaller) : 0.0;
    if (best_err > tolerance + 1e-12)
        throw Error("InfeasibleOverlap",
                    std::string(what) + " overlap target " + std::to_string(target) +
                        " unreachable; closest achievable is " + std::to_string(best.achieved));
    return best;
}

std::string add_rename_noise(const std::string& name, std::mt19937_64& rng) {
    std::string base = name;
    switch (rng() % 3) {
        case 0: {
            // drop vowels after the first character
            std::string out;
            out.push_back(base[0]);
            for (std::size_t i = 1; i < base.size(); ++i) {
                char c = static_cast<char>(std::tolower(static_cast<unsigned char>(base[i])));
                if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') continue;
                out.push_back(base[i]);
            }
            return out.size() >= 2 ? out : base + "_v";
        }
        case 1:
            return base.size() > 4 ? base.substr(0, 4) : base + "_s";
        default:
            return base + "_cd";
    }
}

} // namespace

OverlapPair make_overlap_pair(const TableData& base, double target_col_overlap,
                              double target_row_overlap, bool rename_noise, std::uint64_t seed) {
    OverlapSplit cols = solve_overlap(base.n_cols(), target_col_overlap, "column");
    OverlapSplit rows = solve_overlap(base.n_rows(), target_row_overlap, "row");

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> col_order(base.n_cols()), row_order(base.n_rows());
    std::iota(col_order.begin(), col_order.end(), 0);
    std::iota(row_order.begin(), row_order.end(), 0);
    std::shuffle(col_order.begin(), col_order.end(), rng);
    std::shuffle(row_order.begin(), row_order.end(), rng);

    auto take = [](const std::vector<std::size_t>& v, std::size_t from, std::size_t count) {
        std::vector<std::size_t> out(v.begin() + from, v.begin() + from + count);
        std::sort(out.begin(), out.end());
        return out;
    };
    std::vector<std::size_t> shared_cols = take(col_order, 0, cols.shared);
    std::vector<std::size_t> excl_cols_a = take(col_order, cols.shared, cols.excl_a);
    std::vector<std::size_t> excl_cols_b = take(col_order, cols.shared + cols.excl_a, cols.excl_b);
    std::vector<std::size_t> shared_rows = take(row_order, 0, rows.shared);
    std::vector<std::size_t> excl_rows_a = take(row_order, rows.shared, rows.excl_a);
    std::vector<std::size_t> excl_rows_b = take(row_order, rows.shared + rows.excl_a, rows.excl_b);

    auto merge_sorted = [](std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
        a.insert(a.end(), b.begin(), b.end());
        std::sort(a.begin(), a.end());
        return a;
    };
    std::vector<std::size_t> cols_a = merge_sorted(shared_cols, excl_cols_a);
    std::vector<std::size_t> cols_b = merge_sorted(shared_cols, excl_cols_b);
    std::vector<std::size_t> rows_a = merge_sorted(shared_rows, excl_rows_a);
    std::vector<std::size_t> rows_b = merge_sorted(shared_rows, excl_rows_b);
    std::shuffle(rows_b.begin(), rows_b.end(), rng);  // B row order scrambled

    OverlapPair out;
    out.a.table_id = "A";
    out.b.table_id = "B";

    std::map<std::size_t, std::string> renamed;  // base col index -> B name
    for (std::size_t c : cols_b) {
        const ColumnMeta& meta = base.columns[c];
        std::string name = meta.name;
        bool shared = std::binary_search(shared_cols.begin(), shared_cols.end(), c);
        if (rename_noise && shared) name = add_rename_noise(meta.name, rng);
        renamed[c] = name;
    }
    // de-duplicate renamed names within B
    {
        std::map<std::string, int> seen;
        for (std::size_t c : cols_b) {
            std::string key = normalize_column_name(renamed[c]);
            int n = seen[key]++;
            if (n > 0) renamed[c] += "_" + std::to_string(n);
        }
    }

    for (std::size_t c : cols_a) out.a.columns.push_back(base.columns[c]);
    for (std::size_t c : cols_b) {
        ColumnMeta meta = base.columns[c];
        meta.name = renamed[c];
        out.b.columns.push_back(meta);
    }
    for (std::size_t r : rows_a) {
        std::vector<Cell> row;
        row.reserve(cols_a.size());
        for (std::size_t c : cols_a) row.push_back(base.rows[r][c]);
        out.a.rows.push_back(std::move(row));
    }
    for (std::size_t r : rows_b) {
        std::vector<Cell> row;
        row.reserve(cols_b.size());
        for (std::size_t c : cols_b) row.push_back(base.rows[r][c]);
        out.b.rows.push_back(std::move(row));
    }

    for (std::size_t c : shared_cols)
        out.truth.column_pairs.insert({normalize_column_name(base.columns[c].name),
                                       normalize_column_name(renamed[c])});
    std::map<std::size_t, std::size_t> b_pos;
    for (std::size_t i = 0; i < rows_b.size(); ++i) b_pos[rows_b[i]] = i;
    for (std::size_t i = 0; i < rows_a.size(); ++i) {
        std::size_t r = rows_a[i];
        auto it = b_pos.find(r);
        if (it == b_pos.end()) continue;
        if (!std::binary_search(shared_rows.begin(), shared_rows.end(), r)) continue;
        out.truth.row_pairs.insert({rid_node_id("A", i), rid_node_id("B", it->second)});
    }
    return out;
}

// --- synthetic data -------------------------------------------------------

namespace {

const std::vector<std::string>& first_names() {
    static const std::vector<std::string> v = {
        "James", "Mary", "Robert", "Patricia", "John", "Jennifer", "Michael", "Linda", "David",
        "Elizabeth", "William", "Barbara", "Richard", "Susan", "Joseph", "Jessica", "Thomas",
        "Sarah", "Charles", "Karen", "Daniel", "Nancy", "Matthew", "Lisa", "Anthony", "Betty",
        "Mark", "Margaret", "Donald", "Sandra", "Steven", "Ashley", "Paul", "Kimberly",
        "Andrew", "Emily", "Joshua", "Donna", "Kenneth", "Michelle"};
    return v;
}

const std::vector<std::string>& last_names() {
    static const std::vector<std::string> v = {
        "Smith", "Johnson", "Williams", "Brown", "Jones", "Garcia", "Miller", "Davis",
        "Rodriguez", "Martinez", "Hernandez", "Lopez", "Gonzalez", "Wilson", "Anderson",
        "Thomas", "Taylor", "Moore", "Jackson", "Martin", "Lee", "Perez", "Thompson", "White",
        "Harris", "Sanchez", "Clark", "Ramirez", "Lewis", "Robinson", "Walker", "Young",
        "Allen", "King", "Wright", "Scott", "Torres", "Nguyen", "Hill", "Flores"};
    return v;
}

const std::vector<std::string>& cities() {
    static const std::vector<std::string> v = {
        "Tokyo", "Osaka", "London", "Paris", "Berlin", "Madrid", "Rome", "Vienna", "Prague",
        "Zurich", "Amsterdam", "Brussels", "Dublin", "Lisbon", "Oslo", "Stockholm", "Helsinki",
        "Copenhagen", "Warsaw", "Budapest", "Athens", "Istanbul", "Cairo", "Nairobi", "Lagos",
        "Sydney", "Melbourne", "Auckland", "Toronto", "Vancouver", "Montreal", "Chicago",
        "Boston", "Seattle", "Denver", "Austin", "Portland", "Atlanta", "Miami", "Dallas"};
    return v;
}

const std::vector<std::string>& categories() {
    static const std::vector<std::string> v = {
        "electronics", "furniture", "clothing", "groceries", "books", "toys", "sports",
        "garden", "automotive", "health", "beauty", "music", "office", "pets", "jewelry"};
    return v;
}

const std::vector<std::string>& products() {
    static const std::vector<std::string> v = {
        "laptop", "keyboard", "monitor", "desk lamp", "office chair", "notebook", "backpack",
        "water bottle", "headphones", "camera", "tablet", "printer", "router", "speaker",
        "charger", "microphone", "projector", "scanner", "webcam", "mouse"};
    return v;
}

} // namespace

TableData make_synthetic_base(const SyntheticSpec& spec) {
    struct ColDef {
        std::string name;
        std::string description;
        bool numeric;
    };
    static const ColDef text_defs[] = {
        {"Full Name", "the person or customer this record belongs to", false},
        {"City", "the city where the transaction took place", false},
        {"Category", "the product category assigned by the catalog", false},
        {"Product", "the item that was purchased", false},
        {"Notes", "free-form remarks entered by the operator", false},
        {"Region", "the sales region responsible for the order", false},
        {"Status", "the current processing state of the order", false},
    };
    static const ColDef num_defs[] = {
        {"Price", "the amount paid in local currency", true},
        {"Year", "the calendar year the record was created", true},
        {"Score", "the satisfaction score reported by the customer", true},
        {"Quantity", "the number of units in the order", true},
        {"Rating", "the average review rating out of five", true},
        {"Weight", "the shipped weight in kilograms", true},
        {"Discount", "the discount percentage applied at checkout", true},
    };

    TableData t;
    t.table_id = "base";
    std::vector<ColDef> defs;
    for (std::size_t i = 0; i < spec.n_text_cols; ++i) {
        ColDef d = text_defs[i % std::size(text_defs)];
        if (i >= std::size(text_defs)) d.name += " " + std::to_string(i / std::size(text_defs) + 1);
        defs.push_back(d);
    }
    for (std::size_t i = 0; i < spec.n_num_cols; ++i) {
        ColDef d = num_defs[i % std::size(num_defs)];
        if (i >= std::size(num_defs)) d.name += " " + std::to_string(i / std::size(num_defs) + 1);
        defs.push_back(d);
    }
    for (const auto& d : defs) {
        ColumnMeta meta;
        meta.name = d.name;
        if (spec.with_descriptions) meta.description = d.description;
        meta.declared_type = d.numeric ? DeclaredType::Numeric : DeclaredType::Text;
        t.columns.push_back(meta);
    }

    std::mt19937_64 rng(spec.seed);
    auto pick = [&](const std::vector<std::string>& pool) { return pool[rng() % pool.size()]; };

    for (std::size_t r = 0; r < spec.n_rows; ++r) {
        std::vector<Cell> row;
        for (const auto& d : defs) {
            std::string base_name = d.name.substr(0, d.name.find(' '));
            if (!d.numeric) {
                if (base_name == "Full") {
                    row.emplace_back(pick(first_names()) + " " + pick(last_names()));
                } else if (base_name == "City") {
                    row.emplace_back(pick(cities()));
                } else if (base_name == "Category") {
                    row.emplace_back(pick(categories()));
                } else if (base_name == "Product") {
                    row.emplace_back(pick(products()));
                } else if (base_name == "Notes") {
                    row.emplace_back(pick(products()) + " for " + pick(cities()));
                } else if (base_name == "Region") {
                    static const std::vector<std::string> regions = {"north", "south", "east",
                                                                     "west", "central"};
                    row.emplace_back(pick(regions));
                } else {
                    static const std::vector<std::string> status = {"open", "closed", "pending",
                                                                    "shipped", "returned"};
                    row.emplace_back(pick(status));
                }
            } else {
                char buf[32];
                if (base_name == "Price") {
                    std::snprintf(buf, sizeof(buf), "%.2f", (rng() % 100000) / 100.0);
                } else if (base_name == "Year") {
                    std::snprintf(buf, sizeof(buf), "%llu",
                                  static_cast<unsigned long long>(1950 + rng() % 75));
                } else if (base_name == "Score") {
                    std::snprintf(buf, sizeof(buf), "%llu",
                                  static_cast<unsigned long long>(rng() % 101));
                } else if (base_name == "Rating") {
                    std::snprintf(buf, sizeof(buf), "%.1f", 1.0 + (rng() % 41) / 10.0);
                } else if (base_name == "Weight") {
                    std::snprintf(buf, sizeof(buf), "%.3f", (rng() % 50000) / 1000.0);
                } else if (base_name == "Discount") {
                    std::snprintf(buf, sizeof(buf), "%llu",
                                  static_cast<unsigned long long>(rng() % 51));
                } else {
                    std::snprintf(buf, sizeof(buf), "%llu",
                                  static_cast<unsigned long long>(1 + rng() % 500));
                }
                row.emplace_back(std::string(buf));
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// --- sweeps ---------------------------------------------------------------

std::vector<SweepRow> sweep(const SweepSpec& spec, const PipelineConfig& base_cfg,
                            const TableData& base) {
    std::vector<SweepRow> rows;
    std::vector<PipelineMode> modes;
    modes.push_back(PipelineMode::Proposed);
    if (spec.both_modes) modes.push_back(PipelineMode::Baseline);

    for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
        double value = spec.grid[gi];
        for (std::size_t rep = 0; rep < spec.replicates; ++rep) {
            std::uint64_t seed = spec.base_seed + gi * 1009 + rep * 9176867;

            OverlapPair pair;
            bool generated = false;
            std::string gen_error;
            try {
                switch (spec.property) {
                    case SweepProperty::MissingRate: {
                        pair = make_overlap_pair(base, spec.col_overlap, spec.row_overlap,
                                                 spec.rename_noise, seed);
                        if (value > 0.0) {
                            pair.a = inject_missing(pair.a, value, spec.importance_bias, seed + 1,
                                                    base_cfg.importance);
                            pair.b = inject_missing(pair.b, value, spec.importance_bias, seed + 2,
                                                    base_cfg.importance);
                        }
                        break;
                    }
                    case SweepProperty::DataSize: {
                        TableData sub = subsample(base, static_cast<std::size_t>(value), seed);
                        pair = make_overlap_pair(sub, spec.col_overlap, spec.row_overlap,
                                                 spec.rename_noise, seed);
                        break;
                    }
                    case SweepProperty::OverlapColumn:
                        pair = make_overlap_pair(base, value, spec.row_overlap, spec.rename_noise,
                                                 seed);
                        break;
                    case SweepProperty::OverlapRow:
                        pair = make_overlap_pair(base, spec.col_overlap, value, spec.rename_noise,
                                                 seed);
                        break;
                }
                generated = true;
            } catch (const Error& e) {
                gen_error = e.what();
            }

            for (PipelineMode mode : modes) {
                SweepRow row;
                row.property_value = value;
                row.replicate = rep;
                row.mode = mode;
                if (!generated) {
                    row.sm_f1 = row.er_f1 = std::nan("");
                    rows.push_back(row);
                    continue;
                }
                try {
                    PipelineConfig cfg = base_cfg;
                    cfg.mode = mode;
                    cfg.seed = seed + 17;
                    cfg.out_dir.clear();
                    PipelineResult result = run_pipeline(cfg, pair.a, pair.b, pair.truth);
                    row.sm_f1 = result.sm.f1;
                    row.er_f1 = result.er.f1;
                } catch (const Error&) {
                    row.sm_f1 = row.er_f1 = std::nan("");
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, SweepProperty property,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", "cannot write " + path);
    out << "property,value,replicate,mode,sm_f1,er_f1\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.6g,%zu,%s,%.6f,%.6f", r.property_value, r.replicate,
                      to_string(r.mode), r.sm_f1, r.er_f1);
        out << to_string(property) << ',' << buf << "\n";
    }
}

void write_sweep_summary(const std::vector<SweepRow>& rows, SweepProperty property,
                         const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", "cannot write " + path);
    out << "property,value,mode,sm_f1_mean,sm_f1_std,er_f1_mean,er_f1_std,n\n";

    std::map<std::pair<double, std::string>, std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) groups[{r.property_value, to_string(r.mode)}].push_back(&r);

    auto mean_std = [](const std::vector<double>& xs) {
        double m = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        double v = 0;
        for (double x : xs) v += (x - m) * (x - m);
        v /= static_cast<double>(xs.size());
        return std::pair<double, double>{m, std::sqrt(v)};
    };

    char buf[160];
    for (const auto& [key, members] : groups) {
        std::vector<double> sm, er;
        for (const auto* r : members) {
            if (!std::isnan(r->sm_f1)) sm.push_back(r->sm_f1);
            if (!std::isnan(r->er_f1)) er.push_back(r->er_f1);
        }
        auto [sm_m, sm_s] = sm.empty() ? std::pair<double, double>{std::nan(""), std::nan("")}
                                       : mean_std(sm);
        auto [er_m, er_s] = er.empty() ? std::pair<double, double>{std::nan(""), std::nan("")}
                                       : mean_std(er);
        std::snprintf(buf, sizeof(buf), "%.6g,%s,%.6f,%.6f,%.6f,%.6f,%zu", key.first,
                      key.second.c_str(), sm_m, sm_s, er_m, er_s, members.size());
        out << to_string(property) << ',' << buf << "\n";
    }
}

} // namespace ctxmatch

// ctxmatch command-line front end.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ctxmatch/errors.hpp"
#include "ctxmatch/harness.hpp"

namespace cm = ctxmatch;

namespace {

cm::TableData load_input(const std::string& table_path, const std::string& meta_path,
                         const std::string& table_id) {
    cm::TableData t = cm::load_table(table_path, {}, table_id);
    if (!meta_path.empty()) cm::apply_metadata_file(t, meta_path);
    std::set<std::string> zero_fill;
    for (const auto& c : t.columns)
        if (c.zero_fill) zero_fill.insert(c.name);
    return cm::normalize_missing(t, cm::default_missing_tokens(), zero_fill);
}

void write_csv(const cm::TableData& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cm::Error("FileWriteError", "cannot write " + path);
    auto field = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += "\"\"";
            else q += c;
        }
        return q + "\"";
    };
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        if (c) out << ',';
        out << field(t.columns[c].name);
    }
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            if (row[c]) out << field(*row[c]);
        }
        out << "\n";
    }
}

void print_profile(const cm::TableData& t, std::ostream& out) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    out << "table = " << t.table_id << "\n";
    out << "rows = " << t.n_rows() << "\n";
    out << "cols = " << t.n_cols() << "\n";
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        cm::ColumnProfile p = cm::profile_column(t, c);
        out << "\n[" << cm::normalize_column_name(t.columns[c].name) << "]\n";
        out << "missing_rate = " << num(p.missing_rate) << "\n";
        out << "distinct_ratio = " << num(p.distinct_ratio) << "\n";
        out << "linguistic_fraction = " << num(p.linguistic_fraction) << "\n";
        out << "n_valid = " << p.n_valid << "\n";
        out << "numeric = " << (p.has_num ? "true" : "false") << "\n";
        if (p.has_num) {
            out << "num_mean = " << num(p.v_num[0]) << "\n";
            out << "num_min = " << num(p.v_num[1]) << "\n";
            out << "num_max = " << num(p.v_num[2]) << "\n";
            out << "num_var = " << num(p.v_num[3]) << "\n";
            out << "num_std = " << num(p.v_num[4]) << "\n";
        }
        if (p.has_char) {
            out << "r_space = " << num(p.v_char[0]) << "\n";
            out << "r_punc = " << num(p.v_char[1]) << "\n";
            out << "r_special = " << num(p.v_char[2]) << "\n";
            out << "r_digit = " << num(p.v_char[3]) << "\n";
        }
    }
}

struct PipelineStages {
    cm::TableData ta, tb;
    cm::FourPartiteGraph graph;
};

// shared front half of the pipeline for the stage-wise subcommands
PipelineStages build_stages(const cm::PipelineConfig& cfg) {
    PipelineStages s;
    s.ta = load_input(cfg.table_a_path, cfg.meta_a_path, "A");
    s.tb = load_input(cfg.table_b_path, cfg.meta_b_path, "B");

    cm::TextVectorProvider provider{cfg.hash};
    if (!cfg.sentence_vectors_path.empty())
        provider.set_sentence_store(cm::load_vectors(cfg.sentence_vectors_path));
    if (!cfg.token_vectors_path.empty())
        provider.set_token_store(cm::load_vectors(cfg.token_vectors_path));

    auto profiles_a = cm::profile_table(s.ta);
    auto profiles_b = cm::profile_table(s.tb);
    cm::MergeConfig mc = cfg.merge;
    if (cfg.mode == cm::PipelineMode::Baseline) mc.tau_cid = 2.0;
    auto sim = cm::column_similarity_matrix(s.ta, s.tb, profiles_a, profiles_b, provider, mc);
    s.graph = cm::build_four_partite(s.ta, s.tb, sim, mc, cfg.token_mode);
    if (cfg.mode == cm::PipelineMode::Proposed && cfg.token_merge)
        s.graph = cm::merge_tokens(s.graph, provider, cfg.tau_tok).graph;

    std::map<std::string, double> imp;
    const cm::TableData* tables[2] = {&s.ta, &s.tb};
    const std::vector<cm::ColumnProfile>* profs[2] = {&profiles_a, &profiles_b};
    for (int side = 0; side < 2; ++side)
        for (std::size_t c = 0; c < tables[side]->n_cols(); ++c)
            imp[cm::cid_node_id(tables[side]->table_id, tables[side]->columns[c].name)] =
                cfg.mode == cm::PipelineMode::Baseline
                    ? 1.0
                    : cm::column_importance((*profs[side])[c], tables[side]->columns[c],
                                            cfg.importance);
    cm::assign_node_weights(s.graph, imp);
    return s;
}

cm::WalkCorpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cm::Error("FileNotFound", "cannot open corpus: " + path);
    cm::WalkCorpus corpus;
    std::map<std::string, std::uint32_t> index;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<std::uint32_t> seq;
        std::string tok;
        while (ss >> tok) {
            auto [it, fresh] = index.emplace(tok, static_cast<std::uint32_t>(corpus.node_ids.size()));
            if (fresh) corpus.node_ids.push_back(tok);
            seq.push_back(it->second);
        }
        corpus.sequences.push_back(std::move(seq));
    }
    if (corpus.sequences.empty()) throw cm::Error("EmptyInput", "corpus has no sentences");
    return corpus;
}

std::vector<cm::ScoredPair> load_pred(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cm::Error("FileNotFound", "cannot open predictions: " + path);
    std::vector<cm::ScoredPair> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b, c;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        if (first && a == "side_a") {
            first = false;
            continue;
        }
        first = false;
        double cos = 0.0;
        if (!c.empty()) cos = std::strtod(c.c_str(), nullptr);
        out.push_back(cm::ScoredPair{{a, b}, cos});
    }
    return out;
}

void print_report(const cm::MatchReport& r, std::ostream& out) {
    char buf[64];
    out << "task = " << (r.task == cm::MatchTask::SM ? "SM" : "ER") << "\n";
    out << "predicted = " << r.predicted.size() << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", r.precision);
    out << "precision = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", r.recall);
    out << "recall = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", r.f1);
    out << "f1 = " << buf << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"contextual graph embeddings for schema matching and entity resolution"};
    app.require_subcommand(1);

    std::string config_path, table, meta, out, out_b, out_truth;
    std::string mode_str, property_str = "missing_rate", task_str = "sm";
    std::string truth_path, pred_path, base_path;
    double rate = 0.3, bias = 0.7, col_overlap = 0.5, row_overlap = 0.5;
    std::size_t cells = 0, replicates = 3;
    std::size_t syn_rows = 200, syn_text = 5, syn_num = 3;
    bool rename = true, no_descriptions = false, single_mode = false;
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::vector<double> grid;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "TOML-style config file");
        sub->add_option("--mode", mode_str, "proposed or baseline");
        sub->add_option("--seed", seed, "random seed override")->each([&](const std::string&) {
            seed_set = true;
        });
    };
    auto make_cfg = [&]() {
        cm::PipelineConfig cfg;
        if (!config_path.empty()) cfg = cm::PipelineConfig::from_file(config_path);
        if (mode_str == "baseline") cfg.mode = cm::PipelineMode::Baseline;
        else if (mode_str == "proposed") cfg.mode = cm::PipelineMode::Proposed;
        else if (!mode_str.empty())
            throw cm::Error("MalformedConfig", "unknown mode: " + mode_str);
        if (seed_set) cfg.seed = seed;
        return cfg;
    };

    auto* p_profile = app.add_subcommand("profile", "column statistics for one table");
    p_profile->add_option("table", table, "input CSV")->required();
    p_profile->add_option("--meta", meta, "metadata sidecar");
    p_profile->add_option("-o,--out", out, "write to file instead of stdout");

    auto* p_sim = app.add_subcommand("simmatrix", "column similarity matrix between two tables");
    add_config(p_sim);
    p_sim->add_option("-o,--out", out, "output CSV")->required();

    auto* p_graph = app.add_subcommand("build-graph", "build the 4-partite graph");
    add_config(p_graph);
    p_graph->add_option("-o,--out", out, "graph dump path")->required();
    p_graph->add_option("--stats", out_b, "graph stats path");

    auto* p_walk = app.add_subcommand("walk", "generate the random-walk corpus");
    add_config(p_walk);
    p_walk->add_option("-o,--out", out, "corpus dump path")->required();

    auto* p_train = app.add_subcommand("train", "train embeddings from a corpus dump");
    add_config(p_train);
    p_train->add_option("corpus", table, "corpus dump (one sentence per line)")->required();
    p_train->add_option("-o,--out", out, "word2vec output path")->required();

    auto* p_match = app.add_subcommand("match", "full pipeline, no ground truth required");
    add_config(p_match);
    p_match->add_option("-o,--out", out, "output directory")->required();

    auto* p_eval = app.add_subcommand("eval", "score predictions against ground truth");
    p_eval->add_option("--truth", truth_path, "ground truth CSV")->required();
    p_eval->add_option("--pred", pred_path, "predicted pairs CSV")->required();
    p_eval->add_option("--task", task_str, "sm or er");

    auto* p_perturb = app.add_subcommand("perturb", "dataset perturbation operators");
    p_perturb->require_subcommand(1);
    auto* p_missing = p_perturb->add_subcommand("missing", "blank cells to a target rate");
    p_missing->add_option("table", table, "input CSV")->required();
    p_missing->add_option("--rate", rate, "target missing rate")->required();
    p_missing->add_option("--bias", bias, "importance bias in [0, 1]");
    p_missing->add_option("--seed", seed, "random seed");
    p_missing->add_option("-o,--out", out, "output CSV")->required();
    auto* p_sub = p_perturb->add_subcommand("subsample", "row subsample to a cell budget");
    p_sub->add_option("table", table, "input CSV")->required();
    p_sub->add_option("--cells", cells, "target cell count")->required();
    p_sub->add_option("--seed", seed, "random seed");
    p_sub->add_option("-o,--out", out, "output CSV")->required();
    auto* p_overlap = p_perturb->add_subcommand("overlap", "carve two overlapping views");
    p_overlap->add_option("table", table, "base CSV")->required();
    p_overlap->add_option("--col-overlap", col_overlap, "target column overlap rate");
    p_overlap->add_option("--row-overlap", row_overlap, "target row overlap rate");
    p_overlap->add_flag("--rename,!--no-rename", rename, "rename shared columns in view B");
    p_overlap->add_option("--seed", seed, "random seed");
    p_overlap->add_option("--out-a", out, "view A CSV")->required();
    p_overlap->add_option("--out-b", out_b, "view B CSV")->required();
    p_overlap->add_option("--out-truth", out_truth, "ground truth CSV")->required();

    auto* p_sweep = app.add_subcommand("sweep", "property sweep over a synthetic or given base");
    add_config(p_sweep);
    p_sweep->add_option("--property", property_str,
                        "missing_rate | data_size | overlap_column | overlap_row");
    p_sweep->add_option("--grid", grid, "property values")->required();
    p_sweep->add_option("--replicates", replicates, "replicates per grid point");
    p_sweep->add_option("--base", base_path, "base table CSV (default: synthetic)");
    p_sweep->add_option("--rows", syn_rows, "synthetic base rows");
    p_sweep->add_option("--text-cols", syn_text, "synthetic text columns");
    p_sweep->add_option("--num-cols", syn_num, "synthetic numeric columns");
    p_sweep->add_flag("--no-descriptions", no_descriptions, "omit column descriptions");
    p_sweep->add_option("--col-overlap", col_overlap, "fixed column overlap target");
    p_sweep->add_option("--row-overlap", row_overlap, "fixed row overlap target");
    p_sweep->add_flag("--single-mode", single_mode, "proposed mode only");
    p_sweep->add_option("-o,--out", out, "results CSV")->required();
    p_sweep->add_option("--summary", out_b, "summary CSV");

    auto* p_run = app.add_subcommand("run", "full pipeline with evaluation");
    add_config(p_run);
    p_run->add_option("-o,--out", out, "output directory override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*p_profile) {
            cm::TableData t = load_input(table, meta, "A");
            if (out.empty()) {
                print_profile(t, std::cout);
            } else {
                std::ofstream f(out, std::ios::binary);
                if (!f) throw cm::Error("FileWriteError", "cannot write " + out);
                print_profile(t, f);
            }
        } else if (*p_sim) {
            cm::PipelineConfig cfg = make_cfg();
            cm::TableData ta = load_input(cfg.table_a_path, cfg.meta_a_path, "A");
            cm::TableData tb = load_input(cfg.table_b_path, cfg.meta_b_path, "B");
            cm::TextVectorProvider provider{cfg.hash};
            if (!cfg.sentence_vectors_path.empty())
                provider.set_sentence_store(cm::load_vectors(cfg.sentence_vectors_path));
            if (!cfg.token_vectors_path.empty())
                provider.set_token_store(cm::load_vectors(cfg.token_vectors_path));
            auto sim = cm::column_similarity_matrix(ta, tb, cm::profile_table(ta),
                                                    cm::profile_table(tb), provider, cfg.merge);
            cm::write_similarity_csv(sim, ta, tb, out);
        } else if (*p_graph) {
            cm::PipelineConfig cfg = make_cfg();
            PipelineStages s = build_stages(cfg);
            s.graph.dump(out);
            std::string stats = cm::format_stats(cm::graph_stats(s.graph));
            if (out_b.empty()) std::cout << stats;
            else {
                std::ofstream f(out_b, std::ios::binary);
                f << stats;
            }
        } else if (*p_walk) {
            cm::PipelineConfig cfg = make_cfg();
            PipelineStages s = build_stages(cfg);
            cm::WalkConfig wc = cfg.walk;
            wc.seed = cfg.seed;
            wc.baseline_mode = cfg.mode == cm::PipelineMode::Baseline;
            cm::WalkCorpus corpus = cm::generate_corpus(s.graph, wc);
            corpus.dump(out);
            std::cout << "sentences = " << corpus.sequences.size() << "\n";
            std::cout << "fingerprint = " << corpus.fingerprint() << "\n";
        } else if (*p_train) {
            cm::PipelineConfig cfg = make_cfg();
            cm::WalkCorpus corpus = load_corpus(table);
            cm::TrainConfig tc = cfg.train;
            tc.seed = cfg.seed + 1;
            cm::EmbeddingSpace space = cm::train_skipgram(corpus, tc);
            space.export_word2vec(out);
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.9g",
                          space.epoch_loss.empty() ? 0.0 : space.epoch_loss.back());
            std::cout << "vocab = " << space.vocab.size() << "\n";
            std::cout << "final_loss = " << buf << "\n";
        } else if (*p_match || *p_run) {
            cm::PipelineConfig cfg = make_cfg();
            if (!out.empty()) cfg.out_dir = out;
            if (*p_match) cfg.truth_path.clear();
            cm::PipelineResult r = cm::run_pipeline(cfg);
            std::cout << "[sm]\n";
            print_report(r.sm, std::cout);
            std::cout << "\n[er]\n";
            print_report(r.er, std::cout);
        } else if (*p_eval) {
            cm::GroundTruth truth = cm::load_ground_truth(truth_path);
            auto pred = load_pred(pred_path);
            cm::MatchTask task = task_str == "er" ? cm::MatchTask::ER : cm::MatchTask::SM;
            print_report(cm::evaluate(pred, truth, task), std::cout);
        } else if (*p_missing) {
            cm::TableData t = load_input(table, "", "A");
            write_csv(cm::inject_missing(t, rate, bias, seed), out);
        } else if (*p_sub) {
            cm::TableData t = load_input(table, "", "A");
            write_csv(cm::subsample(t, cells, seed), out);
        } else if (*p_overlap) {
            cm::TableData t = load_input(table, "", "base");
            cm::OverlapPair pair = cm::make_overlap_pair(t, col_overlap, row_overlap, rename, seed);
            write_csv(pair.a, out);
            write_csv(pair.b, out_b);
            cm::write_ground_truth(pair.truth, out_truth);
            cm::OverlapRates rates = cm::overlap_rates(pair.truth, pair.a, pair.b);
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f %.6f", rates.overlap_column, rates.overlap_row);
            std::cout << "achieved overlap (column row) = " << buf << "\n";
        } else if (*p_sweep) {
            cm::PipelineConfig cfg = make_cfg();
            cm::TableData base;
            if (!base_path.empty()) {
                base = load_input(base_path, "", "base");
            } else {
                cm::SyntheticSpec ss;
                ss.n_rows = syn_rows;
                ss.n_text_cols = syn_text;
                ss.n_num_cols = syn_num;
                ss.with_descriptions = !no_descriptions;
                ss.seed = cfg.seed;
                base = cm::make_synthetic_base(ss);
            }
            cm::SweepSpec spec;
            if (property_str == "missing_rate") spec.property = cm::SweepProperty::MissingRate;
            else if (property_str == "data_size") spec.property = cm::SweepProperty::DataSize;
            else if (property_str == "overlap_column")
                spec.property = cm::SweepProperty::OverlapColumn;
            else if (property_str == "overlap_row") spec.property = cm::SweepProperty::OverlapRow;
            else
                throw cm::Error("MalformedConfig", "unknown property: " + property_str);
            spec.grid = grid;
            spec.replicates = replicates;
            spec.base_seed = cfg.seed;
            spec.both_modes = !single_mode;
            spec.col_overlap = col_overlap;
            spec.row_overlap = row_overlap;
            auto rows = cm::sweep(spec, cfg, base);
            cm::write_sweep_csv(rows, spec.property, out);
            if (!out_b.empty()) cm::write_sweep_summary(rows, spec.property, out_b);
            std::cout << "rows = " << rows.size() << "\n";
        }
    } catch (const cm::Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mapsynth/apps.hpp"
#include "mapsynth/compat.hpp"
#include "mapsynth/corpus.hpp"
#include "mapsynth/curate.hpp"
#include "mapsynth/extract.hpp"
#include "mapsynth/generator.hpp"
#include "mapsynth/partition.hpp"
#include "mapsynth/pipeline.hpp"
#include "mapsynth/resolve.hpp"
#include "mapsynth/strmatch.hpp"

namespace {

using namespace mapsynth;

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::pair<std::string, std::string> split_kv(const std::string& s, char sep) {
    auto pos = s.find(sep);
    if (pos == std::string::npos)
        throw std::runtime_error("expected '" + std::string(1, sep) + "' in: " + s);
    return {s.substr(0, pos), s.substr(pos + 1)};
}

SynonymStore load_synonyms_opt(const std::string& path) {
    return path.empty() ? SynonymStore() : SynonymStore::load_tsv(path);
}

// Config keys exposed 1:1 as CLI flags on `run`.
const std::vector<std::string> kConfigKeys = {
    "coherence-threshold", "theta-fd", "min-rows", "coherence-value-cap",
    "f-ed", "k-ed", "theta-overlap", "theta-edge", "tau", "bucket-cap",
    "min-domains", "workers", "synonyms", "negative-edges", "resolve"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mapsynth: synthesize mapping tables from a corpus of relational tables"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse a corpus and print stats");
    std::string ingest_corpus;
    bool ingest_stats = false;
    ingest->add_option("--corpus", ingest_corpus, "corpus jsonl path")->required();
    ingest->add_flag("--stats", ingest_stats, "print table/column/row counts");

    // extract
    auto* extract = app.add_subcommand("extract", "emit candidate two-column tables");
    std::string ex_corpus, ex_out;
    ExtractConfig ex_cfg;
    int ex_workers = 1;
    extract->add_option("--corpus", ex_corpus)->required();
    extract->add_option("--out", ex_out)->required();
    extract->add_option("--coherence-threshold", ex_cfg.coherence_threshold);
    extract->add_option("--theta-fd", ex_cfg.theta_fd);
    extract->add_option("--min-rows", ex_cfg.min_rows);
    extract->add_option("--workers", ex_workers);

    // graph
    auto* graphc = app.add_subcommand("graph", "build the compatibility graph");
    std::string gr_candidates, gr_out, gr_synonyms;
    GraphConfig gr_cfg;
    MatchConfig gr_mcfg;
    int gr_workers = 1;
    graphc->add_option("--candidates", gr_candidates)->required();
    graphc->add_option("--out", gr_out)->required();
    graphc->add_option("--theta-overlap", gr_cfg.theta_overlap);
    graphc->add_option("--theta-edge", gr_cfg.theta_edge);
    graphc->add_option("--tau", gr_cfg.tau);
    graphc->add_option("--f-ed", gr_mcfg.f_ed);
    graphc->add_option("--k-ed", gr_mcfg.k_ed);
    graphc->add_option("--synonyms", gr_synonyms);
    graphc->add_option("--workers", gr_workers);

    // synthesize
    auto* synth = app.add_subcommand("synthesize", "partition the graph greedily");
    std::string sy_graph, sy_out, sy_candidates;
    double sy_tau = -0.2;
    int sy_workers = 1;
    synth->add_option("--graph", sy_graph)->required();
    synth->add_option("--out", sy_out)->required();
    synth->add_option("--tau", sy_tau);
    synth->add_option("--candidates", sy_candidates,
                      "include isolated candidates as singleton partitions");
    synth->add_option("--workers", sy_workers);

    // resolve
    auto* resolvec = app.add_subcommand("resolve", "remove conflicting tables per partition");
    std::string rs_partitions, rs_candidates, rs_out, rs_synonyms;
    MatchConfig rs_mcfg;
    int rs_workers = 1;
    resolvec->add_option("--partitions", rs_partitions)->required();
    resolvec->add_option("--candidates", rs_candidates)->required();
    resolvec->add_option("--out", rs_out)->required();
    resolvec->add_option("--f-ed", rs_mcfg.f_ed);
    resolvec->add_option("--k-ed", rs_mcfg.k_ed);
    resolvec->add_option("--synonyms", rs_synonyms);
    resolvec->add_option("--workers", rs_workers);

    // curate
    auto* curatec = app.add_subcommand("curate", "rank and filter mappings by popularity");
    std::string cu_mappings, cu_out;
    std::uint32_t cu_min_domains = 8;
    std::string cu_format = "jsonl";
    curatec->add_option("--mappings", cu_mappings)->required();
    curatec->add_option("--out", cu_out)->required();
    curatec->add_option("--min-domains", cu_min_domains);
    curatec->add_option("--format", cu_format)->check(CLI::IsMember({"jsonl", "tsv"}));

    // eval
    auto* evalc = app.add_subcommand("eval", "score mappings against ground truth");
    std::string ev_mappings, ev_truth, ev_report;
    evalc->add_option("--mappings", ev_mappings)->required();
    evalc->add_option("--truth", ev_truth)->required();
    evalc->add_option("--report", ev_report)->required();

    // lookup
    auto* lookup = app.add_subcommand("lookup", "query curated mappings");
    lookup->require_subcommand(1);
    std::string lk_store;
    lookup->add_option("--store", lk_store, "curated mappings jsonl")->required();

    auto* fill = lookup->add_subcommand("fill", "auto-fill values for keys");
    std::vector<std::string> fill_examples;
    std::vector<std::string> fill_keys;
    std::string fill_keys_file;
    fill->add_option("--example", fill_examples, "key=value example pair")->required();
    fill->add_option("--key", fill_keys, "key to fill");
    fill->add_option("--keys-file", fill_keys_file, "file with one key per line");

    auto* correct = lookup->add_subcommand("correct", "suggest fixes for a mixed column");
    std::vector<std::string> cor_cells;
    std::string cor_column_file;
    correct->add_option("--cell", cor_cells, "column cell value");
    correct->add_option("--column-file", cor_column_file, "file with one cell per line");

    auto* join = lookup->add_subcommand("join", "bridge two key columns");
    std::string join_left, join_right;
    double join_floor = 0.5;
    join->add_option("--left-file", join_left)->required();
    join->add_option("--right-file", join_right)->required();
    join->add_option("--coverage-floor", join_floor);

    // run
    auto* runc = app.add_subcommand("run", "run the full pipeline");
    std::string run_config, run_corpus, run_out_dir;
    runc->add_option("--config", run_config, "key = value config file");
    runc->add_option("--corpus", run_corpus)->required();
    runc->add_option("--out-dir", run_out_dir)->required();
    std::vector<std::string> run_overrides(kConfigKeys.size());
    for (std::size_t i = 0; i < kConfigKeys.size(); ++i)
        runc->add_option("--" + kConfigKeys[i], run_overrides[i]);

    // gen
    auto* genc = app.add_subcommand("gen", "generate a labeled synthetic corpus");
    std::string gen_spec, gen_out_dir;
    std::uint64_t gen_seed = 0;
    genc->add_option("--spec", gen_spec)->required();
    genc->add_option("--seed", gen_seed);
    genc->add_option("--out-dir", gen_out_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            CorpusStats stats;
            load_corpus(ingest_corpus, &stats);
            std::cout << "tables\t" << stats.tables << "\ncolumns\t" << stats.columns
                      << "\nrows\t" << stats.rows << "\nskipped_lines\t" << stats.skipped_lines
                      << "\nragged_rows\t" << stats.ragged_rows << "\n";
        } else if (*extract) {
            auto corpus = load_corpus(ex_corpus);
            auto index = build_index(corpus, ex_workers);
            ExtractReport report;
            auto candidates = extract_candidates(corpus, ex_cfg, index, ex_workers, &report);
            write_candidates(candidates, ex_out);
            std::cerr << "candidates\t" << candidates.size() << "\nfiltered_fraction\t"
                      << report.filtered_fraction() << "\n";
        } else if (*graphc) {
            auto candidates = load_candidates(gr_candidates);
            auto synonyms = load_synonyms_opt(gr_synonyms);
            GraphReport report;
            auto g = build_graph(candidates, gr_cfg, gr_mcfg, synonyms, gr_workers, &report);
            write_graph(g, gr_out);
            std::cerr << "pos_edges\t" << g.pos_edges.size() << "\nneg_edges\t"
                      << g.neg_edges.size() << "\n";
        } else if (*synth) {
            std::vector<std::string> known;
            if (!sy_candidates.empty())
                for (const auto& c : load_candidates(sy_candidates)) known.push_back(c.id);
            auto g = load_graph(sy_graph, known);
            auto p = greedy_partition(g, sy_tau, sy_workers);
            write_partitions(p, sy_out);
            std::cerr << "partitions\t" << p.parts.size() << "\nobjective\t"
                      << objective(p, g) << "\n";
        } else if (*resolvec) {
            auto candidates = load_candidates(rs_candidates);
            std::unordered_map<std::string, const CandidateTable*> by_id;
            for (const auto& c : candidates) by_id[c.id] = &c;
            auto partitions = load_partitions(rs_partitions);
            auto synonyms = load_synonyms_opt(rs_synonyms);
            std::vector<SynthesizedMapping> mappings;
            char idbuf[16];
            for (std::size_t p = 0; p < partitions.parts.size(); ++p) {
                std::vector<CandidateTable> members;
                for (const auto& id : partitions.parts[p]) {
                    auto it = by_id.find(id);
                    if (it == by_id.end())
                        throw std::runtime_error("partition references unknown candidate: " + id);
                    members.push_back(*it->second);
                }
                auto resolved = resolve_conflicts(members, rs_mcfg, synonyms);
                std::snprintf(idbuf, sizeof(idbuf), "m%06zu", p);
                if (auto m = compute_stats(resolved, idbuf)) mappings.push_back(std::move(*m));
            }
            export_mappings(mappings, rs_out, MappingFormat::jsonl);
            std::cerr << "mappings\t" << mappings.size() << "\n";
        } else if (*curatec) {
            auto mappings = rank_and_filter(load_mappings(cu_mappings), cu_min_domains);
            export_mappings(mappings, cu_out,
                            cu_format == "tsv" ? MappingFormat::tsv : MappingFormat::jsonl);
            std::cerr << "curated\t" << mappings.size() << "\n";
        } else if (*evalc) {
            auto report =
                evaluate_against_truth(load_mappings(ev_mappings), load_mappings(ev_truth));
            write_eval_report(report, ev_report);
            std::cout << "macro_precision\t" << report.macro_precision << "\nmacro_recall\t"
                      << report.macro_recall << "\nmacro_fscore\t" << report.macro_fscore
                      << "\n";
        } else if (*lookup) {
            MappingStore store = MappingStore::load(lk_store);
            if (*fill) {
                std::vector<std::pair<std::string, std::string>> examples;
                for (const auto& e : fill_examples) examples.push_back(split_kv(e, '='));
                auto keys = fill_keys;
                if (!fill_keys_file.empty())
                    for (auto& k : read_lines(fill_keys_file)) keys.push_back(std::move(k));
                auto result = auto_fill(store, examples, keys);
                if (result.mapping_id.empty()) {
                    std::cerr << result.diagnostic << "\n";
                    return 1;
                }
                std::cerr << "mapping\t" << result.mapping_id << "\n";
                for (std::size_t i = 0; i < keys.size(); ++i)
                    std::cout << keys[i] << '\t'
                              << (result.values[i] ? *result.values[i] : "") << "\n";
            } else if (*correct) {
                auto cells = cor_cells;
                if (!cor_column_file.empty())
                    for (auto& c : read_lines(cor_column_file)) cells.push_back(std::move(c));
                auto result = auto_correct(store, cells);
                if (result.mapping_id.empty()) {
                    std::cerr << result.diagnostic << "\n";
                    return 1;
                }
                std::cerr << "mapping\t" << result.mapping_id << "\n";
                for (const auto& s : result.suggestions)
                    std::cout << s.index << '\t' << cells[s.index] << '\t' << s.suggestion
                              << "\n";
            } else if (*join) {
                auto result = auto_join_bridge(store, read_lines(join_left),
                                               read_lines(join_right), join_floor);
                if (result.mapping_id.empty()) {
                    std::cerr << result.diagnostic << "\n";
                    return 1;
                }
                std::cerr << "mapping\t" << result.mapping_id << "\n";
                for (const auto& [l, r] : result.pairs) std::cout << l << '\t' << r << "\n";
            }
        } else if (*runc) {
            PipelineConfig cfg;
            if (!run_config.empty()) cfg = load_config(run_config);
            for (std::size_t i = 0; i < kConfigKeys.size(); ++i) {
                if (runc->count("--" + kConfigKeys[i]))
                    set_config_value(cfg, kConfigKeys[i], run_overrides[i]);
            }
            auto result = run_pipeline(cfg, run_corpus, run_out_dir);
            std::cout << "curated\t" << result.curated.size() << "\npartitions\t"
                      << result.report.partitions << "\nobjective\t" << result.report.objective
                      << "\n";
        } else if (*genc) {
            auto spec = load_spec(gen_spec);
            auto generated = generate_corpus(spec, gen_seed, gen_out_dir);
            std::cout << "tables\t" << generated.tables << "\nnoisy_tables\t"
                      << generated.noisy_tables << "\ncorpus\t" << generated.corpus_path
                      << "\ntruth\t" << generated.truth_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

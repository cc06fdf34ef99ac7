#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"

#include "benchmark_spec.hpp"
#include "mapsynth/compat.hpp"
#include "mapsynth/generator.hpp"
#include "mapsynth/partition.hpp"
#include "mapsynth/pipeline.hpp"
#include "mapsynth/resolve.hpp"

using namespace mapsynth;

namespace {

std::string tmp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "mapsynth_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SyntheticSpec two_mapping_spec() {
    SyntheticSpec spec;
    spec.tables = 60;
    spec.domains = 6;
    spec.rows_min = 8;
    spec.rows_max = 16;
    spec.synonym_rate = 0.0;
    spec.full_prefix_prob = 1.0;  // nested fragments, guaranteed chains
    // N:1 mappings (two lefts per right) so the reverse column order fails
    // the FD filter and only the planted direction survives
    const char* concepts[] = {"stone", "cloud"};
    for (int m = 0; m < 2; ++m) {
        SyntheticMappingSpec ms;
        ms.name = "planted_" + std::to_string(m);
        for (std::size_t i = 0; i < 16; ++i)
            ms.pairs.emplace_back(fixtures::entity_word(i) + " " + concepts[m],
                                  "t" + std::to_string(m) + "v" + std::to_string(i / 2));
        spec.mappings.push_back(std::move(ms));
    }
    return spec;
}

}  // namespace

TEST_CASE("generator is seed-stable") {
    auto spec = two_mapping_spec();
    auto dir_a = tmp_dir("gen_a");
    auto dir_b = tmp_dir("gen_b");
    auto a = generate_corpus(spec, 7, dir_a);
    auto b = generate_corpus(spec, 7, dir_b);
    CHECK(slurp(a.corpus_path) == slurp(b.corpus_path));
    CHECK(slurp(a.truth_path) == slurp(b.truth_path));

    auto c = generate_corpus(spec, 8, tmp_dir("gen_c"));
    CHECK(slurp(a.corpus_path) != slurp(c.corpus_path));
}

TEST_CASE("zero-noise fragments stay inside the ground truth") {
    auto spec = two_mapping_spec();
    spec.tables = 10;
    spec.mappings.resize(1);
    auto generated = generate_corpus(spec, 3, tmp_dir("gen_clean"));
    REQUIRE(generated.truth.size() == 1);
    std::set<std::pair<std::string, std::string>> truth(generated.truth[0].pairs.begin(),
                                                        generated.truth[0].pairs.end());
    auto corpus = load_corpus(generated.corpus_path);
    REQUIRE(corpus.size() == 10);
    for (const auto& t : corpus) {
        for (const auto& row : t.rows) {
            REQUIRE(truth.count({normalize_cell(row[0]), normalize_cell(row[1])}) == 1);
        }
    }
    CHECK(generated.noisy_tables == 0);
}

TEST_CASE("inconsistent specs are rejected") {
    auto spec = two_mapping_spec();
    spec.noise.cell_typo = 1.5;
    CHECK_THROWS_AS(validate_spec(spec), std::invalid_argument);
    spec = two_mapping_spec();
    spec.rows_min = 0;
    CHECK_THROWS_AS(validate_spec(spec), std::invalid_argument);
    spec = two_mapping_spec();
    spec.mappings.clear();
    CHECK_THROWS_AS(validate_spec(spec), std::invalid_argument);
}

TEST_CASE("spec json round-trips") {
    auto spec = fixtures::benchmark_spec(100, 5, 0.01);
    auto dir = tmp_dir("spec_io");
    auto path = dir + "/spec.json";
    write_spec(spec, path);
    auto loaded = load_spec(path);
    CHECK(loaded.tables == spec.tables);
    CHECK(loaded.domains == spec.domains);
    CHECK(loaded.noise.cell_typo == doctest::Approx(spec.noise.cell_typo));
    REQUIRE(loaded.mappings.size() == spec.mappings.size());
    for (std::size_t m = 0; m < loaded.mappings.size(); ++m) {
        CHECK(loaded.mappings[m].name == spec.mappings[m].name);
        CHECK(loaded.mappings[m].pairs == spec.mappings[m].pairs);
        CHECK(loaded.mappings[m].synonyms == spec.mappings[m].synonyms);
    }
}

TEST_CASE("code-system fragments carry conflicting rows") {
    auto spec = fixtures::benchmark_spec(300, 10, 0.0);
    auto generated = generate_corpus(spec, 11, tmp_dir("gen_codes"));
    auto corpus = load_corpus(generated.corpus_path);

    // pick one fragment per system that covers a differing row, then check
    // the same left maps to different rights
    std::map<std::string, std::string> iso_rows, ioc_rows;
    for (const auto& t : corpus) {
        for (const auto& row : t.rows) {
            auto l = normalize_cell(row[0]);
            auto r = normalize_cell(row[1]);
            if (l.find("land") == std::string::npos) continue;
            if (r.rfind("is", 0) == 0) iso_rows[l] = r;
            if (r.rfind("oc", 0) == 0) ioc_rows[l] = r;
        }
    }
    int conflicts = 0;
    for (const auto& [l, r] : iso_rows) {
        auto it = ioc_rows.find(l);
        if (it != ioc_rows.end() && it->second != r) ++conflicts;
    }
    CHECK(conflicts >= 10);
}

TEST_CASE("empty corpus runs to empty outputs") {
    auto dir = tmp_dir("pipe_empty");
    auto corpus_path = dir + "/corpus.jsonl";
    std::ofstream(corpus_path).close();
    PipelineConfig cfg;
    auto result = run_pipeline(cfg, corpus_path, dir + "/out");
    CHECK(result.curated.empty());
    CHECK(result.report.corpus.tables == 0);
    CHECK(result.report.candidates == 0);
    CHECK(result.report.partitions == 0);
    CHECK(result.report.objective == 0.0);
    CHECK(std::filesystem::exists(dir + "/out/curated.jsonl"));
    CHECK(std::filesystem::exists(dir + "/out/report.json"));
}

TEST_CASE("two disjoint planted mappings come back as two curated mappings") {
    auto spec = two_mapping_spec();
    auto generated = generate_corpus(spec, 21, tmp_dir("pipe_two_gen"));
    PipelineConfig cfg;
    cfg.min_domains = 1;
    auto result = run_pipeline(cfg, generated.corpus_path, tmp_dir("pipe_two_out"));
    REQUIRE(result.curated.size() == 2);

    auto report = evaluate_against_truth(result.curated, generated.truth);
    CHECK(report.macro_fscore == doctest::Approx(1.0));
    CHECK(result.curated[0].n_domains >= 2);
}

TEST_CASE("pipeline reruns are byte-identical and worker-independent") {
    auto spec = two_mapping_spec();
    spec.tables = 80;
    spec.noise.cell_typo = 0.02;
    auto generated = generate_corpus(spec, 5, tmp_dir("pipe_det_gen"));

    PipelineConfig cfg;
    cfg.min_domains = 1;
    auto out1 = tmp_dir("pipe_det_1");
    auto out2 = tmp_dir("pipe_det_2");
    auto out8 = tmp_dir("pipe_det_8");
    cfg.workers = 1;
    run_pipeline(cfg, generated.corpus_path, out1);
    run_pipeline(cfg, generated.corpus_path, out2);
    cfg.workers = 8;
    run_pipeline(cfg, generated.corpus_path, out8);

    for (const char* artifact :
         {"candidates.jsonl", "graph.jsonl", "partitions.jsonl", "mappings.jsonl",
          "curated.jsonl"}) {
        CAPTURE(artifact);
        auto base = slurp(out1 + "/" + artifact);
        CHECK(base == slurp(out2 + "/" + artifact));
        CHECK(base == slurp(out8 + "/" + artifact));
    }
}

TEST_CASE("stage-by-stage CLI composition equals run_pipeline") {
    auto spec = two_mapping_spec();
    spec.tables = 50;
    auto generated = generate_corpus(spec, 13, tmp_dir("pipe_stage_gen"));
    auto whole_dir = tmp_dir("pipe_stage_whole");
    PipelineConfig cfg;
    cfg.min_domains = 1;
    run_pipeline(cfg, generated.corpus_path, whole_dir);

    // same stages, materialized through the file formats
    auto stage_dir = tmp_dir("pipe_stage_steps");
    auto corpus = load_corpus(generated.corpus_path);
    auto index = build_index(corpus);
    auto candidates = extract_candidates(corpus, cfg.extract, index);
    write_candidates(candidates, stage_dir + "/candidates.jsonl");

    auto loaded_candidates = load_candidates(stage_dir + "/candidates.jsonl");
    SynonymStore synonyms;
    auto graph = build_graph(loaded_candidates, cfg.graph, cfg.match, synonyms);
    write_graph(graph, stage_dir + "/graph.jsonl");

    std::vector<std::string> ids;
    for (const auto& c : loaded_candidates) ids.push_back(c.id);
    auto loaded_graph = load_graph(stage_dir + "/graph.jsonl", ids);
    auto partitioning = greedy_partition(loaded_graph, cfg.graph.tau);
    write_partitions(partitioning, stage_dir + "/partitions.jsonl");

    auto loaded_partitions = load_partitions(stage_dir + "/partitions.jsonl");
    std::unordered_map<std::string, const CandidateTable*> by_id;
    for (const auto& c : loaded_candidates) by_id[c.id] = &c;
    std::vector<SynthesizedMapping> mappings;
    char idbuf[16];
    for (std::size_t p = 0; p < loaded_partitions.parts.size(); ++p) {
        std::vector<CandidateTable> members;
        for (const auto& id : loaded_partitions.parts[p]) members.push_back(*by_id.at(id));
        auto resolved = resolve_conflicts(members, cfg.match, synonyms);
        std::snprintf(idbuf, sizeof(idbuf), "m%06zu", p);
        if (auto m = compute_stats(resolved, idbuf)) mappings.push_back(std::move(*m));
    }
    auto curated = rank_and_filter(std::move(mappings), cfg.min_domains);
    export_mappings(curated, stage_dir + "/curated.jsonl", MappingFormat::jsonl);

    CHECK(slurp(whole_dir + "/curated.jsonl") == slurp(stage_dir + "/curated.jsonl"));
}

TEST_CASE("config files parse and reject unknown keys") {
    auto dir = tmp_dir("config");
    auto path = dir + "/run.conf";
    {
        std::ofstream out(path);
        out << "# pipeline settings\n";
        out << "theta-edge = 0.7\n";
        out << "tau = -0.3\n";
        out << "min-domains = 2\n";
        out << "workers = 4\n";
        out << "resolve = false\n";
    }
    auto cfg = load_config(path);
    CHECK(cfg.graph.theta_edge == doctest::Approx(0.7));
    CHECK(cfg.graph.tau == doctest::Approx(-0.3));
    CHECK(cfg.min_domains == 2);
    CHECK(cfg.workers == 4);
    CHECK_FALSE(cfg.run_resolve);

    PipelineConfig fresh;
    CHECK_THROWS_AS(set_config_value(fresh, "no-such-key", "1"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_value(fresh, "theta-edge", "abc"), std::invalid_argument);
}

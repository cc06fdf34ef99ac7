#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mapsynth/compat.hpp"
#include "mapsynth/curate.hpp"
#include "mapsynth/extract.hpp"
#include "mapsynth/strmatch.hpp"

namespace mapsynth {

struct PipelineConfig {
    ExtractConfig extract;
    MatchConfig match;
    GraphConfig graph;
    std::uint32_t min_domains = 8;
    int workers = 1;
    bool use_negative_edges = true;  // off reproduces the positives-only ablation
    bool run_resolve = true;
    std::string synonyms_path;
};

// Flat `key = value` file, keys named after the CLI flags
// (coherence-threshold, theta-fd, min-rows, f-ed, k-ed, theta-overlap,
// theta-edge, tau, min-domains, workers, synonyms, negative-edges, resolve).
PipelineConfig load_config(const std::string& path);
// Applies one key/value; throws std::invalid_argument on unknown keys or
// unparsable values. CLI flags reuse this to override file settings.
void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);

struct StageTiming {
    std::string stage;
    double millis = 0.0;
};

struct RunReport {
    CorpusStats corpus;
    ExtractReport extract;
    GraphReport graph;
    std::size_t candidates = 0;
    std::size_t pos_edges = 0;
    std::size_t neg_edges = 0;
    std::map<std::size_t, std::size_t> component_sizes;  // size -> count
    std::size_t partitions = 0;
    double objective = 0.0;
    std::size_t tables_removed = 0;  // by conflict resolution
    std::size_t mappings_total = 0;
    std::size_t curated = 0;
    std::vector<StageTiming> timings;

    double total_millis() const;
};

void write_run_report(const RunReport& report, const std::string& path);

struct PipelineResult {
    std::vector<SynthesizedMapping> curated;
    RunReport report;
};

// extract -> graph -> partition -> resolve -> curate. Every stage result is
// materialized under out_dir (candidates.jsonl, graph.jsonl, partitions.jsonl,
// mappings.jsonl, curated.jsonl, report.json) so stages can be re-run
// individually.
PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& corpus_path,
                            const std::string& out_dir);

}  // namespace mapsynth

#include "mapsynth/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

#include "mapsynth/parallel.hpp"
#include "mapsynth/partition.hpp"
#include "mapsynth/resolve.hpp"

namespace mapsynth {

namespace {

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric value for " + key + ": " + v);
    }
}

long parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        long i = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer value for " + key + ": " + v);
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("bad boolean value for " + key + ": " + v);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

class StageClock {
  public:
    explicit StageClock(RunReport& report) : report_(report) {}
    void start(const std::string& stage) {
        stage_ = stage;
        t0_ = std::chrono::steady_clock::now();
    }
    void stop() {
        auto dt = std::chrono::steady_clock::now() - t0_;
        report_.timings.push_back(StageTiming{
            stage_, std::chrono::duration<double, std::milli>(dt).count()});
    }

  private:
    RunReport& report_;
    std::string stage_;
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace

void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "coherence-threshold") {
        cfg.extract.coherence_threshold = parse_double(value, key);
    } else if (key == "theta-fd") {
        cfg.extract.theta_fd = parse_double(value, key);
    } else if (key == "min-rows") {
        cfg.extract.min_rows = static_cast<std::size_t>(parse_int(value, key));
    } else if (key == "coherence-value-cap") {
        cfg.extract.coherence_value_cap = static_cast<std::size_t>(parse_int(value, key));
    } else if (key == "f-ed") {
        cfg.match.f_ed = parse_double(value, key);
    } else if (key == "k-ed") {
        cfg.match.k_ed = static_cast<int>(parse_int(value, key));
    } else if (key == "theta-overlap") {
        cfg.graph.theta_overlap = static_cast<int>(parse_int(value, key));
    } else if (key == "theta-edge") {
        cfg.graph.theta_edge = parse_double(value, key);
    } else if (key == "tau") {
        cfg.graph.tau = parse_double(value, key);
    } else if (key == "bucket-cap") {
        cfg.graph.bucket_cap = static_cast<std::size_t>(parse_int(value, key));
    } else if (key == "min-domains") {
        cfg.min_domains = static_cast<std::uint32_t>(parse_int(value, key));
    } else if (key == "workers") {
        cfg.workers = static_cast<int>(parse_int(value, key));
    } else if (key == "synonyms") {
        cfg.synonyms_path = value;
    } else if (key == "negative-edges") {
        cfg.use_negative_edges = parse_bool(value, key);
    } else if (key == "resolve") {
        cfg.run_resolve = parse_bool(value, key);
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " is not key = value");
        set_config_value(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return cfg;
}

double RunReport::total_millis() const {
    double t = 0.0;
    for (const auto& s : timings) t += s.millis;
    return t;
}

void write_run_report(const RunReport& report, const std::string& path) {
    nlohmann::json j;
    j["corpus"] = {{"tables", report.corpus.tables},
                   {"columns", report.corpus.columns},
                   {"rows", report.corpus.rows},
                   {"skipped_lines", report.corpus.skipped_lines},
                   {"ragged_rows", report.corpus.ragged_rows}};
    j["extract"] = {{"columns_kept", report.extract.columns_kept},
                    {"pairs_considered", report.extract.pairs_considered},
                    {"candidates", report.candidates},
                    {"filtered_fraction", report.extract.filtered_fraction()}};
    j["graph"] = {{"pos_edges", report.pos_edges},
                  {"neg_edges", report.neg_edges},
                  {"pos_pairs_evaluated", report.graph.pos_pairs_evaluated},
                  {"neg_pairs_evaluated", report.graph.neg_pairs_evaluated},
                  {"buckets_skipped", report.graph.buckets_skipped}};
    auto hist = nlohmann::json::object();
    for (const auto& [size, count] : report.component_sizes)
        hist[std::to_string(size)] = count;
    j["components"] = std::move(hist);
    j["partitions"] = report.partitions;
    j["objective"] = report.objective;
    j["tables_removed"] = report.tables_removed;
    j["mappings_total"] = report.mappings_total;
    j["curated"] = report.curated;
    auto times = nlohmann::json::array();
    for (const auto& t : report.timings)
        times.push_back({{"stage", t.stage}, {"millis", t.millis}});
    j["timings"] = std::move(times);
    j["total_millis"] = report.total_millis();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report file: " + path);
    out << j.dump(2) << '\n';
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& corpus_path,
                            const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    PipelineResult result;
    RunReport& report = result.report;
    StageClock clock(report);

    clock.start("load");
    auto corpus = load_corpus(corpus_path, &report.corpus);
    SynonymStore synonyms;
    if (!cfg.synonyms_path.empty()) synonyms = SynonymStore::load_tsv(cfg.synonyms_path);
    clock.stop();

    clock.start("index");
    auto index = build_index(corpus, cfg.workers);
    clock.stop();

    clock.start("extract");
    auto candidates =
        extract_candidates(corpus, cfg.extract, index, cfg.workers, &report.extract);
    report.candidates = candidates.size();
    write_candidates(candidates, out_dir + "/candidates.jsonl");
    clock.stop();

    clock.start("graph");
    GraphConfig gcfg = cfg.graph;
    if (!cfg.use_negative_edges) gcfg.tau = -2.0;  // nothing qualifies as a hard constraint
    auto graph = build_graph(candidates, gcfg, cfg.match, synonyms, cfg.workers, &report.graph);
    report.pos_edges = graph.pos_edges.size();
    report.neg_edges = graph.neg_edges.size();
    write_graph(graph, out_dir + "/graph.jsonl");
    clock.stop();

    clock.start("partition");
    for (const auto& component : connected_components(graph))
        report.component_sizes[component.size()] += 1;
    auto partitioning = greedy_partition(graph, gcfg.tau, cfg.workers);
    report.partitions = partitioning.parts.size();
    report.objective = objective(partitioning, graph);
    write_partitions(partitioning, out_dir + "/partitions.jsonl");
    clock.stop();

    clock.start("resolve");
    std::unordered_map<std::string, const CandidateTable*> by_id;
    by_id.reserve(candidates.size());
    for (const auto& c : candidates) by_id[c.id] = &c;
    auto resolved = parallel_map<ResolvedPartition>(
        partitioning.parts.size(), cfg.workers, [&](std::size_t p) {
            std::vector<CandidateTable> members;
            members.reserve(partitioning.parts[p].size());
            for (const auto& id : partitioning.parts[p]) members.push_back(*by_id.at(id));
            if (!cfg.run_resolve) {
                ResolvedPartition rp;
                rp.kept = std::move(members);
                rp.merged_pairs = merged_pairs(rp.kept);
                return rp;
            }
            return resolve_conflicts(members, cfg.match, synonyms);
        });
    std::vector<SynthesizedMapping> mappings;
    char idbuf[16];
    for (std::size_t p = 0; p < resolved.size(); ++p) {
        report.tables_removed += resolved[p].removed.size();
        std::snprintf(idbuf, sizeof(idbuf), "m%06zu", p);
        if (auto m = compute_stats(resolved[p], idbuf)) mappings.push_back(std::move(*m));
    }
    report.mappings_total = mappings.size();
    export_mappings(mappings, out_dir + "/mappings.jsonl", MappingFormat::jsonl);
    clock.stop();

    clock.start("curate");
    result.curated = rank_and_filter(std::move(mappings), cfg.min_domains);
    report.curated = result.curated.size();
    export_mappings(result.curated, out_dir + "/curated.jsonl", MappingFormat::jsonl);
    clock.stop();

    write_run_report(report, out_dir + "/report.json");
    return result;
}

}  // namespace mapsynth

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mapsynth/resolve.hpp"

namespace mapsynth {

// A conflict-resolved mapping with popularity statistics.
struct SynthesizedMapping {
    std::string mapping_id;
    std::vector<std::pair<std::string, std::string>> pairs;  // sorted unique
    std::uint32_t n_tables = 0;
    std::uint32_t n_domains = 0;
    std::vector<std::pair<std::string, std::string>> sources;  // (table id, domain)
    bool numeric_right = false;  // flagged, never dropped

    std::size_t size() const { return pairs.size(); }
};

// Popularity statistics for one resolved partition. Empty kept sets yield no
// mapping.
std::optional<SynthesizedMapping> compute_stats(const ResolvedPartition& resolved,
                                                const std::string& mapping_id);

// Drops mappings with n_domains below min_domains and orders the rest by
// (n_domains, n_tables, |pairs|) descending, mapping_id ascending.
std::vector<SynthesizedMapping> rank_and_filter(std::vector<SynthesizedMapping> mappings,
                                                std::uint32_t min_domains);

struct EvalScore {
    double precision = 0.0;
    double recall = 0.0;
    double fscore = 0.0;
};

// Exact-pair precision/recall/f-score of b against ground truth b_star.
// Both empty gives (1,1,1); empty b against non-empty truth gives zeros.
EvalScore evaluate(const std::vector<std::pair<std::string, std::string>>& b,
                   const std::vector<std::pair<std::string, std::string>>& b_star);

enum class MappingFormat { jsonl, tsv };

// jsonl round-trips losslessly; tsv emits (left, right, mapping_id) rows with
// a header and backslash-escaped tabs/newlines.
void export_mappings(const std::vector<SynthesizedMapping>& mappings, const std::string& path,
                     MappingFormat format);
std::vector<SynthesizedMapping> load_mappings(const std::string& path);
std::string mapping_to_jsonl(const SynthesizedMapping& m);

struct CaseReport {
    std::string truth_id;
    std::string best_mapping;  // empty when no mapping scored
    EvalScore score;
    bool numeric_right = false;
};

struct EvalReport {
    std::vector<CaseReport> cases;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_fscore = 0.0;
};

// Scores each truth case by the synthesized mapping with the best f-score,
// then macro-averages across cases.
EvalReport evaluate_against_truth(const std::vector<SynthesizedMapping>& mappings,
                                  const std::vector<SynthesizedMapping>& truth);

void write_eval_report(const EvalReport& report, const std::string& path);

}  // namespace mapsynth

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mapsynth/corpus.hpp"

namespace mapsynth {

struct ExtractConfig {
    double coherence_threshold = 0.0;  // NPMI floor for keeping a column
    double theta_fd = 0.95;            // approximate-FD support fraction
    std::size_t min_rows = 4;          // minimum non-empty row pairs per candidate
    std::size_t coherence_value_cap = 200;  // most-frequent distinct values scored
};

// Value -> sorted set of column ids over the whole corpus, plus the total
// column count N. Columns are numbered in stream order, one id per
// (table, column-index).
struct CooccurrenceIndex {
    std::unordered_map<std::string, std::vector<std::uint32_t>> postings;
    std::uint64_t total_columns = 0;

    std::size_t occurrences(const std::string& value) const {
        auto it = postings.find(value);
        return it == postings.end() ? 0 : it->second.size();
    }
};

CooccurrenceIndex build_index(const std::vector<TableRecord>& corpus, int workers = 1);

// Base-10 pointwise mutual information; -inf stands are avoided by the NPMI
// conventions below, callers wanting raw PMI must ensure a non-zero overlap.
double pmi(const std::string& u, const std::string& v, const CooccurrenceIndex& idx);

// PMI / -log p(u,v), in [-1, 1]. Zero overlap or an absent value gives -1;
// p(u,v) = 1 gives +1.
double npmi(const std::string& u, const std::string& v, const CooccurrenceIndex& idx);

// Mean pairwise NPMI over the column's distinct values, capped at the
// `value_cap` most frequent ones. Fewer than 2 distinct values gives +1.
double column_coherence(const std::vector<std::string>& column, const CooccurrenceIndex& idx,
                        std::size_t value_cap = 200);

// g3-style support: sum over distinct left values of the majority right-value
// count, divided by the total row count, compared to theta. Works on the row
// multiset (duplicates count). Empty input gives false.
bool approximate_fd_holds(const std::vector<std::pair<std::string, std::string>>& pairs,
                          double theta);

// A two-column candidate table: deduplicated (left, right) value pairs with
// provenance. Pairs are kept sorted.
struct CandidateTable {
    std::string id;
    std::string source_table;
    std::uint32_t left_col = 0;
    std::uint32_t right_col = 0;
    std::string domain;
    std::vector<std::pair<std::string, std::string>> pairs;

    std::size_t size() const { return pairs.size(); }
};

struct ExtractReport {
    std::size_t tables_seen = 0;
    std::size_t columns_seen = 0;
    std::size_t columns_kept = 0;
    std::size_t pairs_considered = 0;  // ordered column pairs after the PMI filter
    std::size_t candidates_emitted = 0;

    double filtered_fraction() const {
        return pairs_considered == 0
                   ? 0.0
                   : 1.0 - static_cast<double>(candidates_emitted) /
                               static_cast<double>(pairs_considered);
    }
};

// Algorithm: per table, drop columns with coherence below the threshold, then
// emit every ordered pair of surviving columns that has at least min_rows
// non-empty row pairs and passes the approximate-FD check.
std::vector<CandidateTable> extract_candidates(const std::vector<TableRecord>& corpus,
                                               const ExtractConfig& cfg,
                                               const CooccurrenceIndex& idx, int workers = 1,
                                               ExtractReport* report = nullptr);

// Candidate JSON-lines:
//   {"id","source_table","left_col","right_col","domain","pairs":[["l","r"],...]}
std::string candidate_to_jsonl(const CandidateTable& c);
void write_candidates(const std::vector<CandidateTable>& candidates, const std::string& path);
std::vector<CandidateTable> load_candidates(const std::string& path);

}  // namespace mapsynth

#pragma once

#include <string>
#include <vector>

#include "mapsynth/compat.hpp"
#include "mapsynth/extract.hpp"
#include "mapsynth/strmatch.hpp"

namespace mapsynth {

struct RemovedTable {
    std::string id;
    std::string reason;
};

// A partition after conflict resolution: kept tables are pairwise
// conflict-free; merged_pairs is the exact-value union of their pairs.
struct ResolvedPartition {
    std::vector<CandidateTable> kept;
    std::vector<RemovedTable> removed;
    std::vector<std::pair<std::string, std::string>> merged_pairs;  // sorted unique
};

// Iteratively removes the table whose worst value pair conflicts with the
// most other value pairs in the partition's union, until no two kept tables
// conflict. Ties remove the table with fewer pairs, then the larger id.
ResolvedPartition resolve_conflicts(const std::vector<CandidateTable>& partition,
                                    const MatchConfig& cfg, const SynonymStore& synonyms);

// Exhaustive maximizer of |union of kept pairs| over conflict-free subsets.
// Refuses partitions over `max_tables` tables (default 15).
ResolvedPartition exact_resolve(const std::vector<CandidateTable>& partition,
                                const MatchConfig& cfg, const SynonymStore& synonyms,
                                std::size_t max_tables = 15);

// Exact-value union of the given tables' pair sets; synonyms stay distinct rows.
std::vector<std::pair<std::string, std::string>> merged_pairs(
    const std::vector<CandidateTable>& tables);

}  // namespace mapsynth

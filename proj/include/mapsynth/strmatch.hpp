#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mapsynth {

struct MatchConfig {
    double f_ed = 0.2;  // fractional edit-distance budget
    int k_ed = 10;      // absolute cap on the threshold
};

// theta_ed(v1, v2) = min{ floor(|v1|*f_ed), floor(|v2|*f_ed), k_ed } with
// lengths counted over non-space characters.
int edit_threshold(std::string_view v1, std::string_view v2, const MatchConfig& cfg);

// Levenshtein(a, b) <= bound, banded DP of width 2*bound+1. Exact on the
// predicate: agrees with the full matrix for every input.
bool within_edit_distance(std::string_view a, std::string_view b, int bound);

// Approximate match on normalized values: distance is measured on the
// space-stripped strings so that "american samoa" vs "american samoa us"
// is 2 edits against a threshold of min{floor(13*0.2), floor(15*0.2), 10} = 2.
bool approx_match(std::string_view v1, std::string_view v2, const MatchConfig& cfg);

// Disjoint groups of values known to be synonymous. Loading merges groups
// that share a value, so are_synonyms is an equivalence relation.
class SynonymStore {
  public:
    // Values are normalized on insertion.
    void add_group(const std::vector<std::string>& values);

    // TSV, one group per line, values separated by tabs.
    static SynonymStore load_tsv(const std::string& path);

    bool are_synonyms(std::string_view v1, std::string_view v2) const;
    bool empty() const { return group_of_.empty(); }
    std::size_t group_count() const { return groups_; }

  private:
    int find(int g) const;

    std::unordered_map<std::string, int> group_of_;
    std::vector<int> parent_;  // group-id union-find; lookups never mutate
    std::size_t groups_ = 0;
};

// True iff the values match exactly, approximately, or by synonym lookup.
// Not transitive; downstream set logic uses greedy one-to-one matching.
bool values_equivalent(std::string_view v1, std::string_view v2, const MatchConfig& cfg,
                       const SynonymStore& synonyms);

}  // namespace mapsynth

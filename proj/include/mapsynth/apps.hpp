#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mapsynth/curate.hpp"

namespace mapsynth {

// Curated mappings indexed by left value, right value and exact pair
// membership. Immutable after construction; queries are read-only.
class MappingStore {
  public:
    explicit MappingStore(std::vector<SynthesizedMapping> mappings);
    static MappingStore load(const std::string& path);

    std::size_t size() const { return mappings_.size(); }
    const SynthesizedMapping& mapping(std::size_t i) const { return mappings_[i]; }

    bool has_pair(std::size_t i, const std::string& l, const std::string& r) const;
    bool has_left(std::size_t i, const std::string& l) const;
    bool has_right(std::size_t i, const std::string& r) const;
    // Rights for a left value within mapping i, sorted (mappings are
    // functional only up to synonyms, so several rights can exist).
    std::vector<std::string> rights_of(std::size_t i, const std::string& l) const;
    std::vector<std::string> lefts_of(std::size_t i, const std::string& r) const;

  private:
    std::vector<SynthesizedMapping> mappings_;
    std::vector<std::unordered_set<std::string>> pair_sets_;
    std::vector<std::unordered_map<std::string, std::vector<std::string>>> left_index_;
    std::vector<std::unordered_map<std::string, std::vector<std::string>>> right_index_;
};

struct FillResult {
    std::string mapping_id;  // empty when nothing matched
    std::vector<std::optional<std::string>> values;
    std::string diagnostic;
};

// Picks the mapping matching the most example pairs exactly (ties: higher
// n_domains, then mapping_id) and maps each key through it.
FillResult auto_fill(const MappingStore& store,
                     const std::vector<std::pair<std::string, std::string>>& examples,
                     const std::vector<std::string>& keys);

struct Correction {
    std::size_t index = 0;
    std::string suggestion;
};

struct CorrectResult {
    std::string mapping_id;
    std::vector<Correction> suggestions;
    std::string diagnostic;
};

// Detects a column mixing both sides of one mapping and suggests the
// majority-side form for each minority-side cell.
CorrectResult auto_correct(const MappingStore& store, const std::vector<std::string>& column);

struct JoinResult {
    std::string mapping_id;
    bool flipped = false;  // right side of the mapping matched left_keys
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string diagnostic;
};

// Bridges two key columns through the mapping maximizing
// min(left coverage, right coverage); below coverage_floor nothing is joined.
JoinResult auto_join_bridge(const MappingStore& store, const std::vector<std::string>& left_keys,
                            const std::vector<std::string>& right_keys,
                            double coverage_floor = 0.5);

}  // namespace mapsynth

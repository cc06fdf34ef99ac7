#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mapsynth/corpus.hpp"
#include "mapsynth/curate.hpp"

namespace mapsynth {

// One ground-truth mapping to fragment into tables. Pair order encodes
// popularity: fragments are windows over the list, and windows start at the
// front more often than not.
struct SyntheticMappingSpec {
    std::string name;
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::vector<std::string>> synonyms;  // left-value variants
    double weight = 1.0;                             // share of generated tables
};

struct NoiseSpec {
    double cell_typo = 0.0;     // per row: one random edit in the right value
    double wrong_value = 0.0;   // per row: right value swapped with another row's
    double mixed_column = 0.0;  // per table: append an incoherent extra column
};

struct SyntheticSpec {
    std::vector<SyntheticMappingSpec> mappings;
    std::size_t tables = 100;
    std::size_t rows_min = 8;
    std::size_t rows_max = 20;
    std::size_t domains = 10;
    double synonym_rate = 0.25;     // per-cell chance of using a variant left form
    double full_prefix_prob = 0.5;  // chance a fragment window starts at row 0
    NoiseSpec noise;
};

// Throws std::invalid_argument on inconsistent specs (rates outside [0,1],
// empty mappings, rows_min > rows_max, ...).
void validate_spec(const SyntheticSpec& spec);

SyntheticSpec load_spec(const std::string& path);
void write_spec(const SyntheticSpec& spec, const std::string& path);

struct GeneratedCorpus {
    std::string corpus_path;
    std::string truth_path;
    std::string synonyms_path;
    std::size_t tables = 0;
    std::size_t noisy_tables = 0;
    // Ground truth as mapping records (normalized planted pairs, pre-noise).
    std::vector<SynthesizedMapping> truth;
};

// Fragments each mapping into tables across domains, substituting synonym
// variants and injecting noise at the spec rates. Deterministic per seed.
// Writes corpus.jsonl, truth.jsonl and synonyms.tsv under out_dir.
GeneratedCorpus generate_corpus(const SyntheticSpec& spec, std::uint64_t seed,
                                const std::string& out_dir);

}  // namespace mapsynth

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mapsynth/extract.hpp"
#include "mapsynth/strmatch.hpp"

namespace mapsynth {

struct GraphConfig {
    int theta_overlap = 2;      // bucketing floor: evaluate pairs sharing more than this
    double theta_edge = 0.85;   // keep positive edges with w+ >= theta_edge
    double tau = -0.2;          // negative edges with w- < tau are hard constraints
    std::size_t bucket_cap = 10000;  // skip inverted-index buckets larger than this
};

// Candidate compatibility graph. Vertices are candidate ids; edges are keyed
// by (i, j) with i < j over vertex indexes. pos edges carry w+ in
// [theta_edge, 1], neg edges carry w- < tau; sub-threshold negatives are
// dropped (forced to 0).
struct CompatibilityGraph {
    std::vector<std::string> vertices;
    std::unordered_map<std::uint64_t, double> pos_edges;
    std::unordered_map<std::uint64_t, double> neg_edges;

    static std::uint64_t edge_key(std::uint32_t i, std::uint32_t j) {
        if (i > j) std::swap(i, j);
        return (static_cast<std::uint64_t>(i) << 32) | j;
    }
    std::size_t vertex_count() const { return vertices.size(); }
    std::uint32_t add_vertex(const std::string& id) {
        vertices.push_back(id);
        return static_cast<std::uint32_t>(vertices.size() - 1);
    }
    void add_pos(std::uint32_t i, std::uint32_t j, double w) { pos_edges[edge_key(i, j)] = w; }
    void add_neg(std::uint32_t i, std::uint32_t j, double w) { neg_edges[edge_key(i, j)] = w; }
    double pos(std::uint32_t i, std::uint32_t j) const {
        auto it = pos_edges.find(edge_key(i, j));
        return it == pos_edges.end() ? 0.0 : it->second;
    }
    double neg(std::uint32_t i, std::uint32_t j) const {
        auto it = neg_edges.find(edge_key(i, j));
        return it == neg_edges.end() ? 0.0 : it->second;
    }
};

// |B ∩ B'| via greedy one-to-one matching: exact-equal pairs first, then
// remaining pairs in sorted order matched componentwise with
// values_equivalent. Deterministic.
std::size_t pair_intersection(const CandidateTable& a, const CandidateTable& b,
                              const MatchConfig& cfg, const SynonymStore& synonyms);

// Maximum-of-Containment: max{|B∩B'|/|B|, |B∩B'|/|B'|}.
double positive_weight(const CandidateTable& a, const CandidateTable& b, const MatchConfig& cfg,
                       const SynonymStore& synonyms);

// Left values of `a` mapped by the two tables to non-equivalent rights.
// Synonymous rights do not conflict.
std::vector<std::string> conflict_set(const CandidateTable& a, const CandidateTable& b,
                                      const MatchConfig& cfg, const SynonymStore& synonyms);

// -max{|F(B,B')|/|B|, |F(B',B)|/|B'|}; 0 when there is no conflict.
double negative_weight(const CandidateTable& a, const CandidateTable& b, const MatchConfig& cfg,
                       const SynonymStore& synonyms);

// True when two value pairs assert different rights for equivalent lefts.
bool pairs_conflict(const std::pair<std::string, std::string>& p,
                    const std::pair<std::string, std::string>& q, const MatchConfig& cfg,
                    const SynonymStore& synonyms);

struct GraphReport {
    std::size_t pos_pairs_evaluated = 0;
    std::size_t neg_pairs_evaluated = 0;
    std::size_t buckets_skipped = 0;  // over bucket_cap
};

// Inverted-index regrouping: positive candidates bucket on exact (l,r) pair
// keys, negative candidates on exact left keys; weights are evaluated only
// for pairs sharing more than theta_overlap keys.
CompatibilityGraph build_graph(const std::vector<CandidateTable>& candidates,
                               const GraphConfig& cfg, const MatchConfig& mcfg,
                               const SynonymStore& synonyms, int workers = 1,
                               GraphReport* report = nullptr);

// Edge JSON-lines: {"a","b","wpos","wneg"}, sorted by (a, b).
void write_graph(const CompatibilityGraph& g, const std::string& path);

// Vertices are the edge endpoints plus any known_vertices (so isolated
// candidates can still appear as singleton partitions downstream).
CompatibilityGraph load_graph(const std::string& path,
                              const std::vector<std::string>& known_vertices = {});

}  // namespace mapsynth

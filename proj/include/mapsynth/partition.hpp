#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mapsynth/compat.hpp"

namespace mapsynth {

// Union-by-size with path compression.
class DisjointSet {
  public:
    explicit DisjointSet(std::size_t n);

    std::uint32_t find(std::uint32_t v);
    // Returns the surviving root. No-op (returns the root) if already joined.
    std::uint32_t unite(std::uint32_t a, std::uint32_t b);
    std::size_t size(std::uint32_t v);
    std::size_t set_count() const { return sets_; }

  private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
    std::size_t sets_;
};

// Disjoint cover of the graph's vertices. Members are sorted; parts are
// sorted by their first member, so the representation is canonical.
struct Partitioning {
    std::vector<std::vector<std::string>> parts;
    std::vector<double> part_pos_weight;  // intra-part w+ sums over original edges
};

struct MergeEvent {
    std::string a;  // smallest member id of each side at merge time
    std::string b;
    double weight = 0.0;  // aggregated w+ driving the merge
};

// Components of the union of positive and negative edges, via Hash-to-Min
// style iterative min-label propagation run to fixpoint. Each component lists
// vertex indexes in increasing order; components are ordered by min vertex.
std::vector<std::vector<std::uint32_t>> connected_components(const CompatibilityGraph& g);

// Greedy table synthesis: start from singletons, repeatedly merge the pair of
// partitions with the largest aggregated positive weight whose aggregated
// negative weight is >= tau. On merge, positive weights add and negative
// weights take the min. Ties break on the smallest (min-id, max-id) pair.
Partitioning greedy_partition(const CompatibilityGraph& g, double tau, int workers = 1,
                              std::vector<MergeEvent>* trace = nullptr);

// Sum over parts of original intra-part positive weights. Throws
// std::invalid_argument if a part references an unknown vertex.
double objective(const Partitioning& p, const CompatibilityGraph& g);

// Exhaustive optimum for graphs of at most `max_vertices` vertices (default
// 10; throws std::invalid_argument beyond that). Ties prefer fewer parts,
// then the lexicographically smallest canonical form.
Partitioning exact_partition(const CompatibilityGraph& g, double tau,
                             std::size_t max_vertices = 10);

// Partition JSON-lines: {"partition_id","members":[...]}.
void write_partitions(const Partitioning& p, const std::string& path);
Partitioning load_partitions(const std::string& path);

}  // namespace mapsynth

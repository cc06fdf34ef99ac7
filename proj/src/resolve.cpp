#include "mapsynth/resolve.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace mapsynth {

namespace {

using ValuePair = std::pair<std::string, std::string>;

// Distinct value pairs across the partition plus, per table, the indexes of
// its pairs, and the conflict adjacency between distinct pairs.
struct PairUniverse {
    std::vector<ValuePair> pairs;
    std::vector<std::vector<std::uint32_t>> of_table;
    std::vector<std::vector<std::uint32_t>> conflicts;   // adjacency lists
    std::vector<std::vector<std::uint32_t>> tables_of;   // owning table indexes
};

PairUniverse build_universe(const std::vector<CandidateTable>& partition, const MatchConfig& cfg,
                            const SynonymStore& synonyms) {
    PairUniverse u;
    std::unordered_map<std::string, std::uint32_t> seen;
    u.of_table.resize(partition.size());
    for (std::size_t t = 0; t < partition.size(); ++t) {
        for (const auto& p : partition[t].pairs) {
            std::string key = p.first + '\x1f' + p.second;
            auto it = seen.find(key);
            std::uint32_t idx;
            if (it == seen.end()) {
                idx = static_cast<std::uint32_t>(u.pairs.size());
                seen.emplace(std::move(key), idx);
                u.pairs.push_back(p);
                u.tables_of.emplace_back();
            } else {
                idx = it->second;
            }
            u.of_table[t].push_back(idx);
            u.tables_of[idx].push_back(static_cast<std::uint32_t>(t));
        }
    }

    // Conflicts require equivalent lefts, so group by distinct left value and
    // only compare right values across (or within) equivalent left groups.
    std::vector<std::string> lefts;
    std::unordered_map<std::string, std::uint32_t> left_slot;
    std::vector<std::vector<std::uint32_t>> by_left;
    for (std::uint32_t i = 0; i < u.pairs.size(); ++i) {
        auto [it, fresh] = left_slot.emplace(u.pairs[i].first,
                                             static_cast<std::uint32_t>(lefts.size()));
        if (fresh) {
            lefts.push_back(u.pairs[i].first);
            by_left.emplace_back();
        }
        by_left[it->second].push_back(i);
    }

    u.conflicts.resize(u.pairs.size());
    auto link_groups = [&](std::uint32_t ga, std::uint32_t gb) {
        for (std::uint32_t i : by_left[ga]) {
            for (std::uint32_t j : by_left[gb]) {
                if (ga == gb && j <= i) continue;
                if (!values_equivalent(u.pairs[i].second, u.pairs[j].second, cfg, synonyms)) {
                    u.conflicts[i].push_back(j);
                    u.conflicts[j].push_back(i);
                }
            }
        }
    };
    for (std::uint32_t ga = 0; ga < lefts.size(); ++ga) {
        link_groups(ga, ga);
        for (std::uint32_t gb = ga + 1; gb < lefts.size(); ++gb) {
            if (values_equivalent(lefts[ga], lefts[gb], cfg, synonyms)) link_groups(ga, gb);
        }
    }
    return u;
}

}  // namespace

std::vector<ValuePair> merged_pairs(const std::vector<CandidateTable>& tables) {
    std::vector<ValuePair> out;
    for (const auto& t : tables) out.insert(out.end(), t.pairs.begin(), t.pairs.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ResolvedPartition resolve_conflicts(const std::vector<CandidateTable>& partition,
                                    const MatchConfig& cfg, const SynonymStore& synonyms) {
    ResolvedPartition result;
    const std::size_t n = partition.size();
    if (n == 0) return result;

    PairUniverse u = build_universe(partition, cfg, synonyms);
    std::vector<std::uint32_t> present(u.pairs.size(), 0);  // kept tables containing the pair
    for (std::size_t t = 0; t < n; ++t)
        for (auto i : u.of_table[t]) present[i] += 1;

    // cnt_V: conflicting value pairs across kept tables, occurrence-weighted
    // so a pair contradicted by many tables outranks the lone table
    // contradicting it. Maintained incrementally as tables drop out.
    std::vector<std::uint32_t> cnt(u.pairs.size(), 0);
    for (std::uint32_t i = 0; i < u.pairs.size(); ++i)
        for (auto j : u.conflicts[i]) cnt[i] += present[j];

    std::vector<bool> kept(n, true);

    auto cross_conflict_exists = [&]() {
        for (std::uint32_t i = 0; i < u.pairs.size(); ++i) {
            if (present[i] == 0) continue;
            for (auto j : u.conflicts[i]) {
                if (j < i || present[j] == 0) continue;
                if (present[i] > 1 || present[j] > 1) return true;
                // both pairs live in exactly one table: conflict is cross-table
                // unless the owner is the same
                std::uint32_t oi = 0, oj = 0;
                for (auto t : u.tables_of[i])
                    if (kept[t]) oi = t;
                for (auto t : u.tables_of[j])
                    if (kept[t]) oj = t;
                if (oi != oj) return true;
            }
        }
        return false;
    };

    while (cross_conflict_exists()) {
        // table whose worst pair conflicts the most
        std::size_t victim = n;
        std::uint32_t victim_cnt = 0;
        for (std::size_t t = 0; t < n; ++t) {
            if (!kept[t]) continue;
            std::uint32_t worst = 0;
            for (auto i : u.of_table[t]) worst = std::max(worst, cnt[i]);
            bool better = victim == n || worst > victim_cnt;
            if (!better && worst == victim_cnt) {
                // ties: fewer pairs, then larger id
                const auto& cand = partition[t];
                const auto& cur = partition[victim];
                better = cand.pairs.size() < cur.pairs.size() ||
                         (cand.pairs.size() == cur.pairs.size() && cand.id > cur.id);
            }
            if (better) {
                victim = t;
                victim_cnt = worst;
            }
        }
        kept[victim] = false;
        result.removed.push_back(RemovedTable{
            partition[victim].id,
            "worst pair conflicts with " + std::to_string(victim_cnt) + " value pairs"});
        for (auto i : u.of_table[victim]) {
            present[i] -= 1;
            for (auto j : u.conflicts[i]) cnt[j] -= 1;
        }
    }

    for (std::size_t t = 0; t < n; ++t)
        if (kept[t]) result.kept.push_back(partition[t]);
    result.merged_pairs = merged_pairs(result.kept);
    return result;
}

ResolvedPartition exact_resolve(const std::vector<CandidateTable>& partition,
                                const MatchConfig& cfg, const SynonymStore& synonyms,
                                std::size_t max_tables) {
    const std::size_t n = partition.size();
    if (n > max_tables)
        throw std::invalid_argument("exact_resolve refuses partitions over " +
                                    std::to_string(max_tables) + " tables");
    ResolvedPartition result;
    if (n == 0) return result;

    PairUniverse u = build_universe(partition, cfg, synonyms);

    // conflict mask between tables
    std::vector<std::uint32_t> adj(n, 0);
    for (std::uint32_t i = 0; i < u.pairs.size(); ++i) {
        for (auto j : u.conflicts[i]) {
            for (auto ti : u.tables_of[i])
                for (auto tj : u.tables_of[j])
                    if (ti != tj) {
                        adj[ti] |= (1u << tj);
                        adj[tj] |= (1u << ti);
                    }
        }
    }

    // per-table bitset over the pair universe, for fast union sizes
    const std::size_t words = (u.pairs.size() + 63) / 64;
    std::vector<std::vector<std::uint64_t>> bits(n, std::vector<std::uint64_t>(words, 0));
    for (std::size_t t = 0; t < n; ++t)
        for (auto i : u.of_table[t]) bits[t][i / 64] |= (1ull << (i % 64));

    std::vector<std::uint64_t> acc(words);
    std::uint32_t best_mask = 0;
    std::size_t best_cover = 0;
    bool found = false;
    std::vector<std::string> best_ids;

    auto ids_of = [&](std::uint32_t mask) {
        std::vector<std::string> ids;
        for (std::size_t t = 0; t < n; ++t)
            if (mask & (1u << t)) ids.push_back(partition[t].id);
        std::sort(ids.begin(), ids.end());
        return ids;
    };

    const std::uint32_t limit = static_cast<std::uint32_t>(1u << n);
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        bool feasible = true;
        for (std::size_t t = 0; t < n && feasible; ++t)
            if ((mask & (1u << t)) && (adj[t] & mask)) feasible = false;
        if (!feasible) continue;
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t t = 0; t < n; ++t)
            if (mask & (1u << t))
                for (std::size_t w = 0; w < words; ++w) acc[w] |= bits[t][w];
        std::size_t cover = 0;
        for (std::size_t w = 0; w < words; ++w) cover += std::popcount(acc[w]);
        if (!found || cover > best_cover) {
            found = true;
            best_cover = cover;
            best_mask = mask;
            best_ids = ids_of(mask);
        } else if (cover == best_cover) {
            auto ids = ids_of(mask);
            if (ids < best_ids) {
                best_mask = mask;
                best_ids = std::move(ids);
            }
        }
    }

    for (std::size_t t = 0; t < n; ++t) {
        if (best_mask & (1u << t)) {
            result.kept.push_back(partition[t]);
        } else {
            result.removed.push_back(RemovedTable{partition[t].id, "excluded by exact maximizer"});
        }
    }
    result.merged_pairs = merged_pairs(result.kept);
    return result;
}

}  // namespace mapsynth

#include "mapsynth/compat.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

#include "mapsynth/parallel.hpp"

namespace mapsynth {

namespace {

std::string pair_key(const std::string& l, const std::string& r) {
    std::string k;
    k.reserve(l.size() + r.size() + 1);
    k.append(l);
    k.push_back('\x1f');
    k.append(r);
    return k;
}

std::vector<std::string> distinct_lefts(const CandidateTable& t) {
    std::vector<std::string> lefts;
    lefts.reserve(t.pairs.size());
    for (const auto& [l, r] : t.pairs) lefts.push_back(l);
    std::sort(lefts.begin(), lefts.end());
    lefts.erase(std::unique(lefts.begin(), lefts.end()), lefts.end());
    return lefts;
}

}  // namespace

std::size_t pair_intersection(const CandidateTable& a, const CandidateTable& b,
                              const MatchConfig& cfg, const SynonymStore& synonyms) {
    // Exact-equal pairs first; each pair set is deduplicated so exact matches
    // are one-to-one by construction.
    std::unordered_set<std::string> b_keys;
    b_keys.reserve(b.pairs.size());
    for (const auto& [l, r] : b.pairs) b_keys.insert(pair_key(l, r));

    std::size_t matched = 0;
    std::vector<const std::pair<std::string, std::string>*> a_rest;
    for (const auto& p : a.pairs) {
        if (b_keys.erase(pair_key(p.first, p.second)) > 0) {
            ++matched;
        } else {
            a_rest.push_back(&p);
        }
    }
    if (a_rest.empty() || b_keys.empty()) return matched;

    // Remaining pairs match greedily in sorted order. a.pairs and b.pairs are
    // sorted, so both leftover sequences are already in deterministic order.
    std::vector<const std::pair<std::string, std::string>*> b_rest;
    for (const auto& p : b.pairs) {
        if (b_keys.count(pair_key(p.first, p.second))) b_rest.push_back(&p);
    }
    std::vector<bool> used(b_rest.size(), false);
    for (const auto* pa : a_rest) {
        for (std::size_t k = 0; k < b_rest.size(); ++k) {
            if (used[k]) continue;
            const auto* pb = b_rest[k];
            if (values_equivalent(pa->first, pb->first, cfg, synonyms) &&
                values_equivalent(pa->second, pb->second, cfg, synonyms)) {
                used[k] = true;
                ++matched;
                break;
            }
        }
    }
    return matched;
}

double positive_weight(const CandidateTable& a, const CandidateTable& b, const MatchConfig& cfg,
                       const SynonymStore& synonyms) {
    if (a.pairs.empty() || b.pairs.empty()) return 0.0;
    const double inter = static_cast<double>(pair_intersection(a, b, cfg, synonyms));
    return std::max(inter / static_cast<double>(a.pairs.size()),
                    inter / static_cast<double>(b.pairs.size()));
}

namespace {

// Distinct lefts of one table with their rights grouped, for conflict scans.
struct LeftView {
    std::vector<std::string> lefts;
    std::vector<std::vector<const std::string*>> rights;

    explicit LeftView(const CandidateTable& t) {
        lefts = distinct_lefts(t);
        rights.resize(lefts.size());
        std::unordered_map<std::string_view, std::size_t> slot;
        slot.reserve(lefts.size());
        for (std::size_t i = 0; i < lefts.size(); ++i) slot[lefts[i]] = i;
        for (const auto& [l, r] : t.pairs) rights[slot[l]].push_back(&r);
    }
};

// One pass marks conflicting lefts on both sides: a left pair conflicts when
// the lefts are equivalent but some pair of their rights is not.
void conflict_marks(const CandidateTable& a, const CandidateTable& b, const MatchConfig& cfg,
                    const SynonymStore& synonyms, std::vector<bool>& mark_a,
                    std::vector<bool>& mark_b, const LeftView& va, const LeftView& vb) {
    mark_a.assign(va.lefts.size(), false);
    mark_b.assign(vb.lefts.size(), false);
    for (std::size_t i = 0; i < va.lefts.size(); ++i) {
        for (std::size_t j = 0; j < vb.lefts.size(); ++j) {
            if (mark_a[i] && mark_b[j]) continue;
            if (!values_equivalent(va.lefts[i], vb.lefts[j], cfg, synonyms)) continue;
            bool clash = false;
            for (const auto* ra : va.rights[i]) {
                for (const auto* rb : vb.rights[j]) {
                    if (!values_equivalent(*ra, *rb, cfg, synonyms)) {
                        clash = true;
                        break;
                    }
                }
                if (clash) break;
            }
            if (clash) {
                mark_a[i] = true;
                mark_b[j] = true;
            }
        }
    }
}

}  // namespace

std::vector<std::string> conflict_set(const CandidateTable& a, const CandidateTable& b,
                                      const MatchConfig& cfg, const SynonymStore& synonyms) {
    LeftView va(a), vb(b);
    std::vector<bool> mark_a, mark_b;
    conflict_marks(a, b, cfg, synonyms, mark_a, mark_b, va, vb);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < va.lefts.size(); ++i)
        if (mark_a[i]) out.push_back(va.lefts[i]);
    return out;
}

double negative_weight(const CandidateTable& a, const CandidateTable& b, const MatchConfig& cfg,
                       const SynonymStore& synonyms) {
    if (a.pairs.empty() || b.pairs.empty()) return 0.0;
    LeftView va(a), vb(b);
    std::vector<bool> mark_a, mark_b;
    conflict_marks(a, b, cfg, synonyms, mark_a, mark_b, va, vb);
    const double fa = static_cast<double>(std::count(mark_a.begin(), mark_a.end(), true));
    const double fb = static_cast<double>(std::count(mark_b.begin(), mark_b.end(), true));
    return -std::max(fa / static_cast<double>(a.pairs.size()),
                     fb / static_cast<double>(b.pairs.size()));
}

bool pairs_conflict(const std::pair<std::string, std::string>& p,
                    const std::pair<std::string, std::string>& q, const MatchConfig& cfg,
                    const SynonymStore& synonyms) {
    return values_equivalent(p.first, q.first, cfg, synonyms) &&
           !values_equivalent(p.second, q.second, cfg, synonyms);
}

namespace {

// Pairs of candidates sharing more than theta_overlap inverted-index keys.
// `keys_of` maps a candidate to its bucket keys.
template <typename KeysFn>
std::vector<std::uint64_t> overlapping_pairs(std::size_t n, const GraphConfig& cfg,
                                             KeysFn keys_of, std::size_t* skipped) {
    std::unordered_map<std::string, std::vector<std::uint32_t>> buckets;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& key : keys_of(i)) buckets[std::move(key)].push_back(static_cast<std::uint32_t>(i));
    }
    std::unordered_map<std::uint64_t, std::uint32_t> shared;
    for (auto& [key, members] : buckets) {
        if (members.size() > cfg.bucket_cap) {
            if (skipped) ++*skipped;
            continue;
        }
        for (std::size_t x = 0; x < members.size(); ++x)
            for (std::size_t y = x + 1; y < members.size(); ++y)
                shared[CompatibilityGraph::edge_key(members[x], members[y])] += 1;
    }
    std::vector<std::uint64_t> out;
    for (const auto& [key, count] : shared) {
        if (static_cast<int>(count) > cfg.theta_overlap) out.push_back(key);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

CompatibilityGraph build_graph(const std::vector<CandidateTable>& candidates,
                               const GraphConfig& cfg, const MatchConfig& mcfg,
                               const SynonymStore& synonyms, int workers, GraphReport* report) {
    CompatibilityGraph g;
    g.vertices.reserve(candidates.size());
    for (const auto& c : candidates) g.vertices.push_back(c.id);

    std::size_t skipped = 0;
    auto pos_keys = [&](std::size_t i) {
        std::vector<std::string> keys;
        keys.reserve(candidates[i].pairs.size());
        for (const auto& [l, r] : candidates[i].pairs) keys.push_back(pair_key(l, r));
        return keys;
    };
    auto neg_keys = [&](std::size_t i) { return distinct_lefts(candidates[i]); };

    const auto pos_pairs = overlapping_pairs(candidates.size(), cfg, pos_keys, &skipped);
    const auto neg_pairs = overlapping_pairs(candidates.size(), cfg, neg_keys, &skipped);
    if (report) {
        report->pos_pairs_evaluated = pos_pairs.size();
        report->neg_pairs_evaluated = neg_pairs.size();
        report->buckets_skipped = skipped;
    }

    auto pos_w = parallel_map<double>(pos_pairs.size(), workers, [&](std::size_t k) {
        const std::uint32_t i = static_cast<std::uint32_t>(pos_pairs[k] >> 32);
        const std::uint32_t j = static_cast<std::uint32_t>(pos_pairs[k] & 0xffffffffu);
        return positive_weight(candidates[i], candidates[j], mcfg, synonyms);
    });
    for (std::size_t k = 0; k < pos_pairs.size(); ++k) {
        if (pos_w[k] >= cfg.theta_edge) g.pos_edges[pos_pairs[k]] = pos_w[k];
    }

    auto neg_w = parallel_map<double>(neg_pairs.size(), workers, [&](std::size_t k) {
        const std::uint32_t i = static_cast<std::uint32_t>(neg_pairs[k] >> 32);
        const std::uint32_t j = static_cast<std::uint32_t>(neg_pairs[k] & 0xffffffffu);
        return negative_weight(candidates[i], candidates[j], mcfg, synonyms);
    });
    for (std::size_t k = 0; k < neg_pairs.size(); ++k) {
        // sub-threshold negatives are forced to 0, i.e. dropped
        if (neg_w[k] < cfg.tau) g.neg_edges[neg_pairs[k]] = neg_w[k];
    }
    return g;
}

void write_graph(const CompatibilityGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file: " + path);

    std::vector<std::uint64_t> keys;
    keys.reserve(g.pos_edges.size() + g.neg_edges.size());
    for (const auto& [k, w] : g.pos_edges) keys.push_back(k);
    for (const auto& [k, w] : g.neg_edges)
        if (!g.pos_edges.count(k)) keys.push_back(k);

    // canonical order: by endpoint ids, not internal indexes
    std::sort(keys.begin(), keys.end(), [&](std::uint64_t x, std::uint64_t y) {
        const auto& ax = g.vertices[x >> 32];
        const auto& bx = g.vertices[x & 0xffffffffu];
        const auto& ay = g.vertices[y >> 32];
        const auto& by = g.vertices[y & 0xffffffffu];
        return std::tie(ax, bx) < std::tie(ay, by);
    });
    for (std::uint64_t k : keys) {
        nlohmann::json j;
        j["a"] = g.vertices[k >> 32];
        j["b"] = g.vertices[k & 0xffffffffu];
        auto itp = g.pos_edges.find(k);
        auto itn = g.neg_edges.find(k);
        j["wpos"] = itp == g.pos_edges.end() ? 0.0 : itp->second;
        j["wneg"] = itn == g.neg_edges.end() ? 0.0 : itn->second;
        out << j.dump() << '\n';
    }
}

CompatibilityGraph load_graph(const std::string& path,
                              const std::vector<std::string>& known_vertices) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    CompatibilityGraph g;
    std::unordered_map<std::string, std::uint32_t> index;
    auto intern = [&](const std::string& id) {
        auto it = index.find(id);
        if (it != index.end()) return it->second;
        std::uint32_t v = g.add_vertex(id);
        index.emplace(id, v);
        return v;
    };
    for (const auto& id : known_vertices) intern(id);

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::uint32_t a = intern(j.at("a").get<std::string>());
        std::uint32_t b = intern(j.at("b").get<std::string>());
        double wpos = j.value("wpos", 0.0);
        double wneg = j.value("wneg", 0.0);
        if (wpos > 0.0) g.add_pos(a, b, wpos);
        if (wneg < 0.0) g.add_neg(a, b, wneg);
    }
    return g;
}

}  // namespace mapsynth

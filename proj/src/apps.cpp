#include "mapsynth/apps.hpp"

#include <algorithm>

#include "mapsynth/corpus.hpp"

namespace mapsynth {

namespace {

std::string pair_key(const std::string& l, const std::string& r) {
    return l + '\x1f' + r;
}

}  // namespace

MappingStore::MappingStore(std::vector<SynthesizedMapping> mappings)
    : mappings_(std::move(mappings)) {
    pair_sets_.resize(mappings_.size());
    left_index_.resize(mappings_.size());
    right_index_.resize(mappings_.size());
    for (std::size_t i = 0; i < mappings_.size(); ++i) {
        for (const auto& [l, r] : mappings_[i].pairs) {
            pair_sets_[i].insert(pair_key(l, r));
            left_index_[i][l].push_back(r);
            right_index_[i][r].push_back(l);
        }
        for (auto& [l, rs] : left_index_[i]) std::sort(rs.begin(), rs.end());
        for (auto& [r, ls] : right_index_[i]) std::sort(ls.begin(), ls.end());
    }
}

MappingStore MappingStore::load(const std::string& path) {
    return MappingStore(load_mappings(path));
}

bool MappingStore::has_pair(std::size_t i, const std::string& l, const std::string& r) const {
    return pair_sets_[i].count(pair_key(l, r)) > 0;
}

bool MappingStore::has_left(std::size_t i, const std::string& l) const {
    return left_index_[i].count(l) > 0;
}

bool MappingStore::has_right(std::size_t i, const std::string& r) const {
    return right_index_[i].count(r) > 0;
}

std::vector<std::string> MappingStore::rights_of(std::size_t i, const std::string& l) const {
    auto it = left_index_[i].find(l);
    return it == left_index_[i].end() ? std::vector<std::string>() : it->second;
}

std::vector<std::string> MappingStore::lefts_of(std::size_t i, const std::string& r) const {
    auto it = right_index_[i].find(r);
    return it == right_index_[i].end() ? std::vector<std::string>() : it->second;
}

FillResult auto_fill(const MappingStore& store,
                     const std::vector<std::pair<std::string, std::string>>& examples,
                     const std::vector<std::string>& keys) {
    FillResult result;
    if (examples.empty()) {
        result.diagnostic = "no example pairs given";
        return result;
    }
    std::vector<std::pair<std::string, std::string>> norm_examples;
    for (const auto& [k, v] : examples)
        norm_examples.emplace_back(normalize_cell(k), normalize_cell(v));

    std::size_t best = store.size();
    std::size_t best_hits = 0;
    for (std::size_t i = 0; i < store.size(); ++i) {
        std::size_t hits = 0;
        for (const auto& [k, v] : norm_examples)
            if (store.has_pair(i, k, v)) ++hits;
        if (hits == 0) continue;
        bool better = best == store.size() || hits > best_hits;
        if (!better && hits == best_hits) {
            const auto& cand = store.mapping(i);
            const auto& cur = store.mapping(best);
            better = cand.n_domains > cur.n_domains ||
                     (cand.n_domains == cur.n_domains && cand.mapping_id < cur.mapping_id);
        }
        if (better) {
            best = i;
            best_hits = hits;
        }
    }
    if (best == store.size()) {
        result.diagnostic = "no mapping matches any example pair";
        return result;
    }
    result.mapping_id = store.mapping(best).mapping_id;
    for (const auto& key : keys) {
        auto rights = store.rights_of(best, normalize_cell(key));
        if (rights.empty()) {
            result.values.emplace_back(std::nullopt);
        } else {
            result.values.emplace_back(rights.front());
        }
    }
    return result;
}

CorrectResult auto_correct(const MappingStore& store, const std::vector<std::string>& column) {
    CorrectResult result;
    if (column.empty()) {
        result.diagnostic = "empty column";
        return result;
    }
    std::vector<std::string> cells;
    for (const auto& c : column) cells.push_back(normalize_cell(c));

    std::size_t best = store.size();
    std::size_t best_cover = 0;
    for (std::size_t i = 0; i < store.size(); ++i) {
        std::size_t lefts = 0, rights = 0;
        for (const auto& c : cells) {
            bool l = store.has_left(i, c);
            bool r = store.has_right(i, c);
            if (l) ++lefts;
            else if (r) ++rights;
        }
        if (lefts == 0 || rights == 0) continue;  // both sides must be present
        std::size_t cover = lefts + rights;
        bool better = best == store.size() || cover > best_cover;
        if (!better && cover == best_cover) {
            const auto& cand = store.mapping(i);
            const auto& cur = store.mapping(best);
            better = cand.n_domains > cur.n_domains ||
                     (cand.n_domains == cur.n_domains && cand.mapping_id < cur.mapping_id);
        }
        if (better) {
            best = i;
            best_cover = cover;
        }
    }
    if (best == store.size()) {
        result.diagnostic = "no mapping covers the column with both sides present";
        return result;
    }
    result.mapping_id = store.mapping(best).mapping_id;

    std::size_t lefts = 0, rights = 0;
    for (const auto& c : cells) {
        if (store.has_left(best, c)) ++lefts;
        else if (store.has_right(best, c)) ++rights;
    }
    const bool left_majority = lefts >= rights;
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        const auto& c = cells[idx];
        if (left_majority) {
            if (!store.has_left(best, c) && store.has_right(best, c)) {
                auto ls = store.lefts_of(best, c);
                result.suggestions.push_back(Correction{idx, ls.front()});
            }
        } else {
            if (!store.has_right(best, c) && store.has_left(best, c)) {
                auto rs = store.rights_of(best, c);
                result.suggestions.push_back(Correction{idx, rs.front()});
            }
        }
    }
    return result;
}

JoinResult auto_join_bridge(const MappingStore& store, const std::vector<std::string>& left_keys,
                            const std::vector<std::string>& right_keys, double coverage_floor) {
    JoinResult result;
    if (left_keys.empty() || right_keys.empty()) {
        result.diagnostic = "both key lists must be non-empty";
        return result;
    }
    std::vector<std::string> lk, rk;
    for (const auto& k : left_keys) lk.push_back(normalize_cell(k));
    for (const auto& k : right_keys) rk.push_back(normalize_cell(k));
    auto distinct = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    const auto lk_distinct = distinct(lk);
    const auto rk_distinct = distinct(rk);

    std::size_t best = store.size();
    bool best_flipped = false;
    double best_score = -1.0;
    for (std::size_t i = 0; i < store.size(); ++i) {
        for (int orient = 0; orient < 2; ++orient) {
            const bool flipped = orient == 1;
            std::size_t lc = 0, rc = 0;
            for (const auto& k : lk_distinct)
                if (flipped ? store.has_right(i, k) : store.has_left(i, k)) ++lc;
            for (const auto& k : rk_distinct)
                if (flipped ? store.has_left(i, k) : store.has_right(i, k)) ++rc;
            const double score =
                std::min(static_cast<double>(lc) / static_cast<double>(lk_distinct.size()),
                         static_cast<double>(rc) / static_cast<double>(rk_distinct.size()));
            bool better = best == store.size() || score > best_score;
            if (!better && score == best_score) {
                const auto& cand = store.mapping(i);
                const auto& cur = store.mapping(best);
                better = cand.n_domains > cur.n_domains ||
                         (cand.n_domains == cur.n_domains &&
                          (cand.mapping_id < cur.mapping_id ||
                           (cand.mapping_id == cur.mapping_id && !flipped && best_flipped)));
            }
            if (better) {
                best = i;
                best_flipped = flipped;
                best_score = score;
            }
        }
    }
    if (best == store.size() || best_score < coverage_floor) {
        result.diagnostic = "no mapping covers both key lists above the coverage floor";
        return result;
    }
    result.mapping_id = store.mapping(best).mapping_id;
    result.flipped = best_flipped;

    std::unordered_set<std::string> right_set(rk_distinct.begin(), rk_distinct.end());
    std::unordered_set<std::string> emitted;
    for (const auto& k : lk) {
        auto bridged = best_flipped ? store.lefts_of(best, k) : store.rights_of(best, k);
        for (const auto& other : bridged) {
            if (right_set.count(other) && emitted.insert(pair_key(k, other)).second)
                result.pairs.emplace_back(k, other);
        }
    }
    return result;
}

}  // namespace mapsynth

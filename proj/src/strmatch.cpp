#include "mapsynth/strmatch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mapsynth/corpus.hpp"

namespace mapsynth {

int edit_threshold(std::string_view v1, std::string_view v2, const MatchConfig& cfg) {
    auto len1 = static_cast<double>(nonspace_length(v1));
    auto len2 = static_cast<double>(nonspace_length(v2));
    int t1 = static_cast<int>(std::floor(len1 * cfg.f_ed));
    int t2 = static_cast<int>(std::floor(len2 * cfg.f_ed));
    return std::min({t1, t2, cfg.k_ed});
}

bool within_edit_distance(std::string_view a, std::string_view b, int bound) {
    if (bound < 0) return false;
    if (a.size() > b.size()) std::swap(a, b);
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (m - n > bound) return false;
    if (n == 0) return m <= bound;

    // Band of half-width `bound` around the diagonal; cells outside carry
    // INF = bound+1 so the threshold test is unaffected.
    const int INF = bound + 1;
    thread_local std::vector<int> prev_row, cur_row;
    prev_row.assign(static_cast<std::size_t>(m) + 1, INF);
    cur_row.assign(static_cast<std::size_t>(m) + 1, INF);
    for (int j = 0; j <= std::min(m, bound); ++j) prev_row[static_cast<std::size_t>(j)] = j;

    for (int i = 1; i <= n; ++i) {
        const int lo = std::max(1, i - bound);
        const int hi = std::min(m, i + bound);
        cur_row[static_cast<std::size_t>(lo - 1)] = (lo == 1 && i <= bound) ? i : INF;
        int row_min = INF;
        for (int j = lo; j <= hi; ++j) {
            int cost = prev_row[static_cast<std::size_t>(j - 1)] +
                       (a[static_cast<std::size_t>(i - 1)] == b[static_cast<std::size_t>(j - 1)] ? 0 : 1);
            cost = std::min(cost, prev_row[static_cast<std::size_t>(j)] + 1);
            cost = std::min(cost, cur_row[static_cast<std::size_t>(j - 1)] + 1);
            cost = std::min(cost, INF);
            cur_row[static_cast<std::size_t>(j)] = cost;
            row_min = std::min(row_min, cost);
        }
        if (row_min >= INF) return false;  // band exhausted, distance must exceed bound
        if (hi < m) cur_row[static_cast<std::size_t>(hi + 1)] = INF;
        std::swap(prev_row, cur_row);
    }
    return prev_row[static_cast<std::size_t>(m)] <= bound;
}

namespace {

void strip_spaces_into(std::string_view v, std::string& out) {
    out.clear();
    for (char c : v)
        if (c != ' ') out.push_back(c);
}

}  // namespace

bool approx_match(std::string_view v1, std::string_view v2, const MatchConfig& cfg) {
    if (v1 == v2) return true;
    const auto len1 = nonspace_length(v1);
    const auto len2 = nonspace_length(v2);
    const int t1 = static_cast<int>(std::floor(static_cast<double>(len1) * cfg.f_ed));
    const int t2 = static_cast<int>(std::floor(static_cast<double>(len2) * cfg.f_ed));
    const int bound = std::min({t1, t2, cfg.k_ed});
    const auto diff = len1 > len2 ? len1 - len2 : len2 - len1;
    if (diff > static_cast<std::size_t>(bound)) return false;  // cheap reject before copying
    thread_local std::string s1, s2;
    strip_spaces_into(v1, s1);
    strip_spaces_into(v2, s2);
    if (bound == 0) return s1 == s2;
    return within_edit_distance(s1, s2, bound);
}

void SynonymStore::add_group(const std::vector<std::string>& values) {
    int gid = -1;
    std::vector<std::string> pending;
    for (const auto& raw : values) {
        std::string v = normalize_cell(raw);
        if (v.empty()) continue;
        auto it = group_of_.find(v);
        if (it != group_of_.end()) {
            int root = find(it->second);
            if (gid == -1) {
                gid = root;
            } else if (root != gid) {
                // merge two previously separate groups
                parent_[static_cast<std::size_t>(root)] = gid;
                --groups_;
            }
        } else {
            pending.push_back(std::move(v));
        }
    }
    if (pending.empty()) return;
    if (gid == -1) {
        gid = static_cast<int>(parent_.size());
        parent_.push_back(gid);
        ++groups_;
    }
    for (auto& v : pending) group_of_.emplace(std::move(v), gid);
}

SynonymStore SynonymStore::load_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open synonym file: " + path);
    SynonymStore store;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> group;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                group.push_back(line.substr(start));
                break;
            }
            group.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (group.size() >= 2) store.add_group(group);
    }
    return store;
}

int SynonymStore::find(int g) const {
    // No path compression: lookups must stay read-only so a frozen store is
    // safe to query from many threads.
    while (parent_[static_cast<std::size_t>(g)] != g) g = parent_[static_cast<std::size_t>(g)];
    return g;
}

bool SynonymStore::are_synonyms(std::string_view v1, std::string_view v2) const {
    if (v1 == v2) return true;
    if (group_of_.empty()) return false;
    auto it1 = group_of_.find(std::string(v1));
    if (it1 == group_of_.end()) return false;
    auto it2 = group_of_.find(std::string(v2));
    if (it2 == group_of_.end()) return false;
    return find(it1->second) == find(it2->second);
}

bool values_equivalent(std::string_view v1, std::string_view v2, const MatchConfig& cfg,
                       const SynonymStore& synonyms) {
    if (v1 == v2) return true;
    return synonyms.are_synonyms(v1, v2) || approx_match(v1, v2, cfg);
}

}  // namespace mapsynth

#include "mapsynth/extract.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include "json.hpp"

#include "mapsynth/parallel.hpp"

namespace mapsynth {

namespace {

std::size_t sorted_intersection_size(const std::vector<std::uint32_t>& a,
                                     const std::vector<std::uint32_t>& b) {
    std::size_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++n;
            ++ia;
            ++ib;
        }
    }
    return n;
}

}  // namespace

CooccurrenceIndex build_index(const std::vector<TableRecord>& corpus, int workers) {
    // Column ids are assigned in stream order before any parallel work so the
    // result is independent of the worker count.
    std::vector<std::uint32_t> first_col(corpus.size(), 0);
    std::uint64_t n_columns = 0;
    for (std::size_t t = 0; t < corpus.size(); ++t) {
        first_col[t] = static_cast<std::uint32_t>(n_columns);
        n_columns += corpus[t].column_count();
    }

    const int w = effective_workers(workers);
    std::vector<CooccurrenceIndex> partial(static_cast<std::size_t>(w));
    const std::size_t chunk = corpus.size() / static_cast<std::size_t>(w) + 1;
    parallel_for(static_cast<std::size_t>(w), w, [&](std::size_t wi) {
        auto& local = partial[wi];
        const std::size_t begin = wi * chunk;
        const std::size_t end = std::min(corpus.size(), begin + chunk);
        std::vector<std::string> seen;
        for (std::size_t t = begin; t < end; ++t) {
            const TableRecord& table = corpus[t];
            for (std::size_t c = 0; c < table.column_count(); ++c) {
                const std::uint32_t col_id = first_col[t] + static_cast<std::uint32_t>(c);
                seen.clear();
                for (const auto& row : table.rows) {
                    std::string v = normalize_cell(row[c]);
                    if (v.empty()) continue;
                    seen.push_back(std::move(v));
                }
                std::sort(seen.begin(), seen.end());
                seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
                for (auto& v : seen) local.postings[v].push_back(col_id);
            }
        }
    });

    CooccurrenceIndex idx;
    idx.total_columns = n_columns;
    for (auto& local : partial) {
        for (auto& [value, cols] : local.postings) {
            auto& dst = idx.postings[value];
            dst.insert(dst.end(), cols.begin(), cols.end());
        }
    }
    // Chunks are disjoint id ranges appended in worker order, which is not
    // globally sorted; sort once so intersections can merge-scan.
    for (auto& [value, cols] : idx.postings) std::sort(cols.begin(), cols.end());
    return idx;
}

double pmi(const std::string& u, const std::string& v, const CooccurrenceIndex& idx) {
    if (idx.total_columns == 0) return 0.0;
    auto iu = idx.postings.find(u);
    auto iv = idx.postings.find(v);
    if (iu == idx.postings.end() || iv == idx.postings.end()) return 0.0;
    const double n = static_cast<double>(idx.total_columns);
    const double pu = static_cast<double>(iu->second.size()) / n;
    const double pv = static_cast<double>(iv->second.size()) / n;
    const double puv =
        static_cast<double>(u == v ? iu->second.size()
                                   : sorted_intersection_size(iu->second, iv->second)) /
        n;
    if (puv == 0.0) return 0.0;
    return std::log10(puv / (pu * pv));
}

double npmi(const std::string& u, const std::string& v, const CooccurrenceIndex& idx) {
    if (idx.total_columns == 0) return -1.0;
    auto iu = idx.postings.find(u);
    auto iv = idx.postings.find(v);
    if (iu == idx.postings.end() || iv == idx.postings.end()) return -1.0;
    const double n = static_cast<double>(idx.total_columns);
    const std::size_t overlap =
        u == v ? iu->second.size() : sorted_intersection_size(iu->second, iv->second);
    if (overlap == 0) return -1.0;
    // identical posting sets: p(u,v) = p(u) = p(v), NPMI is exactly 1
    if (overlap == iu->second.size() && overlap == iv->second.size()) return 1.0;
    const double puv = static_cast<double>(overlap) / n;
    const double pu = static_cast<double>(iu->second.size()) / n;
    const double pv = static_cast<double>(iv->second.size()) / n;
    const double score = std::log10(puv / (pu * pv)) / -std::log10(puv);
    return std::clamp(score, -1.0, 1.0);
}

double column_coherence(const std::vector<std::string>& column, const CooccurrenceIndex& idx,
                        std::size_t value_cap) {
    std::vector<std::string> distinct;
    distinct.reserve(column.size());
    for (const auto& raw : column) {
        std::string v = normalize_cell(raw);
        if (!v.empty()) distinct.push_back(std::move(v));
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) return 1.0;  // constant columns are vacuously coherent

    if (distinct.size() > value_cap) {
        // Keep the most frequent values; ties resolve lexicographically so the
        // cap is deterministic.
        std::stable_sort(distinct.begin(), distinct.end(),
                         [&](const std::string& a, const std::string& b) {
                             auto fa = idx.occurrences(a);
                             auto fb = idx.occurrences(b);
                             if (fa != fb) return fa > fb;
                             return a < b;
                         });
        distinct.resize(value_cap);
    }

    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
        for (std::size_t j = i + 1; j < distinct.size(); ++j) {
            sum += npmi(distinct[i], distinct[j], idx);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

bool approximate_fd_holds(const std::vector<std::pair<std::string, std::string>>& pairs,
                          double theta) {
    if (pairs.empty()) return false;
    std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> counts;
    for (const auto& [l, r] : pairs) counts[l][r] += 1;
    std::size_t functional = 0;
    for (const auto& [l, rights] : counts) {
        std::size_t best = 0;
        for (const auto& [r, c] : rights) best = std::max(best, c);
        functional += best;
    }
    return static_cast<double>(functional) >=
           theta * static_cast<double>(pairs.size()) - 1e-12;
}

namespace {

std::vector<CandidateTable> extract_from_table(const TableRecord& table, const ExtractConfig& cfg,
                                               const CooccurrenceIndex& idx,
                                               ExtractReport* report) {
    std::vector<CandidateTable> out;
    const std::size_t ncols = table.column_count();
    if (report) {
        report->tables_seen += 1;
        report->columns_seen += ncols;
    }
    if (ncols < 2 || table.rows.empty()) return out;

    // Normalize once per table; the same cells feed coherence, FD and pairs.
    std::vector<std::vector<std::string>> cols(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
        cols[c].reserve(table.rows.size());
        for (const auto& row : table.rows) cols[c].push_back(normalize_cell(row[c]));
    }

    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < ncols; ++c) {
        if (column_coherence(cols[c], idx, cfg.coherence_value_cap) >= cfg.coherence_threshold)
            kept.push_back(c);
    }
    if (report) report->columns_kept += kept.size();
    if (kept.size() < 2) return out;

    std::vector<std::pair<std::string, std::string>> row_pairs;
    for (std::size_t li = 0; li < kept.size(); ++li) {
        for (std::size_t ri = 0; ri < kept.size(); ++ri) {
            if (li == ri) continue;
            const std::size_t lc = kept[li];
            const std::size_t rc = kept[ri];
            if (report) report->pairs_considered += 1;
            row_pairs.clear();
            for (std::size_t row = 0; row < table.rows.size(); ++row) {
                const std::string& l = cols[lc][row];
                const std::string& r = cols[rc][row];
                if (l.empty() || r.empty()) continue;
                row_pairs.emplace_back(l, r);
            }
            if (row_pairs.size() < cfg.min_rows) continue;
            if (!approximate_fd_holds(row_pairs, cfg.theta_fd)) continue;

            CandidateTable cand;
            cand.source_table = table.id;
            cand.left_col = static_cast<std::uint32_t>(lc);
            cand.right_col = static_cast<std::uint32_t>(rc);
            cand.domain = table.domain;
            cand.id = table.id + "#" + std::to_string(lc) + "_" + std::to_string(rc);
            cand.pairs = row_pairs;
            std::sort(cand.pairs.begin(), cand.pairs.end());
            cand.pairs.erase(std::unique(cand.pairs.begin(), cand.pairs.end()),
                             cand.pairs.end());
            out.push_back(std::move(cand));
        }
    }
    if (report) report->candidates_emitted += out.size();
    return out;
}

}  // namespace

std::vector<CandidateTable> extract_candidates(const std::vector<TableRecord>& corpus,
                                               const ExtractConfig& cfg,
                                               const CooccurrenceIndex& idx, int workers,
                                               ExtractReport* report) {
    std::vector<ExtractReport> reports(corpus.size());
    auto per_table = parallel_map<std::vector<CandidateTable>>(
        corpus.size(), workers, [&](std::size_t t) {
            return extract_from_table(corpus[t], cfg, idx, report ? &reports[t] : nullptr);
        });
    std::vector<CandidateTable> out;
    for (auto& batch : per_table)
        for (auto& cand : batch) out.push_back(std::move(cand));
    if (report) {
        for (const auto& r : reports) {
            report->tables_seen += r.tables_seen;
            report->columns_seen += r.columns_seen;
            report->columns_kept += r.columns_kept;
            report->pairs_considered += r.pairs_considered;
            report->candidates_emitted += r.candidates_emitted;
        }
    }
    return out;
}

std::string candidate_to_jsonl(const CandidateTable& c) {
    nlohmann::json j;
    j["id"] = c.id;
    j["source_table"] = c.source_table;
    j["left_col"] = c.left_col;
    j["right_col"] = c.right_col;
    j["domain"] = c.domain;
    auto pairs = nlohmann::json::array();
    for (const auto& [l, r] : c.pairs) pairs.push_back({l, r});
    j["pairs"] = std::move(pairs);
    return j.dump();
}

void write_candidates(const std::vector<CandidateTable>& candidates, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write candidates file: " + path);
    for (const auto& c : candidates) out << candidate_to_jsonl(c) << '\n';
}

std::vector<CandidateTable> load_candidates(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open candidates file: " + path);
    std::vector<CandidateTable> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        CandidateTable c;
        c.id = j.at("id").get<std::string>();
        c.source_table = j.value("source_table", std::string());
        c.left_col = j.value("left_col", 0u);
        c.right_col = j.value("right_col", 0u);
        c.domain = j.value("domain", std::string());
        for (const auto& p : j.at("pairs"))
            c.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        std::sort(c.pairs.begin(), c.pairs.end());
        c.pairs.erase(std::unique(c.pairs.begin(), c.pairs.end()), c.pairs.end());
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace mapsynth

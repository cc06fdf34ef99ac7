#include "mapsynth/curate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace mapsynth {

namespace {

bool all_numeric(const std::string& v) {
    if (v.empty()) return false;
    for (char c : v) {
        unsigned char u = static_cast<unsigned char>(c);
        if (!std::isdigit(u) && c != ' ') return false;
    }
    return true;
}

std::string escape_tsv(const std::string& v) {
    std::string out;
    out.reserve(v.size());
    for (char c : v) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::optional<SynthesizedMapping> compute_stats(const ResolvedPartition& resolved,
                                                const std::string& mapping_id) {
    if (resolved.kept.empty() || resolved.merged_pairs.empty()) return std::nullopt;
    SynthesizedMapping m;
    m.mapping_id = mapping_id;
    m.pairs = resolved.merged_pairs;
    m.n_tables = static_cast<std::uint32_t>(resolved.kept.size());
    std::vector<std::string> domains;
    for (const auto& t : resolved.kept) {
        m.sources.emplace_back(t.id, t.domain);
        domains.push_back(t.domain);
    }
    std::sort(domains.begin(), domains.end());
    domains.erase(std::unique(domains.begin(), domains.end()), domains.end());
    m.n_domains = static_cast<std::uint32_t>(domains.size());
    std::sort(m.sources.begin(), m.sources.end());

    m.numeric_right = true;
    for (const auto& [l, r] : m.pairs) {
        if (!all_numeric(r)) {
            m.numeric_right = false;
            break;
        }
    }
    return m;
}

std::vector<SynthesizedMapping> rank_and_filter(std::vector<SynthesizedMapping> mappings,
                                                std::uint32_t min_domains) {
    std::erase_if(mappings, [&](const SynthesizedMapping& m) { return m.n_domains < min_domains; });
    std::sort(mappings.begin(), mappings.end(),
              [](const SynthesizedMapping& a, const SynthesizedMapping& b) {
                  if (a.n_domains != b.n_domains) return a.n_domains > b.n_domains;
                  if (a.n_tables != b.n_tables) return a.n_tables > b.n_tables;
                  if (a.pairs.size() != b.pairs.size()) return a.pairs.size() > b.pairs.size();
                  return a.mapping_id < b.mapping_id;
              });
    return mappings;
}

EvalScore evaluate(const std::vector<std::pair<std::string, std::string>>& b,
                   const std::vector<std::pair<std::string, std::string>>& b_star) {
    EvalScore s;
    if (b.empty() && b_star.empty()) {
        s.precision = s.recall = s.fscore = 1.0;
        return s;
    }
    if (b.empty() || b_star.empty()) return s;  // zeros

    std::unordered_set<std::string> truth;
    truth.reserve(b_star.size());
    for (const auto& [l, r] : b_star) truth.insert(l + '\x1f' + r);
    std::size_t hits = 0;
    std::unordered_set<std::string> seen;
    seen.reserve(b.size());
    for (const auto& [l, r] : b) {
        std::string key = l + '\x1f' + r;
        if (seen.insert(key).second && truth.count(key)) ++hits;
    }
    const std::size_t b_distinct = seen.size();
    s.precision = static_cast<double>(hits) / static_cast<double>(b_distinct);
    s.recall = static_cast<double>(hits) / static_cast<double>(truth.size());
    if (s.precision + s.recall > 0.0)
        s.fscore = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

std::string mapping_to_jsonl(const SynthesizedMapping& m) {
    nlohmann::json j;
    j["mapping_id"] = m.mapping_id;
    auto pairs = nlohmann::json::array();
    for (const auto& [l, r] : m.pairs) pairs.push_back({l, r});
    j["pairs"] = std::move(pairs);
    j["n_tables"] = m.n_tables;
    j["n_domains"] = m.n_domains;
    auto sources = nlohmann::json::array();
    for (const auto& [t, d] : m.sources) sources.push_back({t, d});
    j["sources"] = std::move(sources);
    j["numeric_right"] = m.numeric_right;
    return j.dump();
}

void export_mappings(const std::vector<SynthesizedMapping>& mappings, const std::string& path,
                     MappingFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mappings file: " + path);
    if (format == MappingFormat::jsonl) {
        for (const auto& m : mappings) out << mapping_to_jsonl(m) << '\n';
        return;
    }
    out << "left\tright\tmapping_id\n";
    for (const auto& m : mappings) {
        for (const auto& [l, r] : m.pairs)
            out << escape_tsv(l) << '\t' << escape_tsv(r) << '\t' << escape_tsv(m.mapping_id)
                << '\n';
    }
}

std::vector<SynthesizedMapping> load_mappings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mappings file: " + path);
    std::vector<SynthesizedMapping> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        SynthesizedMapping m;
        m.mapping_id = j.at("mapping_id").get<std::string>();
        for (const auto& p : j.at("pairs"))
            m.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        std::sort(m.pairs.begin(), m.pairs.end());
        m.pairs.erase(std::unique(m.pairs.begin(), m.pairs.end()), m.pairs.end());
        m.n_tables = j.value("n_tables", 0u);
        m.n_domains = j.value("n_domains", 0u);
        if (j.contains("sources"))
            for (const auto& s : j["sources"])
                m.sources.emplace_back(s.at(0).get<std::string>(), s.at(1).get<std::string>());
        m.numeric_right = j.value("numeric_right", false);
        out.push_back(std::move(m));
    }
    return out;
}

EvalReport evaluate_against_truth(const std::vector<SynthesizedMapping>& mappings,
                                  const std::vector<SynthesizedMapping>& truth) {
    EvalReport report;
    for (const auto& t : truth) {
        CaseReport c;
        c.truth_id = t.mapping_id;
        bool found = false;
        for (const auto& m : mappings) {
            EvalScore s = evaluate(m.pairs, t.pairs);
            bool better = !found || s.fscore > c.score.fscore ||
                          (s.fscore == c.score.fscore && m.mapping_id < c.best_mapping);
            if (better) {
                found = true;
                c.score = s;
                c.best_mapping = m.mapping_id;
                c.numeric_right = m.numeric_right;
            }
        }
        report.cases.push_back(std::move(c));
    }
    if (!report.cases.empty()) {
        for (const auto& c : report.cases) {
            report.macro_precision += c.score.precision;
            report.macro_recall += c.score.recall;
            report.macro_fscore += c.score.fscore;
        }
        const double n = static_cast<double>(report.cases.size());
        report.macro_precision /= n;
        report.macro_recall /= n;
        report.macro_fscore /= n;
    }
    return report;
}

void write_eval_report(const EvalReport& report, const std::string& path) {
    nlohmann::json j;
    auto cases = nlohmann::json::array();
    for (const auto& c : report.cases) {
        nlohmann::json cj;
        cj["case"] = c.truth_id;
        cj["best_mapping"] = c.best_mapping;
        cj["precision"] = c.score.precision;
        cj["recall"] = c.score.recall;
        cj["fscore"] = c.score.fscore;
        cj["numeric_right"] = c.numeric_right;
        cases.push_back(std::move(cj));
    }
    j["cases"] = std::move(cases);
    j["macro_precision"] = report.macro_precision;
    j["macro_recall"] = report.macro_recall;
    j["macro_fscore"] = report.macro_fscore;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report file: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace mapsynth

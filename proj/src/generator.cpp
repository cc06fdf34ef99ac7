#include "mapsynth/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace mapsynth {

namespace {

// All draws go through these helpers so output depends only on the standard
// mt19937_64 stream, not on library distribution internals.
std::uint64_t draw_index(std::mt19937_64& rng, std::uint64_t n) {
    return n == 0 ? 0 : rng() % n;
}

double draw_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

void check_rate(double r, const char* name) {
    if (r < 0.0 || r > 1.0)
        throw std::invalid_argument(std::string("rate out of [0,1]: ") + name);
}

}  // namespace

void validate_spec(const SyntheticSpec& spec) {
    if (spec.mappings.empty()) throw std::invalid_argument("spec has no mappings");
    for (const auto& m : spec.mappings) {
        if (m.name.empty()) throw std::invalid_argument("mapping without a name");
        if (m.pairs.empty()) throw std::invalid_argument("mapping without pairs: " + m.name);
        if (m.weight <= 0.0) throw std::invalid_argument("non-positive weight: " + m.name);
    }
    if (spec.rows_min == 0 || spec.rows_min > spec.rows_max)
        throw std::invalid_argument("invalid rows_min/rows_max");
    if (spec.domains == 0) throw std::invalid_argument("domains must be positive");
    check_rate(spec.synonym_rate, "synonym_rate");
    check_rate(spec.full_prefix_prob, "full_prefix_prob");
    check_rate(spec.noise.cell_typo, "noise.cell_typo");
    check_rate(spec.noise.wrong_value, "noise.wrong_value");
    check_rate(spec.noise.mixed_column, "noise.mixed_column");
}

SyntheticSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    nlohmann::json j;
    in >> j;
    SyntheticSpec spec;
    spec.tables = j.value("tables", spec.tables);
    spec.rows_min = j.value("rows_min", spec.rows_min);
    spec.rows_max = j.value("rows_max", spec.rows_max);
    spec.domains = j.value("domains", spec.domains);
    spec.synonym_rate = j.value("synonym_rate", spec.synonym_rate);
    spec.full_prefix_prob = j.value("full_prefix_prob", spec.full_prefix_prob);
    if (j.contains("noise")) {
        const auto& nj = j["noise"];
        spec.noise.cell_typo = nj.value("cell_typo", 0.0);
        spec.noise.wrong_value = nj.value("wrong_value", 0.0);
        spec.noise.mixed_column = nj.value("mixed_column", 0.0);
    }
    for (const auto& mj : j.at("mappings")) {
        SyntheticMappingSpec m;
        m.name = mj.at("name").get<std::string>();
        m.weight = mj.value("weight", 1.0);
        for (const auto& p : mj.at("pairs"))
            m.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        if (mj.contains("synonyms"))
            for (const auto& g : mj["synonyms"]) {
                std::vector<std::string> group;
                for (const auto& v : g) group.push_back(v.get<std::string>());
                m.synonyms.push_back(std::move(group));
            }
        spec.mappings.push_back(std::move(m));
    }
    validate_spec(spec);
    return spec;
}

void write_spec(const SyntheticSpec& spec, const std::string& path) {
    nlohmann::json j;
    j["tables"] = spec.tables;
    j["rows_min"] = spec.rows_min;
    j["rows_max"] = spec.rows_max;
    j["domains"] = spec.domains;
    j["synonym_rate"] = spec.synonym_rate;
    j["full_prefix_prob"] = spec.full_prefix_prob;
    j["noise"] = {{"cell_typo", spec.noise.cell_typo},
                  {"wrong_value", spec.noise.wrong_value},
                  {"mixed_column", spec.noise.mixed_column}};
    auto mappings = nlohmann::json::array();
    for (const auto& m : spec.mappings) {
        nlohmann::json mj;
        mj["name"] = m.name;
        mj["weight"] = m.weight;
        auto pairs = nlohmann::json::array();
        for (const auto& [l, r] : m.pairs) pairs.push_back({l, r});
        mj["pairs"] = std::move(pairs);
        auto groups = nlohmann::json::array();
        for (const auto& g : m.synonyms) groups.push_back(g);
        mj["synonyms"] = std::move(groups);
        mappings.push_back(std::move(mj));
    }
    j["mappings"] = std::move(mappings);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write spec file: " + path);
    out << j.dump(2) << '\n';
}

GeneratedCorpus generate_corpus(const SyntheticSpec& spec, std::uint64_t seed,
                                const std::string& out_dir) {
    validate_spec(spec);
    std::filesystem::create_directories(out_dir);
    std::mt19937_64 rng(seed);

    // variant lookup: canonical left -> its synonym group
    std::vector<std::unordered_map<std::string, const std::vector<std::string>*>> variant_of(
        spec.mappings.size());
    for (std::size_t mi = 0; mi < spec.mappings.size(); ++mi) {
        for (const auto& group : spec.mappings[mi].synonyms)
            for (const auto& v : group) variant_of[mi][v] = &group;
    }

    double total_weight = 0.0;
    for (const auto& m : spec.mappings) total_weight += m.weight;

    std::vector<TableRecord> tables;
    std::vector<std::set<std::pair<std::string, std::string>>> truth_pairs(spec.mappings.size());
    std::size_t noisy_tables = 0;

    for (std::size_t t = 0; t < spec.tables; ++t) {
        // weighted mapping choice
        double pick = draw_real(rng) * total_weight;
        std::size_t mi = 0;
        for (; mi + 1 < spec.mappings.size(); ++mi) {
            pick -= spec.mappings[mi].weight;
            if (pick < 0.0) break;
        }
        const auto& mspec = spec.mappings[mi];
        const std::size_t m_rows = mspec.pairs.size();

        const std::size_t want =
            spec.rows_min + draw_index(rng, spec.rows_max - spec.rows_min + 1);
        const std::size_t len = std::min(want, m_rows);
        std::size_t start = 0;
        if (draw_real(rng) >= spec.full_prefix_prob && m_rows > len)
            start = draw_index(rng, m_rows - len + 1);

        TableRecord rec;
        char idbuf[24];
        std::snprintf(idbuf, sizeof(idbuf), "t%06zu", t);
        rec.id = idbuf;
        rec.domain = "d" + std::to_string(draw_index(rng, spec.domains));
        rec.headers = {"left", "right"};

        const bool mixed = draw_real(rng) < spec.noise.mixed_column && spec.mappings.size() > 1;
        if (mixed) rec.headers.push_back("misc");

        bool noisy = mixed;
        for (std::size_t row = start; row < start + len; ++row) {
            std::string left = mspec.pairs[row].first;
            std::string right = mspec.pairs[row].second;

            auto vit = variant_of[mi].find(left);
            if (vit != variant_of[mi].end() && draw_real(rng) < spec.synonym_rate) {
                const auto& group = *vit->second;
                left = group[draw_index(rng, group.size())];
            }

            bool clean = true;
            if (!right.empty() && draw_real(rng) < spec.noise.cell_typo) {
                // one random substitution in the right value
                std::size_t pos = draw_index(rng, right.size());
                char orig = right[pos];
                char sub = static_cast<char>('a' + draw_index(rng, 26));
                if (sub == orig) sub = sub == 'z' ? 'a' : static_cast<char>(sub + 1);
                right[pos] = sub;
                clean = false;
            } else if (draw_real(rng) < spec.noise.wrong_value && m_rows > 1) {
                std::size_t other = draw_index(rng, m_rows);
                if (other == row) other = (other + 1) % m_rows;
                right = mspec.pairs[other].second;
                clean = false;
            }
            if (clean) {
                truth_pairs[mi].emplace(normalize_cell(left), normalize_cell(right));
            } else {
                noisy = true;
            }

            std::vector<std::string> cells{left, right};
            if (mixed) {
                std::size_t omi = draw_index(rng, spec.mappings.size());
                if (omi == mi) omi = (omi + 1) % spec.mappings.size();
                const auto& opairs = spec.mappings[omi].pairs;
                cells.push_back(opairs[draw_index(rng, opairs.size())].first);
            }
            rec.rows.push_back(std::move(cells));
        }
        if (noisy) ++noisy_tables;
        tables.push_back(std::move(rec));
    }

    GeneratedCorpus out;
    out.tables = tables.size();
    out.noisy_tables = noisy_tables;
    out.corpus_path = out_dir + "/corpus.jsonl";
    out.truth_path = out_dir + "/truth.jsonl";
    out.synonyms_path = out_dir + "/synonyms.tsv";

    write_corpus(tables, out.corpus_path);

    for (std::size_t mi = 0; mi < spec.mappings.size(); ++mi) {
        SynthesizedMapping m;
        m.mapping_id = spec.mappings[mi].name;
        m.pairs.assign(truth_pairs[mi].begin(), truth_pairs[mi].end());
        if (m.pairs.empty()) continue;
        out.truth.push_back(std::move(m));
    }
    export_mappings(out.truth, out.truth_path, MappingFormat::jsonl);

    std::ofstream syn(out.synonyms_path);
    if (!syn) throw std::runtime_error("cannot write synonyms file: " + out.synonyms_path);
    for (const auto& m : spec.mappings) {
        for (const auto& group : m.synonyms) {
            for (std::size_t i = 0; i < group.size(); ++i) {
                if (i) syn << '\t';
                syn << group[i];
            }
            syn << '\n';
        }
    }
    return out;
}

}  // namespace mapsynth

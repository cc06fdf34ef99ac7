#include "mapsynth/corpus.hpp"

#include <cctype>
#include <stdexcept>

#include "json.hpp"

namespace mapsynth {

namespace {

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct_byte(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u < 0x80 && std::ispunct(u);
}

// Consumes a "[123]"-style footnote token starting at i, returning the index
// one past the closing bracket, or i if the text is not such a token.
std::size_t skip_footnote(std::string_view s, std::size_t i) {
    if (s[i] != '[') return i;
    std::size_t j = i + 1;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i + 1 && j < s.size() && s[j] == ']') return j + 1;
    return i;
}

}  // namespace

std::vector<std::string> TableRecord::column(std::size_t col) const {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(col < row.size() ? row[col] : std::string());
    return out;
}

std::string normalize_cell(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < raw.size();) {
        std::size_t after = skip_footnote(raw, i);
        if (after != i) {
            i = after;
            continue;
        }
        char c = raw[i];
        if (is_space_byte(c)) {
            pending_space = true;
            ++i;
            continue;
        }
        if (is_punct_byte(c)) {
            ++i;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        unsigned char u = static_cast<unsigned char>(c);
        out.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : c);
        ++i;
    }
    return out;
}

std::size_t nonspace_length(std::string_view v) {
    std::size_t n = 0;
    for (char c : v)
        if (c != ' ') ++n;
    return n;
}

CorpusReader::CorpusReader(const std::string& path) : in_(path) {
    if (!in_) throw std::runtime_error("cannot open corpus file: " + path);
}

std::optional<TableRecord> CorpusReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("headers") ||
            !j.contains("rows") || !j["id"].is_string() || !j["headers"].is_array() ||
            !j["rows"].is_array()) {
            ++stats_.skipped_lines;
            continue;
        }
        TableRecord t;
        t.id = j["id"].get<std::string>();
        t.domain = j.value("domain", std::string());
        bool ok = true;
        for (const auto& h : j["headers"]) {
            if (!h.is_string()) {
                ok = false;
                break;
            }
            t.headers.push_back(h.get<std::string>());
        }
        if (ok) {
            for (const auto& row : j["rows"]) {
                if (!row.is_array()) {
                    ok = false;
                    break;
                }
                std::vector<std::string> cells;
                for (const auto& c : row) {
                    if (!c.is_string()) {
                        ok = false;
                        break;
                    }
                    cells.push_back(c.get<std::string>());
                }
                if (!ok) break;
                // Rectangularize: pad short rows, truncate long ones.
                if (cells.size() != t.headers.size()) {
                    ++stats_.ragged_rows;
                    cells.resize(t.headers.size());
                }
                t.rows.push_back(std::move(cells));
            }
        }
        if (!ok) {
            ++stats_.skipped_lines;
            continue;
        }
        ++stats_.tables;
        stats_.columns += t.headers.size();
        stats_.rows += t.rows.size();
        return t;
    }
    return std::nullopt;
}

std::vector<TableRecord> load_corpus(const std::string& path, CorpusStats* stats) {
    CorpusReader reader(path);
    std::vector<TableRecord> out;
    while (auto t = reader.next()) out.push_back(std::move(*t));
    if (stats) *stats = reader.stats();
    return out;
}

std::string table_to_jsonl(const TableRecord& t) {
    nlohmann::json j;
    j["id"] = t.id;
    j["domain"] = t.domain;
    j["headers"] = t.headers;
    j["rows"] = t.rows;
    return j.dump();
}

void write_corpus(const std::vector<TableRecord>& tables, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& t : tables) out << table_to_jsonl(t) << '\n';
}

}  // namespace mapsynth

#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mapsynth {

// One raw input table. Rows are rectangular: every row has exactly
// headers.size() cells (the loader pads/truncates ragged rows).
struct TableRecord {
    std::string id;
    std::string domain;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_count() const { return headers.size(); }
    // Cells of one column, in row order.
    std::vector<std::string> column(std::size_t col) const;
};

// Canonical cell form: lowercased, ASCII punctuation stripped, bracketed
// footnote marks like "[1]" dropped, whitespace collapsed to single spaces,
// trimmed. Idempotent. Non-ASCII UTF-8 bytes pass through unchanged.
std::string normalize_cell(std::string_view raw);

// Length convention for edit-distance thresholds: characters excluding spaces,
// so "american samoa" counts 13 and "american samoa us" counts 15.
std::size_t nonspace_length(std::string_view v);

struct CorpusStats {
    std::size_t tables = 0;
    std::size_t columns = 0;
    std::size_t rows = 0;
    std::size_t skipped_lines = 0;  // malformed JSON lines
    std::size_t ragged_rows = 0;    // rows padded or truncated
};

// Streaming JSON-lines reader. One table per line:
//   {"id": "...", "domain": "...", "headers": [...], "rows": [[...], ...]}
// Malformed lines are skipped and counted; an unreadable file throws.
class CorpusReader {
  public:
    explicit CorpusReader(const std::string& path);

    // Next well-formed record, or nullopt at end of file.
    std::optional<TableRecord> next();

    const CorpusStats& stats() const { return stats_; }

  private:
    std::ifstream in_;
    CorpusStats stats_;
};

// Loads a whole corpus into memory. Stats are accumulated into *stats when given.
std::vector<TableRecord> load_corpus(const std::string& path, CorpusStats* stats = nullptr);

// Serializes records in the corpus line format.
void write_corpus(const std::vector<TableRecord>& tables, const std::string& path);
std::string table_to_jsonl(const TableRecord& t);

}  // namespace mapsynth

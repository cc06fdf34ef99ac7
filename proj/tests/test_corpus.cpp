#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "mapsynth/corpus.hpp"

using namespace mapsynth;

namespace {

std::string temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "mapsynth_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("normalize_cell strips punctuation and footnotes") {
    CHECK(normalize_cell("American Samoa (US)") == "american samoa us");
    CHECK(normalize_cell("") == "");
    CHECK(normalize_cell("  KOR ") == "kor");
    CHECK(normalize_cell("South Korea[1]") == "south korea");
    CHECK(normalize_cell("Korea, Republic of") == "korea republic of");
    CHECK(normalize_cell("U.S.A.") == "usa");
    CHECK(normalize_cell("a\t b\n c") == "a b c");
    CHECK(normalize_cell("[2]") == "");
    CHECK(normalize_cell("x [12] y") == "x y");
    // '[' without a closing digit run is plain punctuation
    CHECK(normalize_cell("a[bc]d") == "abcd");
}

TEST_CASE("normalize_cell is idempotent") {
    const char* samples[] = {"American Samoa (US)", "  KOR ", "x [12] y", "Côte d'Ivoire",
                             "a-b_c.d", "[3][4] mixed [x]", "  ", "123 [456]"};
    for (const char* s : samples) {
        auto once = normalize_cell(s);
        CHECK(normalize_cell(once) == once);
    }
}

TEST_CASE("nonspace_length matches the worked lengths") {
    CHECK(nonspace_length("american samoa") == 13);
    CHECK(nonspace_length("american samoa us") == 15);
    CHECK(nonspace_length("") == 0);
}

TEST_CASE("load_corpus reads well-formed lines") {
    auto path = temp_file("corpus_ok.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"t1","domain":"d1","headers":["a","b"],"rows":[["x","y"],["u","v"]]})"
            << "\n";
        out << R"({"id":"t2","domain":"d2","headers":["a"],"rows":[["z"]]})" << "\n";
    }
    CorpusStats stats;
    auto tables = load_corpus(path, &stats);
    REQUIRE(tables.size() == 2);
    CHECK(stats.tables == 2);
    CHECK(stats.columns == 3);
    CHECK(stats.rows == 3);
    CHECK(stats.skipped_lines == 0);
    CHECK(tables[0].id == "t1");
    CHECK(tables[0].column(1) == std::vector<std::string>{"y", "v"});
}

TEST_CASE("load_corpus skips malformed lines and counts them") {
    auto path = temp_file("corpus_bad.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"t1","domain":"d","headers":["a"],"rows":[["x"]]})" << "\n";
        out << "this is not json\n";
    }
    CorpusStats stats;
    auto tables = load_corpus(path, &stats);
    CHECK(tables.size() == 1);
    CHECK(stats.skipped_lines == 1);
}

TEST_CASE("ragged rows are padded and truncated") {
    auto path = temp_file("corpus_ragged.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"t1","domain":"d","headers":["a","b"],"rows":[["x"],["u","v","w"]]})"
            << "\n";
    }
    CorpusStats stats;
    auto tables = load_corpus(path, &stats);
    REQUIRE(tables.size() == 1);
    CHECK(stats.ragged_rows == 2);
    CHECK(tables[0].rows[0] == std::vector<std::string>{"x", ""});
    CHECK(tables[0].rows[1] == std::vector<std::string>{"u", "v"});
}

TEST_CASE("unreadable corpus throws") {
    CHECK_THROWS(load_corpus("/nonexistent/path/corpus.jsonl"));
}

TEST_CASE("corpus write/load round-trips") {
    std::vector<TableRecord> tables;
    for (int t = 0; t < 100; ++t) {
        TableRecord rec;
        rec.id = "t" + std::to_string(t);
        rec.domain = "d" + std::to_string(t % 7);
        rec.headers = {"left", "right"};
        for (int r = 0; r < 3 + t % 5; ++r)
            rec.rows.push_back({"value \"quoted\" " + std::to_string(r),
                                "v\t" + std::to_string(t * 31 + r)});
        tables.push_back(std::move(rec));
    }
    auto path = temp_file("corpus_roundtrip.jsonl");
    write_corpus(tables, path);
    auto loaded = load_corpus(path);
    REQUIRE(loaded.size() == tables.size());
    for (std::size_t i = 0; i < tables.size(); ++i) {
        CHECK(loaded[i].id == tables[i].id);
        CHECK(loaded[i].domain == tables[i].domain);
        CHECK(loaded[i].headers == tables[i].headers);
        CHECK(loaded[i].rows == tables[i].rows);
    }
}

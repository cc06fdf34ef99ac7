// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "benchmark_spec.hpp"
#include "fixtures.hpp"
#include "mapsynth/curate.hpp"
#include "mapsynth/extract.hpp"
#include "mapsynth/generator.hpp"
#include "mapsynth/partition.hpp"
#include "mapsynth/pipeline.hpp"
#include "mapsynth/resolve.hpp"
#include "mapsynth/strmatch.hpp"
#include "oracles.hpp"

using namespace mapsynth;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& info) {
        if (!detail.empty()) detail += "; ";
        detail += info;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string work_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "mapsynth_acceptance" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// ---- criterion 1: PMI worked example --------------------------------------

Outcome criterion_pmi() {
    Outcome out;
    CooccurrenceIndex idx;
    idx.total_columns = 100000000ull;
    for (std::uint32_t i = 0; i < 1000; ++i) idx.postings["usa"].push_back(i);
    for (std::uint32_t i = 0; i < 300; ++i) idx.postings["canada"].push_back(i);
    for (std::uint32_t i = 0; i < 200; ++i) idx.postings["canada"].push_back(1000 + i);

    auto t0 = std::chrono::steady_clock::now();
    double score = pmi("usa", "canada", idx);
    double elapsed_ms = seconds_since(t0) * 1000.0;

    if (std::abs(score - 4.78) > 0.01) out.fail(fmt("pmi=%.4f not 4.78+-0.01", score));
    if (elapsed_ms >= 1.0) out.fail(fmt("took %.3f ms", elapsed_ms));
    out.note(fmt("pmi=%.4f in %.4f ms", score, elapsed_ms));
    return out;
}

// ---- criterion 2: country-code table compatibility -------------------------

Outcome criterion_compatibility() {
    Outcome out;
    auto tables = fixtures::country_code_tables();
    const auto& b1 = tables[0];
    const auto& b2 = tables[1];
    const auto& b3 = tables[2];
    SynonymStore no_synonyms;
    MatchConfig approx;
    MatchConfig exact;
    exact.f_ed = 0.0;

    double w_exact = positive_weight(b1, b2, exact, no_synonyms);
    if (w_exact != 0.5) out.fail(fmt("exact w+=%.4f not 0.5", w_exact));
    double w_approx = positive_weight(b1, b2, approx, no_synonyms);
    if (std::abs(w_approx - 0.67) > 0.005)
        out.fail(fmt("approx w+=%.4f not 0.67+-0.005", w_approx));
    double w_neg = negative_weight(b1, b3, approx, no_synonyms);
    if (w_neg != -0.5) out.fail(fmt("w-(B1,B3)=%.4f not -0.5", w_neg));
    double w_none = negative_weight(b1, b2, approx, no_synonyms);
    if (w_none != 0.0) out.fail(fmt("w-(B1,B2)=%.4f not 0", w_none));
    int threshold = edit_threshold("american samoa", "american samoa us", approx);
    if (threshold != 2) out.fail(fmt("edit threshold=%.0f not 2", static_cast<double>(threshold)));
    out.note(fmt("w+exact=%.2f w+approx=%.3f w-=%.2f", w_exact, w_approx, w_neg));
    return out;
}

// ---- criterion 3: greedy partitioning fixture ------------------------------

Outcome criterion_partition_fixture() {
    Outcome out;
    auto g = fixtures::merge_order_graph();
    std::vector<MergeEvent> trace;
    auto p = greedy_partition(g, -0.2, 1, &trace);

    std::vector<std::vector<std::string>> expected = {{"B1", "B2"}, {"B3", "B4", "B5"}};
    if (p.parts != expected) out.fail("partitioning is not {{B1,B2},{B3,B4,B5}}");
    double obj = objective(p, g);
    if (std::abs(obj - 2.77) > 1e-9) out.fail(fmt("objective=%.6f not 2.77", obj));
    bool order_ok = trace.size() == 3 && trace[0].a == "B3" && trace[0].b == "B5" &&
                    trace[1].a == "B3" && trace[1].b == "B4" && trace[2].a == "B1" &&
                    trace[2].b == "B2";
    if (!order_ok) out.fail("merge order is not (B3,B5), +B4, (B1,B2)");

    auto exact = exact_partition(g, -0.2);
    if (exact.parts != expected) out.fail("exact optimum differs from the worked partitioning");
    out.note(fmt("objective=%.2f", obj));
    return out;
}

// ---- criterion 4: randomized property suites --------------------------------

CompatibilityGraph random_graph(std::mt19937& rng, std::size_t n, double p_pos, double p_neg) {
    CompatibilityGraph g;
    for (std::size_t v = 0; v < n; ++v) {
        char id[16];
        std::snprintf(id, sizeof(id), "v%03zu", v);
        g.add_vertex(id);
    }
    auto real = [&] { return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0); };
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) {
            if (real() < p_pos) g.add_pos(i, j, 0.05 + 0.95 * real());
            if (real() < p_neg) g.add_neg(i, j, -(0.05 + 0.95 * real()));
        }
    return g;
}

std::vector<CandidateTable> random_tables(std::mt19937& rng, std::size_t count,
                                          std::size_t pool, const char* prefix) {
    std::vector<CandidateTable> out;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t rows = 2 + rng() % 6;
        std::vector<std::pair<std::string, std::string>> pairs;
        for (std::size_t r = 0; r < rows; ++r)
            pairs.emplace_back(std::string(prefix) + " key " + std::to_string(rng() % pool),
                               "val " + std::to_string(rng() % 4));
        char id[16];
        std::snprintf(id, sizeof(id), "%s%04zu", prefix, i);
        out.push_back(fixtures::make_candidate(id, std::move(pairs)));
    }
    return out;
}

Outcome criterion_properties() {
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();
    MatchConfig mcfg;
    SynonymStore no_synonyms;

    {  // banded edit distance vs full DP, 10000 cases
        std::mt19937 rng(101);
        const char alphabet[] = "abcd ";
        std::size_t mismatches = 0;
        for (int iter = 0; iter < 10000; ++iter) {
            auto rand_str = [&](std::size_t max_len) {
                std::size_t len = rng() % (max_len + 1);
                std::string s;
                for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % 5]);
                return s;
            };
            std::string a = rand_str(40);
            std::string b = rand_str(40);
            int bound = static_cast<int>(rng() % 12);
            if (within_edit_distance(a, b, bound) !=
                (oracles::full_dp_distance(a, b) <= bound))
                ++mismatches;
        }
        if (mismatches)
            out.fail(fmt("banded DP mismatched oracle %.0f times",
                         static_cast<double>(mismatches)));
    }

    {  // hash-to-min components vs union-find, 1000 graphs
        std::mt19937 rng(202);
        std::size_t mismatches = 0;
        for (int iter = 0; iter < 1000; ++iter) {
            auto g = random_graph(rng, 1 + rng() % 40, 0.05, 0.03);
            auto fast = connected_components(g);
            std::sort(fast.begin(), fast.end());
            if (fast != oracles::components_by_unionfind(g)) ++mismatches;
        }
        if (mismatches)
            out.fail(fmt("components mismatched union-find %.0f times",
                         static_cast<double>(mismatches)));
    }

    {  // greedy feasibility, 1000 graphs
        std::mt19937 rng(303);
        const double tau = -0.2;
        std::size_t violations = 0;
        for (int iter = 0; iter < 1000; ++iter) {
            auto g = random_graph(rng, 2 + rng() % 30, 0.15, 0.10);
            auto p = greedy_partition(g, tau);
            std::unordered_map<std::string, std::uint32_t> index;
            for (std::uint32_t v = 0; v < g.vertex_count(); ++v) index[g.vertices[v]] = v;
            for (const auto& part : p.parts)
                for (std::size_t x = 0; x < part.size(); ++x)
                    for (std::size_t y = x + 1; y < part.size(); ++y)
                        if (g.neg(index.at(part[x]), index.at(part[y])) < tau) ++violations;
        }
        if (violations)
            out.fail(fmt("%.0f hard-constraint violations", static_cast<double>(violations)));
    }

    {  // greedy vs exact objective on small graphs, 1000 instances
        std::mt19937 rng(404);
        const double tau = -0.2;
        std::size_t beats = 0;
        double ratio_sum = 0.0;
        std::size_t counted = 0;
        for (int iter = 0; iter < 1000; ++iter) {
            auto g = random_graph(rng, 2 + rng() % 9, 0.3, 0.15);
            double go = objective(greedy_partition(g, tau), g);
            double eo = objective(exact_partition(g, tau), g);
            if (go > eo + 1e-9) ++beats;
            if (eo > 1e-12) {
                ratio_sum += go / eo;
                ++counted;
            }
        }
        if (beats)
            out.fail(fmt("greedy beat the exact optimum %.0f times",
                         static_cast<double>(beats)));
        out.note(fmt("greedy/exact objective ratio %.4f",
                     ratio_sum / static_cast<double>(counted)));
    }

    {  // conflict resolution: feasible and bounded by the exact oracle, 1000
        std::mt19937 rng(505);
        std::size_t bad = 0;
        double ratio_sum = 0.0;
        std::size_t counted = 0;
        for (int iter = 0; iter < 1000; ++iter) {
            auto partition = random_tables(rng, 2 + rng() % 11, 8, "rt");
            auto greedy = resolve_conflicts(partition, mcfg, no_synonyms);
            bool feasible = true;
            for (std::size_t i = 0; i < greedy.kept.size() && feasible; ++i)
                for (std::size_t j = i + 1; j < greedy.kept.size(); ++j)
                    if (!conflict_set(greedy.kept[i], greedy.kept[j], mcfg, no_synonyms)
                             .empty()) {
                        feasible = false;
                        break;
                    }
            if (!feasible) ++bad;
            auto exact = exact_resolve(partition, mcfg, no_synonyms);
            if (greedy.merged_pairs.size() > exact.merged_pairs.size()) ++bad;
            if (!exact.merged_pairs.empty()) {
                ratio_sum += static_cast<double>(greedy.merged_pairs.size()) /
                             static_cast<double>(exact.merged_pairs.size());
                ++counted;
            }
        }
        if (bad) out.fail(fmt("resolution property failed %.0f times",
                              static_cast<double>(bad)));
        out.note(fmt("resolve/exact coverage ratio %.4f",
                     ratio_sum / static_cast<double>(counted)));
    }

    {  // bucketed graph vs brute force under exact-key conditions, 1000 corpora
        std::mt19937 rng(606);
        std::size_t mismatches = 0;
        for (int iter = 0; iter < 1000; ++iter) {
            auto tables = random_tables(rng, 20 + rng() % 60, 12 + rng() % 20, "bf");
            GraphConfig cfg;
            cfg.theta_overlap = static_cast<int>(rng() % 3);
            cfg.theta_edge = 0.2 + 0.1 * static_cast<double>(rng() % 5);
            auto bucketed = build_graph(tables, cfg, mcfg, no_synonyms);
            auto brute = oracles::brute_force_graph(tables, cfg, mcfg, no_synonyms);
            if (bucketed.pos_edges.size() != brute.pos_edges.size() ||
                bucketed.neg_edges.size() != brute.neg_edges.size()) {
                ++mismatches;
                continue;
            }
            for (const auto& [key, w] : brute.pos_edges) {
                auto it = bucketed.pos_edges.find(key);
                if (it == bucketed.pos_edges.end() || std::abs(it->second - w) > 1e-12)
                    ++mismatches;
            }
            for (const auto& [key, w] : brute.neg_edges) {
                auto it = bucketed.neg_edges.find(key);
                if (it == bucketed.neg_edges.end() || std::abs(it->second - w) > 1e-12)
                    ++mismatches;
            }
        }
        if (mismatches)
            out.fail(fmt("bucketed graph mismatched brute force %.0f times",
                         static_cast<double>(mismatches)));
    }

    double elapsed = seconds_since(t0);
    if (elapsed >= 300.0) out.fail(fmt("property suites took %.1f s (budget 300)", elapsed));
    out.note(fmt("%.1f s", elapsed));
    return out;
}

// ---- criteria 5-7: synthetic end-to-end benchmark ---------------------------

struct BenchmarkRuns {
    GeneratedCorpus corpus;
    EvalReport default_report;
    EvalReport noresolve_report;
    EvalReport posonly_report;
    std::string default_best_iso, default_best_ioc;
    double default_seconds = 0.0;
    std::string curated_w1, curated_w8;
};

BenchmarkRuns run_benchmark() {
    BenchmarkRuns runs;
    auto spec = fixtures::benchmark_spec();
    runs.corpus = generate_corpus(spec, 42, work_dir("bench_gen"));

    auto run_variant = [&](bool negatives, bool resolve, int workers, const std::string& tag,
                           double* elapsed) {
        PipelineConfig cfg;
        cfg.synonyms_path = runs.corpus.synonyms_path;
        cfg.use_negative_edges = negatives;
        cfg.run_resolve = resolve;
        cfg.workers = workers;
        auto dir = work_dir("bench_" + tag);
        auto t0 = std::chrono::steady_clock::now();
        auto result = run_pipeline(cfg, runs.corpus.corpus_path, dir);
        if (elapsed) *elapsed = seconds_since(t0);
        return std::make_pair(std::move(result), dir);
    };

    auto [default_result, default_dir] =
        run_variant(true, true, 1, "default", &runs.default_seconds);
    runs.default_report = evaluate_against_truth(default_result.curated, runs.corpus.truth);
    runs.curated_w1 = slurp(default_dir + "/curated.jsonl");

    auto [w8_result, w8_dir] = run_variant(true, true, 8, "w8", nullptr);
    runs.curated_w8 = slurp(w8_dir + "/curated.jsonl");

    auto [noresolve_result, nr_dir] = run_variant(true, false, 2, "noresolve", nullptr);
    runs.noresolve_report = evaluate_against_truth(noresolve_result.curated, runs.corpus.truth);

    auto [posonly_result, po_dir] = run_variant(false, true, 2, "posonly", nullptr);
    runs.posonly_report = evaluate_against_truth(posonly_result.curated, runs.corpus.truth);

    for (const auto& c : runs.default_report.cases) {
        if (c.truth_id == "code_system_iso") runs.default_best_iso = c.best_mapping;
        if (c.truth_id == "code_system_ioc") runs.default_best_ioc = c.best_mapping;
    }
    return runs;
}

Outcome criterion_end_to_end(const BenchmarkRuns& runs) {
    Outcome out;
    double f = runs.default_report.macro_fscore;
    if (f < 0.90) out.fail(fmt("macro F=%.4f below 0.90", f));
    if (runs.default_best_iso.empty() || runs.default_best_iso == runs.default_best_ioc)
        out.fail("the two code systems merged into one mapping");
    double f_ablation = runs.posonly_report.macro_fscore;
    if (!(f_ablation < f)) out.fail(fmt("positives-only F=%.4f not below %.4f", f_ablation, f));
    if (runs.default_seconds >= 120.0)
        out.fail(fmt("single-threaded run took %.1f s (budget 120)", runs.default_seconds));
    out.note(fmt("F=%.4f ablation F=%.4f in %.1f s", f, f_ablation, runs.default_seconds));
    return out;
}

Outcome criterion_resolve_effect(const BenchmarkRuns& runs) {
    Outcome out;
    double dp = runs.default_report.macro_precision - runs.noresolve_report.macro_precision;
    double dr = runs.noresolve_report.macro_recall - runs.default_report.macro_recall;
    if (dp < 0.02) out.fail(fmt("precision gain %.4f below 0.02", dp));
    if (dr > 0.02) out.fail(fmt("recall drop %.4f above 0.02", dr));
    out.note(fmt("precision +%.4f recall -%.4f", dp, dr));
    return out;
}

Outcome criterion_determinism(const BenchmarkRuns& runs) {
    Outcome out;
    if (runs.curated_w1.empty()) out.fail("empty curated output");
    if (runs.curated_w1 != runs.curated_w8)
        out.fail("curated output differs between worker counts 1 and 8");
    out.note(fmt("%.0f curated bytes identical", static_cast<double>(runs.curated_w1.size())));
    return out;
}

// ---- criterion 8: scalability smoke -----------------------------------------

Outcome criterion_scalability() {
    Outcome out;
    auto spec = fixtures::scaling_spec(10000, 2500);
    auto gen = generate_corpus(spec, 7, work_dir("scale_gen"));

    std::vector<std::string> lines;
    {
        std::ifstream in(gen.corpus_path);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    std::vector<double> xs, ys;
    auto sample_path = work_dir("scale_samples") + "/sample.jsonl";
    for (int pct : {20, 40, 60, 80, 100}) {
        std::size_t n = lines.size() * static_cast<std::size_t>(pct) / 100;
        {
            std::ofstream sample(sample_path);
            for (std::size_t i = 0; i < n; ++i) sample << lines[i] << '\n';
        }
        PipelineConfig cfg;  // single-threaded
        auto dir = work_dir("scale_out");
        auto t0 = std::chrono::steady_clock::now();
        run_pipeline(cfg, sample_path, dir);
        double secs = seconds_since(t0);
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(secs));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double k = static_cast<double>(xs.size());
    const double exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    if (exponent >= 1.5) out.fail(fmt("fit exponent %.3f not below 1.5", exponent));
    out.note(fmt("fit exponent %.3f", exponent));
    return out;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int number, const char* name, const Outcome& out) {
        if (!out.pass) ++failures;
        std::printf("[%d] %-34s %s%s%s\n", number, name, out.pass ? "PASS" : "FAIL",
                    out.detail.empty() ? "" : "  -- ", out.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "pmi worked example", criterion_pmi());
    report(2, "country-code compatibility", criterion_compatibility());
    report(3, "greedy partitioning fixture", criterion_partition_fixture());
    report(4, "randomized property suites", criterion_properties());

    auto runs = run_benchmark();
    report(5, "synthetic end-to-end benchmark", criterion_end_to_end(runs));
    report(6, "conflict-resolution effect", criterion_resolve_effect(runs));
    report(7, "worker-count determinism", criterion_determinism(runs));
    report(8, "scalability smoke", criterion_scalability());

    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}

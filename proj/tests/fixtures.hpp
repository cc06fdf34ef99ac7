#pragma once

// Shared fixtures: the IOC/ISO country-code tables and the 5-vertex merge
// graph used across compat/partition/acceptance tests.

#include <string>
#include <vector>

#include "mapsynth/compat.hpp"
#include "mapsynth/extract.hpp"

namespace fixtures {

inline mapsynth::CandidateTable make_candidate(
    std::string id, std::vector<std::pair<std::string, std::string>> pairs,
    std::string domain = "d0") {
    mapsynth::CandidateTable c;
    c.id = std::move(id);
    c.source_table = c.id;
    c.domain = std::move(domain);
    c.pairs = std::move(pairs);
    std::sort(c.pairs.begin(), c.pairs.end());
    c.pairs.erase(std::unique(c.pairs.begin(), c.pairs.end()), c.pairs.end());
    return c;
}

// Three 6-row country-code tables. B1 and B2 describe the same code system
// (B2 with one spelling variant and two different countries); B3 is a second
// system that agrees on three rows and conflicts on three.
inline std::vector<mapsynth::CandidateTable> country_code_tables() {
    auto b1 = make_candidate("B1", {{"afghanistan", "afg"},
                                    {"argentina", "arg"},
                                    {"algeria", "alg"},
                                    {"american samoa", "asa"},
                                    {"australia", "aus"},
                                    {"germany", "ger"}});
    auto b2 = make_candidate("B2", {{"afghanistan", "afg"},
                                    {"argentina", "arg"},
                                    {"algeria", "alg"},
                                    {"american samoa us", "asa"},
                                    {"netherlands", "ned"},
                                    {"south africa", "rsa"}});
    auto b3 = make_candidate("B3", {{"afghanistan", "afg"},
                                    {"argentina", "arg"},
                                    {"algeria", "dza"},
                                    {"american samoa", "asm"},
                                    {"australia", "aus"},
                                    {"germany", "deu"}});
    return {b1, b2, b3};
}

// Five-vertex graph whose greedy run merges (B3,B5), then B4, then (B1,B2),
// for a final objective of 2.77.
inline mapsynth::CompatibilityGraph merge_order_graph() {
    mapsynth::CompatibilityGraph g;
    for (const char* id : {"B1", "B2", "B3", "B4", "B5"}) g.add_vertex(id);
    g.add_pos(0, 1, 0.67);
    g.add_pos(2, 4, 0.9);
    g.add_pos(2, 3, 0.7);
    g.add_pos(3, 4, 0.5);
    g.add_neg(0, 2, -0.5);
    g.add_neg(1, 3, -0.4);
    return g;
}

}  // namespace fixtures

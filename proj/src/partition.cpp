#include "mapsynth/partition.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

#include "mapsynth/parallel.hpp"

namespace mapsynth {

DisjointSet::DisjointSet(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
}

std::uint32_t DisjointSet::find(std::uint32_t v) {
    std::uint32_t root = v;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[v] != root) {
        std::uint32_t next = parent_[v];
        parent_[v] = root;
        v = next;
    }
    return root;
}

std::uint32_t DisjointSet::unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --sets_;
    return a;
}

std::size_t DisjointSet::size(std::uint32_t v) { return size_[find(v)]; }

std::vector<std::vector<std::uint32_t>> connected_components(const CompatibilityGraph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::vector<std::uint32_t>> adj(n);
    auto add_edge = [&](std::uint64_t key) {
        auto i = static_cast<std::uint32_t>(key >> 32);
        auto j = static_cast<std::uint32_t>(key & 0xffffffffu);
        adj[i].push_back(j);
        adj[j].push_back(i);
    };
    for (const auto& [key, w] : g.pos_edges) add_edge(key);
    for (const auto& [key, w] : g.neg_edges)
        if (!g.pos_edges.count(key)) add_edge(key);

    // Hash-to-Min: every vertex repeatedly adopts the minimum label seen in
    // its neighborhood until no label changes.
    std::vector<std::uint32_t> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = static_cast<std::uint32_t>(i);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t v = 0; v < n; ++v) {
            std::uint32_t m = label[v];
            for (std::uint32_t u : adj[v]) m = std::min(m, label[u]);
            if (m < label[v]) {
                label[v] = m;
                changed = true;
            }
        }
    }

    std::unordered_map<std::uint32_t, std::size_t> slot;
    std::vector<std::vector<std::uint32_t>> components;
    for (std::size_t v = 0; v < n; ++v) {
        auto [it, fresh] = slot.emplace(label[v], components.size());
        if (fresh) components.emplace_back();
        components[it->second].push_back(static_cast<std::uint32_t>(v));
    }
    // Vertices are scanned in increasing order, so each component is sorted
    // and components are already ordered by their minimum vertex.
    return components;
}

namespace {

struct AggEdge {
    double wpos = 0.0;
    double wneg = 0.0;
};

struct HeapEntry {
    double wpos;
    std::uint32_t a, b;          // roots at push time
    std::uint64_t va, vb;        // root versions at push time
    const std::string* id_lo;    // smallest member ids, for tie-breaking
    const std::string* id_hi;
};

struct HeapLess {
    bool operator()(const HeapEntry& x, const HeapEntry& y) const {
        if (x.wpos != y.wpos) return x.wpos < y.wpos;
        if (*x.id_lo != *y.id_lo) return *x.id_lo > *y.id_lo;
        return *x.id_hi > *y.id_hi;
    }
};

// Greedy merge loop over one connected component.
struct ComponentResult {
    std::vector<std::vector<std::uint32_t>> parts;  // vertex indexes, sorted
    std::vector<MergeEvent> events;
};

// Per-vertex view of the graph's edges, built once and shared by all
// component runs.
struct EdgeIndex {
    struct Arc {
        std::uint32_t other;
        double wpos;
        double wneg;
    };
    std::vector<std::vector<Arc>> arcs;

    explicit EdgeIndex(const CompatibilityGraph& g) : arcs(g.vertex_count()) {
        auto touch = [&](std::uint64_t key, double wpos, double wneg) {
            auto i = static_cast<std::uint32_t>(key >> 32);
            auto j = static_cast<std::uint32_t>(key & 0xffffffffu);
            arcs[i].push_back(Arc{j, wpos, wneg});
            arcs[j].push_back(Arc{i, wpos, wneg});
        };
        for (const auto& [key, w] : g.pos_edges) {
            auto itn = g.neg_edges.find(key);
            touch(key, w, itn == g.neg_edges.end() ? 0.0 : itn->second);
        }
        for (const auto& [key, w] : g.neg_edges) {
            if (!g.pos_edges.count(key)) touch(key, 0.0, w);
        }
    }
};

ComponentResult greedy_component(const CompatibilityGraph& g, const EdgeIndex& edges,
                                 const std::vector<std::uint32_t>& verts, double tau) {
    ComponentResult result;
    const std::size_t n = verts.size();
    std::unordered_map<std::uint32_t, std::uint32_t> local_of;
    local_of.reserve(n);
    for (std::size_t i = 0; i < n; ++i) local_of[verts[i]] = static_cast<std::uint32_t>(i);

    DisjointSet ds(n);
    std::vector<std::uint64_t> version(n, 0);
    std::vector<const std::string*> min_id(n);
    std::vector<std::vector<std::uint32_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) {
        min_id[i] = &g.vertices[verts[i]];
        members[i] = {verts[i]};
    }

    std::vector<std::unordered_map<std::uint32_t, AggEdge>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& arc : edges.arcs[verts[i]]) {
            auto it = local_of.find(arc.other);
            if (it == local_of.end()) continue;  // cannot happen within a component
            adj[i][it->second] = AggEdge{arc.wpos, arc.wneg};
        }
    }

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess> heap;
    auto push_edge = [&](std::uint32_t a, std::uint32_t b, const AggEdge& e) {
        if (e.wpos <= 0.0 || e.wneg < tau) return;  // nothing to gain, or blocked for good
        HeapEntry entry{e.wpos, a, b, version[a], version[b], min_id[a], min_id[b]};
        if (*entry.id_hi < *entry.id_lo) std::swap(entry.id_lo, entry.id_hi);
        heap.push(entry);
    };
    for (std::uint32_t a = 0; a < n; ++a) {
        for (const auto& [b, e] : adj[a]) {
            if (a < b) push_edge(a, b, e);
        }
    }

    while (!heap.empty()) {
        HeapEntry top = heap.top();
        heap.pop();
        if (version[top.a] != top.va || version[top.b] != top.vb) continue;  // stale
        const AggEdge& cur = adj[top.a].at(top.b);
        if (cur.wneg < tau) continue;

        std::uint32_t p1 = top.a;
        std::uint32_t p2 = top.b;
        result.events.push_back(MergeEvent{*min_id[p1] < *min_id[p2] ? *min_id[p1] : *min_id[p2],
                                           *min_id[p1] < *min_id[p2] ? *min_id[p2] : *min_id[p1],
                                           cur.wpos});

        std::uint32_t keep = ds.unite(p1, p2);
        std::uint32_t drop = keep == p1 ? p2 : p1;
        ++version[keep];
        ++version[drop];
        if (*min_id[drop] < *min_id[keep]) min_id[keep] = min_id[drop];
        members[keep].insert(members[keep].end(), members[drop].begin(), members[drop].end());
        members[drop].clear();

        // Fold drop's edges into keep's: w+ adds, w- takes the min.
        adj[keep].erase(drop);
        adj[drop].erase(keep);
        for (const auto& [nb, e] : adj[drop]) {
            auto& merged = adj[keep][nb];
            merged.wpos += e.wpos;
            merged.wneg = std::min(merged.wneg, e.wneg);
            auto& back = adj[nb][keep];
            back = merged;
            adj[nb].erase(drop);
        }
        adj[drop].clear();
        for (const auto& [nb, e] : adj[keep]) push_edge(keep, nb, e);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (ds.find(static_cast<std::uint32_t>(i)) == i) {
            auto part = members[i];
            std::sort(part.begin(), part.end());
            result.parts.push_back(std::move(part));
        }
    }
    return result;
}

double part_weight(const std::vector<std::uint32_t>& part, const CompatibilityGraph& g) {
    double sum = 0.0;
    for (std::size_t x = 0; x < part.size(); ++x)
        for (std::size_t y = x + 1; y < part.size(); ++y) sum += g.pos(part[x], part[y]);
    return sum;
}

Partitioning finalize(std::vector<std::vector<std::uint32_t>> parts,
                      const CompatibilityGraph& g) {
    std::vector<std::pair<std::vector<std::string>, double>> named;
    named.reserve(parts.size());
    for (auto& part : parts) {
        double w = part_weight(part, g);
        std::vector<std::string> ids;
        ids.reserve(part.size());
        for (auto v : part) ids.push_back(g.vertices[v]);
        std::sort(ids.begin(), ids.end());
        named.emplace_back(std::move(ids), w);
    }
    std::sort(named.begin(), named.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Partitioning p;
    for (auto& [ids, w] : named) {
        p.parts.push_back(std::move(ids));
        p.part_pos_weight.push_back(w);
    }
    return p;
}

}  // namespace

Partitioning greedy_partition(const CompatibilityGraph& g, double tau, int workers,
                              std::vector<MergeEvent>* trace) {
    auto components = connected_components(g);
    const EdgeIndex edges(g);
    auto results = parallel_map<ComponentResult>(
        components.size(), workers,
        [&](std::size_t c) { return greedy_component(g, edges, components[c], tau); });

    std::vector<std::vector<std::uint32_t>> parts;
    for (auto& r : results) {
        for (auto& part : r.parts) parts.push_back(std::move(part));
        if (trace) trace->insert(trace->end(), r.events.begin(), r.events.end());
    }
    return finalize(std::move(parts), g);
}

double objective(const Partitioning& p, const CompatibilityGraph& g) {
    std::unordered_map<std::string, std::uint32_t> index;
    index.reserve(g.vertex_count());
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) index[g.vertices[v]] = v;
    double total = 0.0;
    for (const auto& part : p.parts) {
        std::vector<std::uint32_t> verts;
        verts.reserve(part.size());
        for (const auto& id : part) {
            auto it = index.find(id);
            if (it == index.end())
                throw std::invalid_argument("partition references unknown vertex: " + id);
            verts.push_back(it->second);
        }
        total += part_weight(verts, g);
    }
    return total;
}

Partitioning exact_partition(const CompatibilityGraph& g, double tau,
                             std::size_t max_vertices) {
    const std::size_t n = g.vertex_count();
    if (n > max_vertices)
        throw std::invalid_argument("exact_partition refuses graphs over " +
                                    std::to_string(max_vertices) + " vertices");
    std::vector<std::vector<std::uint32_t>> blocks;
    std::vector<std::vector<std::uint32_t>> best_blocks;
    std::vector<std::vector<std::string>> best_canon;
    double best_obj = 0.0;
    bool found = false;

    auto canon = [&](const std::vector<std::vector<std::uint32_t>>& bs) {
        std::vector<std::vector<std::string>> out;
        out.reserve(bs.size());
        for (const auto& b : bs) {
            std::vector<std::string> ids;
            for (auto v : b) ids.push_back(g.vertices[v]);
            std::sort(ids.begin(), ids.end());
            out.push_back(std::move(ids));
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    // Restricted-growth enumeration with feasibility pruning and incremental
    // objective.
    std::function<void(std::uint32_t, double)> rec = [&](std::uint32_t v, double obj) {
        if (v == n) {
            auto c = canon(blocks);
            bool better = !found;
            if (!better) {
                if (obj > best_obj + 1e-12) {
                    better = true;
                } else if (obj > best_obj - 1e-12) {  // tie on objective
                    better = blocks.size() < best_blocks.size() ||
                             (blocks.size() == best_blocks.size() && c < best_canon);
                }
            }
            if (better) {
                found = true;
                best_obj = obj;
                best_blocks = blocks;
                best_canon = std::move(c);
            }
            return;
        }
        for (std::size_t b = 0; b <= blocks.size(); ++b) {
            if (b < blocks.size()) {
                double gain = 0.0;
                bool feasible = true;
                for (auto u : blocks[b]) {
                    if (g.neg(u, v) < tau) {
                        feasible = false;
                        break;
                    }
                    gain += g.pos(u, v);
                }
                if (!feasible) continue;
                blocks[b].push_back(v);
                rec(v + 1, obj + gain);
                blocks[b].pop_back();
            } else {
                blocks.push_back({v});
                rec(v + 1, obj);
                blocks.pop_back();
            }
        }
    };
    if (n > 0) rec(0, 0.0);

    return finalize(std::move(best_blocks), g);
}

void write_partitions(const Partitioning& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write partitions file: " + path);
    char buf[16];
    for (std::size_t i = 0; i < p.parts.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "p%06zu", i);
        nlohmann::json j;
        j["partition_id"] = buf;
        j["members"] = p.parts[i];
        out << j.dump() << '\n';
    }
}

Partitioning load_partitions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open partitions file: " + path);
    Partitioning p;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::vector<std::string> members;
        for (const auto& m : j.at("members")) members.push_back(m.get<std::string>());
        std::sort(members.begin(), members.end());
        p.parts.push_back(std::move(members));
    }
    std::sort(p.parts.begin(), p.parts.end());
    p.part_pos_weight.resize(p.parts.size(), 0.0);
    return p;
}

}  // namespace mapsynth

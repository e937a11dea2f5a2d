#pragma once

// Shared fixture graphs and actions used across the test suites.

#include "tropgal/group_action.hpp"
#include "tropgal/graph.hpp"

#include <string>

namespace fixtures {

using namespace tropgal;

inline Model theta_model() {
    Model m;
    m.vertices = {"x", "y"};
    m.edges = {{"a", 0, 1, Rat(1)}, {"b", 0, 1, Rat(1)}, {"c", 0, 1, Rat(1)}};
    return m;
}

inline GraphPtr theta() { return MetricGraph::canonicalize(theta_model()); }

inline Model banana_model(int n) {
    Model m;
    m.vertices = {"x", "y"};
    for (int i = 1; i <= n; ++i) m.edges.push_back({"e" + std::to_string(i), 0, 1, Rat(1)});
    return m;
}

inline GraphPtr banana(int n) { return MetricGraph::canonicalize(banana_model(n)); }

inline Model dumbbell_model() {
    Model m;
    m.vertices = {"v1", "v2"};
    m.edges = {{"A", 0, 0, Rat(2)}, {"B", 1, 1, Rat(2)}, {"br", 0, 1, Rat(1)}};
    return m;
}

inline GraphPtr dumbbell() { return MetricGraph::canonicalize(dumbbell_model()); }

inline Model k4_model() {
    Model m;
    m.vertices = {"v1", "v2", "v3", "v4"};
    int k = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            m.edges.push_back({"e" + std::to_string(++k), i, j, Rat(1)});
    return m;
}

inline GraphPtr k4() { return MetricGraph::canonicalize(k4_model()); }

inline Model circle_model(int arcs, const Rat& arclen) {
    Model m;
    for (int i = 0; i < arcs; ++i) m.vertices.push_back("c" + std::to_string(i + 1));
    for (int i = 0; i < arcs; ++i)
        m.edges.push_back({"a" + std::to_string(i + 1), i, (i + 1) % arcs, arclen});
    return m;
}

inline GraphPtr circle(int arcs = 4, const Rat& arclen = Rat(1)) {
    return MetricGraph::canonicalize(circle_model(arcs, arclen));
}

inline Model path_model(int edges) {
    Model m;
    for (int i = 0; i <= edges; ++i) m.vertices.push_back("p" + std::to_string(i));
    for (int i = 0; i < edges; ++i) m.edges.push_back({"s" + std::to_string(i + 1), i, i + 1, Rat(1)});
    return m;
}

// The second family of hyperelliptic graphs with non-injective canonical map:
// x,y joined by g-1 parallel edges; p,q joined by two parallel edges; bridges
// x-p and y-q of equal length.
inline Model type2_model(int g) {
    Model m;
    m.vertices = {"p", "q", "x", "y"};
    for (int i = 1; i < g; ++i) m.edges.push_back({"h" + std::to_string(i), 2, 3, Rat(1)});
    m.edges.push_back({"pq1", 0, 1, Rat(1)});
    m.edges.push_back({"pq2", 0, 1, Rat(1)});
    m.edges.push_back({"xp", 2, 0, Rat(1)});
    m.edges.push_back({"yq", 3, 1, Rat(1)});
    return m;
}

inline GraphPtr type2(int g) { return MetricGraph::canonicalize(type2_model(g)); }

// Assembles a group element from name-based maps: vertex name pairs plus
// edge id -> (edge id, reversed) entries; unlisted items map identically.
inline GroupElement element_by_names(const GraphPtr& g,
                                     const std::vector<std::pair<std::string, std::string>>& vmap,
                                     const std::vector<std::tuple<std::string, std::string, bool>>& emap) {
    const Model& m = g->model();
    GroupElement s;
    s.vperm.resize(m.vertices.size());
    for (size_t v = 0; v < m.vertices.size(); ++v) s.vperm[v] = static_cast<int>(v);
    for (auto& [from, to] : vmap) s.vperm[m.vertex_index(from)] = m.vertex_index(to);
    s.eperm.resize(m.edges.size());
    s.eflip.assign(m.edges.size(), 0);
    for (size_t e = 0; e < m.edges.size(); ++e) s.eperm[e] = static_cast<int>(e);
    for (auto& [from, to, rev] : emap) {
        int ei = m.edge_index(from);
        s.eperm[ei] = m.edge_index(to);
        s.eflip[ei] = rev;
    }
    return s;
}

// hyperelliptic involution of the theta graph: swap x,y and reverse each edge
inline IsometricAction theta_iota(const GraphPtr& g) {
    return IsometricAction::generate(
        g, {element_by_names(g, {{"x", "y"}, {"y", "x"}},
                             {{"a", "a", true}, {"b", "b", true}, {"c", "c", true}})});
}

// hyperelliptic involution of the n-banana
inline IsometricAction banana_iota(const GraphPtr& g, int n) {
    std::vector<std::tuple<std::string, std::string, bool>> emap;
    for (int i = 1; i <= n; ++i)
        emap.push_back({"e" + std::to_string(i), "e" + std::to_string(i), true});
    return IsometricAction::generate(g, {element_by_names(g, {{"x", "y"}, {"y", "x"}}, emap)});
}

// B4 action swapping e1<->e2 and e3<->e4 with x, y fixed
inline IsometricAction banana4_pair_swap(const GraphPtr& g) {
    return IsometricAction::generate(
        g, {element_by_names(g, {},
                             {{"e1", "e2", false},
                              {"e2", "e1", false},
                              {"e3", "e4", false},
                              {"e4", "e3", false}})});
}

// dumbbell involution: reflect both loops, fix the bridge pointwise
inline IsometricAction dumbbell_iota(const GraphPtr& g) {
    return IsometricAction::generate(
        g, {element_by_names(g, {}, {{"A", "A", true}, {"B", "B", true}})});
}

inline IsometricAction type2_iota(const GraphPtr& g, int gen) {
    std::vector<std::tuple<std::string, std::string, bool>> emap;
    for (int i = 1; i < gen; ++i)
        emap.push_back({"h" + std::to_string(i), "h" + std::to_string(i), true});
    emap.push_back({"pq1", "pq1", true});
    emap.push_back({"pq2", "pq2", true});
    emap.push_back({"xp", "yq", false});
    emap.push_back({"yq", "xp", false});
    return IsometricAction::generate(
        g, {element_by_names(g, {{"p", "q"}, {"q", "p"}, {"x", "y"}, {"y", "x"}}, emap)});
}

inline PointRef vertex(const GraphPtr& g, const std::string& name) {
    int v = g->model().vertex_index(name);
    if (v < 0) throw InputError("fixture: no vertex " + name);
    return PointRef::at_vertex(v);
}

inline PointRef edge_point(const GraphPtr& g, const std::string& edge, const Rat& t) {
    int e = g->model().edge_index(edge);
    if (e < 0) throw InputError("fixture: no edge " + edge);
    return normalize_point(g->model(), e, t);
}

}  // namespace fixtures

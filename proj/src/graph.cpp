#include "tropgal/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>

namespace tropgal {

ScaleGuard ScaleGuard::from_env() {
    ScaleGuard sg;
    auto rd = [](const char* name, long& slot) {
        if (const char* s = std::getenv(name)) slot = std::strtol(s, nullptr, 10);
    };
    rd("TROPGAL_MAX_CELLS", sg.max_cells);
    rd("TROPGAL_MAX_GROUP_ORDER", sg.max_group_order);
    rd("TROPGAL_MAX_DEGREE", sg.max_degree);
    rd("TROPGAL_MAX_GEN_CELLS", sg.max_gen_cells);
    rd("TROPGAL_MAX_AMPLE_K", sg.max_ample_k);
    return sg;
}

int Model::vertex_index(const std::string& name) const {
    for (size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == name) return static_cast<int>(i);
    return -1;
}

int Model::edge_index(const std::string& id) const {
    for (size_t i = 0; i < edges.size(); ++i)
        if (edges[i].id == id) return static_cast<int>(i);
    return -1;
}

int Model::valence(int v) const {
    int d = 0;
    for (const auto& e : edges) {
        if (e.u == v) ++d;
        if (e.v == v) ++d;
    }
    return d;
}

bool Model::connected() const {
    if (vertices.empty()) return false;
    std::vector<char> seen(vertices.size(), 0);
    std::deque<int> q{0};
    seen[0] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (const auto& e : edges) {
            int w = -1;
            if (e.u == v) w = e.v;
            else if (e.v == v) w = e.u;
            if (w >= 0 && !seen[w]) {
                seen[w] = 1;
                q.push_back(w);
            }
        }
    }
    for (char c : seen)
        if (!c) return false;
    return true;
}

bool Model::has_loops() const {
    for (const auto& e : edges)
        if (e.is_loop()) return true;
    return false;
}

Rat Model::total_length() const {
    Rat s;
    for (const auto& e : edges) s += e.length;
    return s;
}

void Model::validate() const {
    if (vertices.empty()) throw InputError("model: empty vertex set");
    std::set<std::string> vn(vertices.begin(), vertices.end());
    if (vn.size() != vertices.size()) throw InputError("model: duplicate vertex name");
    std::set<std::string> en;
    for (const auto& e : edges) {
        if (!en.insert(e.id).second) throw InputError("model: duplicate edge id '" + e.id + "'");
        if (e.u < 0 || e.v < 0 || e.u >= static_cast<int>(vertices.size()) ||
            e.v >= static_cast<int>(vertices.size()))
            throw InputError("model: edge '" + e.id + "' has out-of-range endpoint");
        if (!(e.length > Rat(0))) throw InputError("model: edge '" + e.id + "' has nonpositive length");
    }
    if (!connected()) throw InputError("model: graph is disconnected");
    if (edges.empty() && vertices.size() > 1) throw InputError("model: no edges");
}

PointRef normalize_point(const Model& m, int edge, const Rat& t) {
    if (edge < 0 || edge >= static_cast<int>(m.edges.size())) throw InputError("point: bad edge index");
    const auto& e = m.edges[edge];
    if (t < Rat(0) || t > e.length) throw InputError("point: offset out of range on edge '" + e.id + "'");
    if (t.is_zero()) return PointRef::at_vertex(e.u);
    if (t == e.length) return PointRef::at_vertex(e.v);
    return PointRef::on_edge(edge, t);
}

std::string point_name(const Model& m, const PointRef& p) {
    if (p.is_vertex()) return m.vertices[p.vertex];
    return m.edges[p.edge].id + "@" + p.offset.str();
}

// True when child vertex `cv` sits at offset `off` of parent edge `pe`.
static bool child_vertex_at(const Subdivision& s, int cv, int pe, const Rat& off) {
    const PointRef& loc = s.child_vertex_in_parent[cv];
    const auto& pedge = s.parent.edges[pe];
    if (loc.is_vertex()) {
        if (off.is_zero() && pedge.u == loc.vertex) return true;
        if (off == pedge.length && pedge.v == loc.vertex) return true;
        return false;
    }
    return loc.edge == pe && loc.offset == off;
}

PointRef Subdivision::to_parent(const PointRef& child_pt) const {
    if (child_pt.is_vertex()) return child_vertex_in_parent[child_pt.vertex];
    for (size_t pe = 0; pe < edge_pieces.size(); ++pe) {
        Rat acc;
        for (int ce : edge_pieces[pe]) {
            const auto& cedge = child.edges[ce];
            Rat a = acc, b = acc + cedge.length;
            if (ce == child_pt.edge) {
                bool u_at_a = child_vertex_at(*this, cedge.u, static_cast<int>(pe), a);
                Rat t = u_at_a ? a + child_pt.offset : b - child_pt.offset;
                return normalize_point(parent, static_cast<int>(pe), t);
            }
            acc = b;
        }
    }
    throw InputError("subdivision: point not found in child model");
}

PointRef Subdivision::to_child(const PointRef& parent_pt) const {
    if (parent_pt.is_vertex()) return PointRef::at_vertex(parent_vertex_in_child[parent_pt.vertex]);
    Rat acc;
    for (int ce : edge_pieces[parent_pt.edge]) {
        const auto& cedge = child.edges[ce];
        Rat a = acc, b = acc + cedge.length;
        if (parent_pt.offset >= a && parent_pt.offset <= b) {
            bool u_at_a = child_vertex_at(*this, cedge.u, parent_pt.edge, a);
            Rat t = u_at_a ? parent_pt.offset - a : b - parent_pt.offset;
            return normalize_point(child, ce, t);
        }
        acc = b;
    }
    throw InputError("subdivision: offset out of range");
}

Subdivision refine(const Model& m, std::vector<PointRef> pts) {
    m.validate();
    Subdivision s;
    s.parent = m;
    // collect strictly-interior split offsets per edge
    std::vector<std::set<Rat>> splits(m.edges.size());
    for (const auto& p : pts) {
        if (p.is_vertex()) continue;  // already a vertex
        if (p.edge < 0 || p.edge >= static_cast<int>(m.edges.size()))
            throw InputError("refine: bad edge in point");
        if (p.offset <= Rat(0) || p.offset >= m.edges[p.edge].length)
            throw InputError("refine: offset out of open range");
        splits[p.edge].insert(p.offset);
    }
    Model c;
    c.vertices = m.vertices;
    s.parent_vertex_in_child.resize(m.vertices.size());
    for (size_t v = 0; v < m.vertices.size(); ++v) {
        s.parent_vertex_in_child[v] = static_cast<int>(v);
        s.child_vertex_in_parent.push_back(PointRef::at_vertex(static_cast<int>(v)));
    }
    s.edge_pieces.resize(m.edges.size());
    for (size_t e = 0; e < m.edges.size(); ++e) {
        const auto& pe = m.edges[e];
        if (splits[e].empty()) {
            ModelEdge ce = pe;
            c.edges.push_back(ce);
            s.edge_pieces[e].push_back(static_cast<int>(c.edges.size()) - 1);
            continue;
        }
        int prev_v = pe.u;
        Rat prev_t(0);
        int piece = 0;
        auto add_piece = [&](int to_v, const Rat& to_t) {
            ModelEdge ce;
            ce.id = pe.id + "#" + std::to_string(piece++);
            ce.u = prev_v;
            ce.v = to_v;
            ce.length = to_t - prev_t;
            c.edges.push_back(ce);
            s.edge_pieces[e].push_back(static_cast<int>(c.edges.size()) - 1);
            prev_v = to_v;
            prev_t = to_t;
        };
        for (const Rat& t : splits[e]) {
            int nv = static_cast<int>(c.vertices.size());
            c.vertices.push_back(pe.id + "@" + t.str());
            s.child_vertex_in_parent.push_back(PointRef::on_edge(static_cast<int>(e), t));
            add_piece(nv, t);
        }
        add_piece(pe.v, pe.length);
    }
    s.child = c;
    s.child.validate();
    return s;
}

Subdivision loopless_subdivision(const Model& m) {
    std::vector<PointRef> mids;
    for (size_t e = 0; e < m.edges.size(); ++e)
        if (m.edges[e].is_loop())
            mids.push_back(PointRef::on_edge(static_cast<int>(e), m.edges[e].length / Rat(2)));
    return refine(m, mids);
}

// --- canonical model construction ---

std::shared_ptr<const MetricGraph> MetricGraph::canonicalize(const Model& raw) {
    raw.validate();
    auto g = std::shared_ptr<MetricGraph>(new MetricGraph());

    bool all_val2 = true;
    for (size_t v = 0; v < raw.vertices.size(); ++v)
        if (raw.valence(static_cast<int>(v)) != 2) all_val2 = false;

    Model canon;
    Subdivision over;
    over.child = raw;
    over.parent_vertex_in_child.clear();
    over.child_vertex_in_parent.assign(raw.vertices.size(), PointRef{});

    // walk a maximal chain of valence-2 vertices starting from vertex v along
    // half-edge (edge e, leaving from end `from_u`); returns the chain of
    // (edge, forward) plus the terminal vertex.
    struct Chain {
        std::vector<std::pair<int, bool>> pieces;  // (raw edge, traversed u->v?)
        int end_vertex;
        Rat length;
    };
    auto is_kept = [&](int v) {
        return all_val2 ? false : raw.valence(v) != 2;
    };
    std::vector<char> used(raw.edges.size(), 0);
    auto walk = [&](int start_edge, bool forward) {
        Chain ch;
        ch.length = Rat(0);
        int e = start_edge;
        bool fwd = forward;
        while (true) {
            ch.pieces.emplace_back(e, fwd);
            used[e] = 1;
            ch.length += raw.edges[e].length;
            int nxt = fwd ? raw.edges[e].v : raw.edges[e].u;
            if (is_kept(nxt)) {
                ch.end_vertex = nxt;
                return ch;
            }
            // valence-2 interior vertex: find the other half-edge
            int ne = -1;
            bool nf = true;
            for (size_t k = 0; k < raw.edges.size(); ++k) {
                int ki = static_cast<int>(k);
                const auto& ke = raw.edges[k];
                if (ke.is_loop() && ke.u == nxt) {
                    // a loop at a valence-2 vertex means the component is a bare
                    // circle through nxt; handled by the circle case
                    continue;
                }
                if (ki == e) continue;
                if (ke.u == nxt) { ne = ki; nf = true; break; }
                if (ke.v == nxt) { ne = ki; nf = false; break; }
            }
            if (ne < 0) throw InputError("canonical model: dangling valence-2 chain");
            e = ne;
            fwd = nf;
        }
    };

    if (all_val2) {
        // circle: single marker vertex, the lexicographically-least input vertex
        int marker = 0;
        for (size_t v = 1; v < raw.vertices.size(); ++v)
            if (raw.vertices[v] < raw.vertices[marker]) marker = static_cast<int>(v);
        canon.vertices.push_back(raw.vertices[marker]);
        // traverse the cycle from marker
        Chain ch;
        ch.length = Rat(0);
        int e0 = -1;
        bool f0 = true;
        for (size_t k = 0; k < raw.edges.size() && e0 < 0; ++k) {
            if (raw.edges[k].u == marker) { e0 = static_cast<int>(k); f0 = true; }
            else if (raw.edges[k].v == marker) { e0 = static_cast<int>(k); f0 = false; }
        }
        if (e0 < 0) throw InputError("canonical model: isolated vertex");
        int e = e0;
        bool fwd = f0;
        int at = marker;
        while (true) {
            ch.pieces.emplace_back(e, fwd);
            used[e] = 1;
            ch.length += raw.edges[e].length;
            at = fwd ? raw.edges[e].v : raw.edges[e].u;
            if (at == marker) break;
            int ne = -1;
            bool nf = true;
            for (size_t k = 0; k < raw.edges.size(); ++k) {
                int ki = static_cast<int>(k);
                if (used[ki]) continue;
                const auto& ke = raw.edges[k];
                if (ke.u == at) { ne = ki; nf = true; break; }
                if (ke.v == at) { ne = ki; nf = false; break; }
            }
            if (ne < 0) throw InputError("canonical model: broken circle");
            e = ne;
            fwd = nf;
        }
        ModelEdge loop;
        loop.id = raw.edges[ch.pieces.front().first].id;
        loop.u = loop.v = 0;
        loop.length = ch.length;
        canon.edges.push_back(loop);
        g->circle_ = true;

        over.parent_vertex_in_child.assign(1, marker);
        over.child_vertex_in_parent[marker] = PointRef::at_vertex(0);
        Rat acc;
        over.edge_pieces.resize(1);
        for (auto [pe, pf] : ch.pieces) {
            over.edge_pieces[0].push_back(pe);
            int inner = pf ? raw.edges[pe].v : raw.edges[pe].u;
            acc += raw.edges[pe].length;
            if (inner != marker)
                over.child_vertex_in_parent[inner] = PointRef::on_edge(0, acc);
        }
    } else {
        // kept vertices, in input order (stable ids)
        std::vector<int> keep;
        std::vector<int> canon_of_raw(raw.vertices.size(), -1);
        for (size_t v = 0; v < raw.vertices.size(); ++v)
            if (is_kept(static_cast<int>(v))) {
                canon_of_raw[v] = static_cast<int>(keep.size());
                keep.push_back(static_cast<int>(v));
                canon.vertices.push_back(raw.vertices[v]);
            }
        over.parent_vertex_in_child.resize(keep.size());
        for (size_t i = 0; i < keep.size(); ++i) {
            over.parent_vertex_in_child[i] = keep[i];
            over.child_vertex_in_parent[keep[i]] = PointRef::at_vertex(static_cast<int>(i));
        }
        for (int kv : keep) {
            // launch a walk along every incident half-edge not yet used
            for (size_t k = 0; k < raw.edges.size(); ++k) {
                int ki = static_cast<int>(k);
                if (used[ki]) continue;
                const auto& ke = raw.edges[k];
                std::vector<std::pair<int, bool>> starts;
                if (ke.u == kv) starts.emplace_back(ki, true);
                if (ke.v == kv && !ke.is_loop()) starts.emplace_back(ki, false);
                for (auto [se, sf] : starts) {
                    if (used[se]) continue;
                    Chain ch = walk(se, sf);
                    // canonical edge id: lexicographically-least constituent id
                    std::string cid = raw.edges[ch.pieces.front().first].id;
                    for (auto [pe, pf] : ch.pieces)
                        cid = std::min(cid, raw.edges[pe].id);
                    ModelEdge ce;
                    ce.id = cid;
                    ce.u = canon_of_raw[kv];
                    ce.v = canon_of_raw[ch.end_vertex];
                    ce.length = ch.length;
                    canon.edges.push_back(ce);
                    int cei = static_cast<int>(canon.edges.size()) - 1;
                    over.edge_pieces.resize(canon.edges.size());
                    Rat acc;
                    for (auto [pe, pf] : ch.pieces) {
                        over.edge_pieces[cei].push_back(pe);
                        int inner = pf ? raw.edges[pe].v : raw.edges[pe].u;
                        acc += raw.edges[pe].length;
                        if (canon_of_raw[inner] < 0)
                            over.child_vertex_in_parent[inner] = PointRef::on_edge(cei, acc);
                    }
                }
            }
        }
        for (char u : used)
            if (!u) throw InputError("canonical model: unreachable edges");
    }
    canon.validate();
    over.parent = canon;
    g->canon_ = canon;
    g->over_ = over;
    return g;
}

bool MetricGraph::has_valence_one() const {
    for (size_t v = 0; v < canon_.vertices.size(); ++v)
        if (canon_.valence(static_cast<int>(v)) == 1) return true;
    return false;
}

bool MetricGraph::applying_canonicalize_is_identity(const Model& m) const {
    auto g2 = MetricGraph::canonicalize(m);
    const Model& a = g2->model();
    if (a.vertices.size() != m.vertices.size() || a.edges.size() != m.edges.size()) return false;
    return true;
}

void MetricGraph::ensure_vdist() const {
    if (!vdist_.empty()) return;
    size_t n = canon_.vertices.size();
    std::vector<std::vector<std::optional<Rat>>> d(n, std::vector<std::optional<Rat>>(n));
    for (size_t i = 0; i < n; ++i) d[i][i] = Rat(0);
    for (const auto& e : canon_.edges) {
        if (e.is_loop()) continue;
        if (!d[e.u][e.v] || e.length < *d[e.u][e.v]) d[e.u][e.v] = d[e.v][e.u] = e.length;
    }
    for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (d[i][k] && d[k][j]) {
                    Rat via = *d[i][k] + *d[k][j];
                    if (!d[i][j] || via < *d[i][j]) d[i][j] = via;
                }
    vdist_.assign(n, std::vector<Rat>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (!d[i][j]) throw InputError("metric graph: disconnected");
            vdist_[i][j] = *d[i][j];
        }
}

Rat MetricGraph::vertex_distance(int u, int v) const {
    ensure_vdist();
    return vdist_[u][v];
}

Rat MetricGraph::distance(const PointRef& x, const PointRef& y) const {
    ensure_vdist();
    auto ends = [&](const PointRef& p) {
        // (vertex, offset-to-it) pairs
        std::vector<std::pair<int, Rat>> r;
        if (p.is_vertex()) {
            r.emplace_back(p.vertex, Rat(0));
        } else {
            const auto& e = canon_.edges[p.edge];
            r.emplace_back(e.u, p.offset);
            r.emplace_back(e.v, e.length - p.offset);
        }
        return r;
    };
    std::optional<Rat> best;
    // direct within one edge
    if (!x.is_vertex() && !y.is_vertex() && x.edge == y.edge) {
        Rat d = abs(x.offset - y.offset);
        best = d;
    }
    for (auto& [u, du] : ends(x))
        for (auto& [v, dv] : ends(y)) {
            Rat d = du + vdist_[u][v] + dv;
            if (!best || d < *best) best = d;
        }
    return *best;
}

Rat MetricGraph::max_distance_from(const PointRef& x) const {
    // The maximum of dist(x, .) is attained at a vertex or an edge midpoint of
    // the "farthest cell"; maximizing over vertices and per-edge interior
    // maxima of the tent function is exact.
    ensure_vdist();
    Rat best(0);
    std::vector<Rat> dv(canon_.vertices.size());
    for (size_t v = 0; v < canon_.vertices.size(); ++v) {
        dv[v] = distance(x, PointRef::at_vertex(static_cast<int>(v)));
        best = max(best, dv[v]);
    }
    for (size_t e = 0; e < canon_.edges.size(); ++e) {
        const auto& ed = canon_.edges[e];
        // within edge e the distance function is min(dv[u]+t, dv[v]+len-t)
        // (plus possibly a shorter route via x itself if x lies on e; that only
        // lowers the max). Peak value:
        Rat peak = (dv[ed.u] + dv[ed.v] + ed.length) / Rat(2);
        if (!x.is_vertex() && x.edge == static_cast<int>(e)) {
            // distance within the edge from x caps at half the loop around
            peak = max(max(dv[ed.u] + x.offset, dv[ed.v] + (ed.length - x.offset)), best);
        }
        best = max(best, peak);
    }
    return best;
}

// --- Marking ---

Marking::Marking(GraphPtr g, const std::vector<PointRef>& marks) : g_(std::move(g)) {
    const Model& m = g_->model();
    edge_marks_.resize(m.edges.size());
    for (size_t v = 0; v < m.vertices.size(); ++v)
        node_points_.push_back(PointRef::at_vertex(static_cast<int>(v)));
    std::vector<std::set<Rat>> per_edge(m.edges.size());
    for (const auto& p : marks) {
        if (p.is_vertex()) continue;
        if (p.edge < 0 || p.edge >= static_cast<int>(m.edges.size()))
            throw InputError("marking: bad edge");
        if (p.offset <= Rat(0) || p.offset >= m.edges[p.edge].length)
            throw InputError("marking: offset not interior");
        per_edge[p.edge].insert(p.offset);
    }
    for (size_t e = 0; e < m.edges.size(); ++e)
        for (const Rat& t : per_edge[e]) {
            int id = static_cast<int>(node_points_.size());
            node_points_.push_back(PointRef::on_edge(static_cast<int>(e), t));
            edge_marks_[e][t] = id;
        }
    edge_cells_.resize(m.edges.size());
    node_cells_.resize(node_points_.size());
    for (size_t e = 0; e < m.edges.size(); ++e) {
        const auto& ed = m.edges[e];
        int prev_node = ed.u;
        Rat prev_t(0);
        auto push_cell = [&](int node, const Rat& t) {
            Cell c;
            c.edge = static_cast<int>(e);
            c.a = prev_t;
            c.b = t;
            c.node_a = prev_node;
            c.node_b = node;
            int ci = static_cast<int>(cells_.size());
            cells_.push_back(c);
            edge_cells_[e].push_back(ci);
            node_cells_[prev_node].emplace_back(ci, 0);
            node_cells_[node].emplace_back(ci, 1);
            prev_node = node;
            prev_t = t;
        };
        for (auto& [t, id] : edge_marks_[e]) push_cell(id, t);
        push_cell(ed.v, ed.length);
    }
}

int Marking::node_of(const PointRef& p) const {
    if (p.is_vertex()) return p.vertex;
    auto& mp = edge_marks_[p.edge];
    auto it = mp.find(p.offset);
    return it == mp.end() ? -1 : it->second;
}

void Marking::locate(const PointRef& p, int& node, int& cell) const {
    node = node_of(p);
    cell = -1;
    if (node >= 0) return;
    for (int ci : edge_cells_[p.edge]) {
        const Cell& c = cells_[ci];
        if (p.offset > c.a && p.offset < c.b) {
            cell = ci;
            return;
        }
    }
    throw InputError("marking: point not located");
}

Model Marking::to_model() const {
    const Model& m = g_->model();
    Model out;
    for (int i = 0; i < num_nodes(); ++i) out.vertices.push_back(point_name(m, node_points_[i]));
    out.edges.resize(cells_.size());
    for (size_t e = 0; e < edge_cells_.size(); ++e) {
        const auto& list = edge_cells_[e];
        for (size_t k = 0; k < list.size(); ++k) {
            const Cell& c = cells_[list[k]];
            ModelEdge me;
            me.id = list.size() > 1 ? m.edges[e].id + "#" + std::to_string(k) : m.edges[e].id;
            me.u = c.node_a;
            me.v = c.node_b;
            me.length = c.b - c.a;
            out.edges[list[k]] = me;
        }
    }
    out.validate();
    return out;
}

PointRef Marking::to_model_point(const PointRef& p) const {
    int node, cell;
    locate(p, node, cell);
    if (node >= 0) return PointRef::at_vertex(node);
    const Cell& c = cells_[cell];
    return PointRef::on_edge(cell, p.offset - c.a);
}

PointRef Marking::model_point_to_canonical(const PointRef& mp) const {
    if (mp.is_vertex()) return node_points_[mp.vertex];
    const Cell& c = cells_[mp.edge];
    return normalize_point(g_->model(), c.edge, c.a + mp.offset);
}

}  // namespace tropgal

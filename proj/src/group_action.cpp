#include "tropgal/group_action.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tropgal {

static GroupElement identity_of(const Model& m) {
    GroupElement e;
    e.vperm.resize(m.vertices.size());
    for (size_t i = 0; i < m.vertices.size(); ++i) e.vperm[i] = static_cast<int>(i);
    e.eperm.resize(m.edges.size());
    e.eflip.assign(m.edges.size(), 0);
    for (size_t i = 0; i < m.edges.size(); ++i) e.eperm[i] = static_cast<int>(i);
    return e;
}

IsometricAction IsometricAction::trivial(GraphPtr g) {
    IsometricAction a;
    a.g_ = std::move(g);
    a.elements_.push_back(identity_of(a.g_->model()));
    a.id_index_ = 0;
    return a;
}

GroupElement IsometricAction::compose_elements(const GroupElement& a, const GroupElement& b) const {
    GroupElement c;
    c.vperm.resize(a.vperm.size());
    c.eperm.resize(a.eperm.size());
    c.eflip.resize(a.eflip.size());
    for (size_t v = 0; v < a.vperm.size(); ++v) c.vperm[v] = a.vperm[b.vperm[v]];
    for (size_t e = 0; e < a.eperm.size(); ++e) {
        c.eperm[e] = a.eperm[b.eperm[e]];
        c.eflip[e] = b.eflip[e] ^ a.eflip[b.eperm[e]];
    }
    return c;
}

GroupElement IsometricAction::inverse_element(const GroupElement& a) const {
    GroupElement inv;
    inv.vperm.resize(a.vperm.size());
    inv.eperm.resize(a.eperm.size());
    inv.eflip.resize(a.eflip.size());
    for (size_t v = 0; v < a.vperm.size(); ++v) inv.vperm[a.vperm[v]] = static_cast<int>(v);
    for (size_t e = 0; e < a.eperm.size(); ++e) {
        inv.eperm[a.eperm[e]] = static_cast<int>(e);
        inv.eflip[a.eperm[e]] = a.eflip[e];
    }
    return inv;
}

int IsometricAction::element_order(const GroupElement& a) const {
    GroupElement id = identity_of(g_->model());
    GroupElement cur = a;
    int k = 1;
    while (!(cur == id)) {
        cur = compose_elements(a, cur);
        if (++k > order() + 1) throw InputError("element_order: runaway");
    }
    return k;
}

IsometricAction IsometricAction::generate(GraphPtr g, const std::vector<GroupElement>& gens,
                                          const ScaleGuard& guard) {
    IsometricAction a;
    a.g_ = std::move(g);
    std::set<GroupElement> seen;
    GroupElement id = identity_of(a.g_->model());
    seen.insert(id);
    std::vector<GroupElement> queue{id};
    for (const auto& s : gens)
        if (seen.insert(s).second) queue.push_back(s);
    for (size_t i = 0; i < queue.size(); ++i) {
        for (const auto& s : gens) {
            GroupElement c = a.compose_elements(s, queue[i]);
            if (seen.insert(c).second) {
                queue.push_back(c);
                if (static_cast<long>(queue.size()) > guard.max_group_order)
                    throw ScaleGuardError("group closure exceeds guard");
            }
        }
    }
    std::sort(queue.begin(), queue.end());
    a.elements_ = std::move(queue);
    for (size_t i = 0; i < a.elements_.size(); ++i)
        if (a.elements_[i] == id) a.id_index_ = static_cast<int>(i);
    auto val = a.validate();
    if (!val.ok) throw InputError("invalid isometric action: " + val.report);
    return a;
}

IsometricAction IsometricAction::subgroup(const std::vector<GroupElement>& gens) const {
    return generate(g_, gens);
}

IsometricAction::Validation IsometricAction::validate() const {
    Validation out;
    const Model& m = g_->model();
    std::ostringstream os;
    auto fail = [&](const std::string& msg) {
        out.ok = false;
        os << msg << "; ";
    };
    for (size_t si = 0; si < elements_.size(); ++si) {
        const GroupElement& s = elements_[si];
        if (s.vperm.size() != m.vertices.size() || s.eperm.size() != m.edges.size() ||
            s.eflip.size() != m.edges.size()) {
            fail("element " + std::to_string(si) + ": size mismatch");
            continue;
        }
        std::vector<char> vseen(m.vertices.size(), 0), eseen(m.edges.size(), 0);
        for (int v : s.vperm) {
            if (v < 0 || v >= static_cast<int>(m.vertices.size()) || vseen[v])
                fail("element " + std::to_string(si) + ": vertex map not a bijection");
            else
                vseen[v] = 1;
        }
        for (int e : s.eperm) {
            if (e < 0 || e >= static_cast<int>(m.edges.size()) || eseen[e])
                fail("element " + std::to_string(si) + ": edge map not a bijection");
            else
                eseen[e] = 1;
        }
        if (!out.ok) continue;
        for (size_t e = 0; e < m.edges.size(); ++e) {
            const auto& src = m.edges[e];
            const auto& img = m.edges[s.eperm[e]];
            if (src.length != img.length)
                fail("element " + std::to_string(si) + ", edge " + src.id + ": length " +
                     src.length.str() + " mapped onto length " + img.length.str());
            int iu = s.eflip[e] ? img.v : img.u;
            int iv = s.eflip[e] ? img.u : img.v;
            if (s.vperm[src.u] != iu || s.vperm[src.v] != iv)
                fail("element " + std::to_string(si) + ", edge " + src.id + ": incidence broken");
        }
    }
    // closure, identity, inverses
    std::set<GroupElement> set(elements_.begin(), elements_.end());
    if (!set.count(identity_of(m))) fail("identity missing");
    for (const auto& a : elements_) {
        if (!set.count(inverse_element(a))) fail("inverse missing");
        for (const auto& b : elements_)
            if (!set.count(compose_elements(a, b))) fail("composition escapes the set");
    }
    out.report = os.str();
    return out;
}

PointRef IsometricAction::apply(const GroupElement& s, const PointRef& p) const {
    if (p.is_vertex()) return PointRef::at_vertex(s.vperm[p.vertex]);
    int ie = s.eperm[p.edge];
    Rat t = s.eflip[p.edge] ? g_->model().edges[p.edge].length - p.offset : p.offset;
    return PointRef::on_edge(ie, t);
}

Divisor IsometricAction::apply_divisor(const GroupElement& s, const Divisor& d) const {
    Divisor out(g_);
    for (auto& [p, c] : d.coeffs()) out.add(apply(s, p), c);
    return out;
}

PLFunction IsometricAction::compose(const PLFunction& f, const GroupElement& s) const {
    // g(x) = f(s(x)): the profile of g on edge e comes from f on s(e)
    const Model& m = g_->model();
    std::vector<std::vector<std::pair<Rat, Rat>>> profiles(m.edges.size());
    for (size_t e = 0; e < m.edges.size(); ++e) {
        int ie = s.eperm[e];
        auto pf = f.profile(ie);
        const Rat& len = m.edges[e].length;
        auto& pr = profiles[e];
        if (!s.eflip[e]) {
            pr = pf;
        } else {
            for (auto it = pf.rbegin(); it != pf.rend(); ++it) pr.emplace_back(len - it->first, it->second);
        }
    }
    return PLFunction::from_profiles(g_, std::move(profiles));
}

ClosedSubgraph IsometricAction::apply_subgraph(const GroupElement& s, const ClosedSubgraph& sub) const {
    ClosedSubgraph out(g_);
    const Model& m = g_->model();
    for (size_t v = 0; v < sub.vertex_set().size(); ++v)
        if (sub.vertex_set()[v]) out.add_vertex(s.vperm[v]);
    for (size_t e = 0; e < sub.intervals().size(); ++e) {
        int ie = s.eperm[e];
        const Rat& len = m.edges[e].length;
        for (auto& [a, b] : sub.intervals()[e]) {
            if (s.eflip[e])
                out.add_interval(ie, len - b, len - a);
            else
                out.add_interval(ie, a, b);
        }
    }
    out.normalize();
    return out;
}

bool IsometricAction::maps_subgraph_to(const ClosedSubgraph& a, const ClosedSubgraph& b) const {
    for (const auto& s : elements_)
        if (apply_subgraph(s, a) == b) return true;
    return false;
}

std::vector<PointRef> IsometricAction::orbit(const PointRef& p) const {
    std::set<PointRef> o;
    for (const auto& s : elements_) o.insert(apply(s, p));
    return {o.begin(), o.end()};
}

long IsometricAction::stabilizer_order(const PointRef& p) const {
    long k = 0;
    for (const auto& s : elements_)
        if (apply(s, p) == p) ++k;
    return k;
}

long IsometricAction::edge_stabilizer_order(int e) const {
    long k = 0;
    for (const auto& s : elements_)
        if (s.eperm[e] == e) ++k;
    return k;
}

bool IsometricAction::edge_reversed(int e) const {
    for (const auto& s : elements_)
        if (s.eperm[e] == e && s.eflip[e]) return true;
    return false;
}

bool IsometricAction::is_invariant(const Divisor& d) const {
    for (const auto& s : elements_)
        if (apply_divisor(s, d) != d) return false;
    return true;
}

bool IsometricAction::is_invariant(const PLFunction& f) const {
    for (const auto& s : elements_)
        if (compose(f, s) != f) return false;
    return true;
}

bool IsometricAction::is_invariant_subgraph(const ClosedSubgraph& sub) const {
    for (const auto& s : elements_)
        if (!(apply_subgraph(s, sub) == sub)) return false;
    return true;
}

// --- full isometry group by backtracking ---

IsometricAction IsometricAction::full_isometry_group(GraphPtr g, const ScaleGuard& guard) {
    const Model& m = g->model();
    size_t nv = m.vertices.size(), ne = m.edges.size();
    std::vector<GroupElement> found;

    // group edges by unordered endpoints + length for matching
    auto edge_class = [&](int e, const std::vector<int>& vperm) {
        const auto& ed = m.edges[e];
        int a = vperm.empty() ? ed.u : vperm[ed.u];
        int b = vperm.empty() ? ed.v : vperm[ed.v];
        if (a > b) std::swap(a, b);
        return std::tuple<int, int, std::string>(a, b, ed.length.str());
    };

    std::vector<int> vperm(nv, -1);
    std::vector<char> vused(nv, 0);

    std::function<void(size_t)> rec = [&](size_t v) {
        if (v == nv) {
            // vertex map fixed; match edges class by class
            std::map<std::tuple<int, int, std::string>, std::vector<int>> src_classes, dst_classes;
            for (size_t e = 0; e < ne; ++e) {
                src_classes[edge_class(static_cast<int>(e), vperm)].push_back(static_cast<int>(e));
                dst_classes[edge_class(static_cast<int>(e), {})].push_back(static_cast<int>(e));
            }
            for (auto& [k, list] : src_classes)
                if (dst_classes[k].size() != list.size()) return;
            // backtrack over per-class bijections and loop flips
            std::vector<int> eperm(ne, -1);
            std::vector<char> eflip(ne, 0);
            std::function<void(std::map<std::tuple<int, int, std::string>, std::vector<int>>::iterator, size_t)>
                erec = [&](auto cls, size_t pos) {
                    if (cls == src_classes.end()) {
                        GroupElement el;
                        el.vperm = vperm;
                        el.eperm = eperm;
                        el.eflip = eflip;
                        found.push_back(el);
                        if (static_cast<long>(found.size()) > guard.max_group_order)
                            throw ScaleGuardError("isometry group exceeds guard");
                        return;
                    }
                    auto& srcs = cls->second;
                    auto& dsts = dst_classes[cls->first];
                    if (pos == srcs.size()) {
                        auto nxt = cls;
                        ++nxt;
                        erec(nxt, 0);
                        return;
                    }
                    int e = srcs[pos];
                    const auto& ed = m.edges[e];
                    for (int cand : dsts) {
                        bool taken = false;
                        for (size_t j = 0; j < pos; ++j)
                            if (eperm[srcs[j]] == cand) taken = true;
                        if (taken) continue;
                        const auto& cd = m.edges[cand];
                        if (ed.is_loop()) {
                            for (int flip : {0, 1}) {
                                eperm[e] = cand;
                                eflip[e] = static_cast<char>(flip);
                                erec(cls, pos + 1);
                            }
                        } else {
                            // orientation forced by the vertex map
                            if (cd.u == vperm[ed.u] && cd.v == vperm[ed.v]) {
                                eperm[e] = cand;
                                eflip[e] = 0;
                                erec(cls, pos + 1);
                            } else if (cd.u == vperm[ed.v] && cd.v == vperm[ed.u]) {
                                eperm[e] = cand;
                                eflip[e] = 1;
                                erec(cls, pos + 1);
                            }
                        }
                    }
                    eperm[e] = -1;
                };
            erec(src_classes.begin(), 0);
            return;
        }
        for (size_t w = 0; w < nv; ++w) {
            if (vused[w]) continue;
            if (m.valence(static_cast<int>(v)) != m.valence(static_cast<int>(w))) continue;
            vperm[v] = static_cast<int>(w);
            vused[w] = 1;
            rec(v + 1);
            vused[w] = 0;
            vperm[v] = -1;
        }
    };
    rec(0);

    IsometricAction a;
    a.g_ = g;
    std::set<GroupElement> uniq(found.begin(), found.end());
    a.elements_.assign(uniq.begin(), uniq.end());
    for (size_t i = 0; i < a.elements_.size(); ++i)
        if (a.elements_[i] == identity_of(m)) a.id_index_ = static_cast<int>(i);
    auto val = a.validate();
    if (!val.ok) throw InputError("full_isometry_group produced an invalid action: " + val.report);
    return a;
}

// --- derived constructions ---

std::vector<PointRef> v1_points(const IsometricAction& a) {
    const Model& m = a.graph()->model();
    std::vector<PointRef> out;
    for (size_t e = 0; e < m.edges.size(); ++e)
        if (a.edge_reversed(static_cast<int>(e)))
            out.push_back(PointRef::on_edge(static_cast<int>(e), m.edges[e].length / Rat(2)));
    for (size_t v = 0; v < m.vertices.size(); ++v) {
        long vstab = a.stabilizer_order(PointRef::at_vertex(static_cast<int>(v)));
        bool in_v1 = false;
        for (size_t e = 0; e < m.edges.size() && !in_v1; ++e) {
            bool incident = m.edges[e].u == static_cast<int>(v) || m.edges[e].v == static_cast<int>(v);
            if (!incident) continue;
            long germ = 0;
            for (const auto& s : a.elements())
                if (s.eperm[e] == static_cast<int>(e) && !s.eflip[e]) ++germ;
            if (germ != vstab) in_v1 = true;
        }
        if (in_v1) out.push_back(PointRef::at_vertex(static_cast<int>(v)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<Divisor, Divisor> invariant_part(const Divisor& D, const IsometricAction& a) {
    if (!D.is_effective()) throw InputError("invariant_part: divisor must be effective");
    Divisor d1(D.graph());
    for (auto& [p, c] : D.coeffs()) {
        long mn = c;
        for (const auto& q : a.orbit(p)) mn = std::min(mn, D.at(q));
        if (mn != 0) d1.set(p, mn);
    }
    return {d1, D - d1};
}

PLFunction symmetrize(const PLFunction& f, const IsometricAction& a) {
    TropElem acc;
    for (const auto& s : a.elements()) acc = tropical_add(acc, TropElem(a.compose(f, s)));
    return *acc;
}

// --- quotient ---

QuotientResult quotient(const IsometricAction& a) {
    GraphPtr g = a.graph();
    const Model& m = g->model();

    // working marks: loopless midpoints, V1 points, then loop-midpoint fixes
    std::set<PointRef> markset;
    for (size_t e = 0; e < m.edges.size(); ++e)
        if (m.edges[e].is_loop())
            markset.insert(PointRef::on_edge(static_cast<int>(e), m.edges[e].length / Rat(2)));
    for (const auto& p : v1_points(a))
        if (!p.is_vertex()) markset.insert(p);

    for (int pass = 0; pass < 8; ++pass) {
        Marking mk(g, {markset.begin(), markset.end()});

        // node orbits
        int NN = mk.num_nodes();
        std::vector<int> node_orbit(NN, -1);
        std::vector<int> orbit_rep;
        for (int i = 0; i < NN; ++i) {
            if (node_orbit[i] >= 0) continue;
            int id = static_cast<int>(orbit_rep.size());
            orbit_rep.push_back(i);
            for (const auto& s : a.elements()) {
                PointRef q = a.apply(s, mk.node_point(i));
                int j = mk.node_of(q);
                if (j < 0) throw InputError("quotient: working model is not invariant");
                node_orbit[j] = id;
            }
        }
        // cell orbits via midpoint transport
        int NC = mk.num_cells();
        std::vector<int> cell_orbit(NC, -1);
        std::vector<int> cell_rep;
        auto cell_image = [&](const GroupElement& s, int ci) {
            const auto& c = mk.cell(ci);
            Rat mid = (c.a + c.b) / Rat(2);
            PointRef q = a.apply(s, PointRef::on_edge(c.edge, mid));
            int node, cell;
            mk.locate(q, node, cell);
            if (cell < 0) throw InputError("quotient: cell image not a cell");
            return cell;
        };
        for (int ci = 0; ci < NC; ++ci) {
            if (cell_orbit[ci] >= 0) continue;
            int id = static_cast<int>(cell_rep.size());
            cell_rep.push_back(ci);
            for (const auto& s : a.elements()) cell_orbit[cell_image(s, ci)] = id;
        }
        // quotient loops force midpoint insertion on the whole orbit
        bool redo = false;
        for (size_t oi = 0; oi < cell_rep.size(); ++oi) {
            const auto& c = mk.cell(cell_rep[oi]);
            if (node_orbit[c.node_a] == node_orbit[c.node_b]) {
                for (int ci = 0; ci < NC; ++ci)
                    if (cell_orbit[ci] == static_cast<int>(oi)) {
                        const auto& cc = mk.cell(ci);
                        markset.insert(PointRef::on_edge(cc.edge, (cc.a + cc.b) / Rat(2)));
                    }
                redo = true;
            }
        }
        if (redo) continue;

        // quotient model
        Model qm;
        for (size_t oi = 0; oi < orbit_rep.size(); ++oi)
            qm.vertices.push_back(point_name(m, mk.node_point(orbit_rep[oi])));
        std::vector<long> stab(cell_rep.size(), 0);
        for (size_t oi = 0; oi < cell_rep.size(); ++oi) {
            int rep = cell_rep[oi];
            for (const auto& s : a.elements())
                if (cell_image(s, rep) == rep) ++stab[oi];
            const auto& c = mk.cell(rep);
            ModelEdge e;
            e.id = "q" + std::to_string(oi) + "_" + m.edges[c.edge].id;
            e.u = node_orbit[c.node_a];
            e.v = node_orbit[c.node_b];
            e.length = Rat(stab[oi]) * (c.b - c.a);
            qm.edges.push_back(e);
        }
        GraphPtr qg = MetricGraph::canonicalize(qm);

        // target marking: canonical quotient graph marked at suppressed model vertices
        std::vector<PointRef> dmarks;
        for (size_t qv = 0; qv < qm.vertices.size(); ++qv) {
            PointRef cp = qg->from_input(PointRef::at_vertex(static_cast<int>(qv)));
            if (!cp.is_vertex()) dmarks.push_back(cp);
        }
        Marking dmk(qg, dmarks);

        // dst node of a quotient-model vertex; dst cell + orientation of a model edge
        auto dst_node_of = [&](int qv) {
            int node = dmk.node_of(qg->from_input(PointRef::at_vertex(qv)));
            if (node < 0) throw InputError("quotient: target node missing");
            return node;
        };
        std::vector<int> qedge_cell(qm.edges.size(), -1);
        std::vector<char> qedge_fwd(qm.edges.size(), 1);
        for (size_t qe = 0; qe < qm.edges.size(); ++qe) {
            PointRef mid = qg->from_input(PointRef::on_edge(static_cast<int>(qe), qm.edges[qe].length / Rat(2)));
            int node, cell;
            dmk.locate(mid, node, cell);
            if (cell < 0) throw InputError("quotient: target cell missing");
            qedge_cell[qe] = cell;
            // orientation of the model edge within the cell, read off two
            // interior sample images
            PointRef p1 = qg->from_input(PointRef::on_edge(static_cast<int>(qe), qm.edges[qe].length / Rat(4)));
            PointRef p2 = qg->from_input(PointRef::on_edge(static_cast<int>(qe), qm.edges[qe].length * Rat(3, 4)));
            if (p1.is_vertex() || p2.is_vertex() || p1.edge != p2.edge)
                throw InputError("quotient: degenerate target cell");
            qedge_fwd[qe] = static_cast<char>(p1.offset < p2.offset);
        }

        // projection: src cell -> its orbit's quotient edge
        std::vector<int> node_map(NN);
        for (int i = 0; i < NN; ++i) node_map[i] = dst_node_of(node_orbit[i]);
        std::vector<std::vector<std::pair<int, bool>>> paths(NC);
        for (int ci = 0; ci < NC; ++ci) {
            int oi = cell_orbit[ci];
            int qe = oi;
            bool fwd = qedge_fwd[qe] != 0;
            // does this cell's a-end map to the quotient edge's u?
            const auto& c = mk.cell(ci);
            bool a_to_u = node_orbit[c.node_a] == qm.edges[qe].u;
            if (node_orbit[c.node_a] == node_orbit[c.node_b])
                throw InputError("quotient: unexpected loop cell");
            paths[ci] = {{qedge_cell[qe], a_to_u == fwd}};
        }
        MultiMorphism pi = MultiMorphism::build(mk, dmk, node_map, paths);

        QuotientResult out{qg, std::move(pi), {}};
        for (size_t oi = 0; oi < cell_rep.size(); ++oi)
            out.edge_stabilizers.emplace_back(qm.edges[oi].id, stab[oi]);
        return out;
    }
    throw InputError("quotient: loop resolution did not stabilize");
}

GeneratingSet invariant_generators(const Divisor& D, const IsometricAction& a, const ScaleGuard& guard) {
    if (!D.is_effective()) throw InputError("invariant_generators: divisor must be effective");
    auto [d1, d2] = invariant_part(D, a);
    GeneratingSet base = generators(d1, guard);
    std::map<Divisor, PLFunction> uniq;
    for (const auto& f : base.functions) {
        PLFunction s = symmetrize(f, a).anchored();
        uniq.emplace(d1 + s.div(), s);
    }
    GeneratingSet out{D.graph(), D, {}};
    for (auto& [dp, s] : uniq)
        if (is_extremal(s, d1, &a)) out.functions.push_back(s);
    return out;
}

Factorization factor_through_quotient(const MultiMorphism& phi, const IsometricAction& a) {
    Factorization out;
    auto verdict = verify_galois(phi, a);
    if (!verdict.galois) {
        out.report = "phi is not K-Galois: " + verdict.reason;
        return out;
    }
    QuotientResult q = quotient(a);
    const Model& qmod = q.quotient->model();
    const Model& tmod = phi.target()->model();

    // psi on vertices: [x] -> phi(x), via fibers of pi
    std::map<int, PointRef> psi_vertex;  // quotient canonical vertex -> target point
    for (size_t qv = 0; qv < qmod.vertices.size(); ++qv) {
        auto fib = q.projection.fiber(PointRef::at_vertex(static_cast<int>(qv)));
        if (fib.empty()) {
            out.report = "empty pi-fiber";
            return out;
        }
        PointRef img = phi.apply(fib.front());
        for (const auto& x : fib)
            if (phi.apply(x) != img) {
                out.report = "phi not constant on a pi-fiber";
                return out;
            }
        psi_vertex[static_cast<int>(qv)] = img;
        out.vertex_pairs.emplace_back(qmod.vertices[qv], point_name(tmod, img));
    }
    // injectivity on vertices
    std::set<PointRef> images;
    for (auto& [qv, img] : psi_vertex)
        if (!images.insert(img).second) {
            out.report = "psi not injective on vertices";
            return out;
        }
    // edge correspondence with length audit: for each quotient canonical edge,
    // take a pi-fiber sample mid-edge, push through phi, and compare lengths.
    bool scaled = false;
    for (size_t qe = 0; qe < qmod.edges.size(); ++qe) {
        PointRef mid = PointRef::on_edge(static_cast<int>(qe), qmod.edges[qe].length / Rat(2));
        auto fib = q.projection.fiber(mid);
        if (fib.empty()) {
            out.report = "empty pi-fiber mid-edge";
            return out;
        }
        PointRef img = phi.apply(fib.front());
        if (img.is_vertex()) {
            out.report = "psi collapses an edge";
            return out;
        }
        // lengths: quotient edge vs its phi-image edge
        const Rat& lq = qmod.edges[qe].length;
        const Rat& lt = tmod.edges[img.edge].length;
        if (lq == lt) continue;
        if (phi.has_multiplicities()) {
            // quotient lengths carry the stabilizer factor |K_e| that the
            // multiplicity covering stores as m'; compare after scaling
            int node, cell;
            phi.target_marking().locate(img, node, cell);
            long mp = cell >= 0 ? phi.target_multiplicity(cell) : 1;
            if (Rat(mp) * lt == lq) {
                scaled = true;
                continue;
            }
        }
        out.report = "length mismatch on edge " + qmod.edges[qe].id + ": " + lq.str() + " vs " + lt.str();
        return out;
    }
    out.ok = true;
    out.multiplicity_scaled = scaled;
    return out;
}

}  // namespace tropgal

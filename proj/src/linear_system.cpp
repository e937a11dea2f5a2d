#include "tropgal/linear_system.hpp"

#include "tropgal/group_action.hpp"
#include "tropgal/lattice.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace tropgal {

static int lex_least_vertex(const Model& m) {
    int least = 0;
    for (size_t v = 1; v < m.vertices.size(); ++v)
        if (m.vertices[v] < m.vertices[least]) least = static_cast<int>(v);
    return least;
}

bool is_in_R(const Divisor& D, const PLFunction& f) { return (D + f.div()).is_effective(); }

ReducedDivisor reduce(const Divisor& D, const PointRef& q, const ScaleGuard& guard) {
    GraphPtr g = D.graph();
    if (g->model().edges.empty()) {
        return {D, PLFunction::constant(g, Rat(0))};
    }
    Divisor qmark(g);
    qmark.set(q, 1);
    Rat spacing = LatticeGraph::data_spacing(g, {&D, &qmark});
    LatticeGraph lat(g, spacing, guard);
    int qi = lat.index_of(q);
    auto res = lat.q_reduce(lat.to_vector(D), qi);
    return {lat.to_divisor(res.reduced), lat.witness(res.fired)};
}

bool linear_system_nonempty(const Divisor& D, const ScaleGuard& guard) {
    if (D.degree() < 0) return false;
    GraphPtr g = D.graph();
    if (g->model().edges.empty()) return D.is_effective() || D.degree() >= 0;
    PointRef q = PointRef::at_vertex(lex_least_vertex(g->model()));
    return reduce(D, q, guard).reduced.at(q) >= 0;
}

long rank(const Divisor& D, const ScaleGuard& guard) {
    GraphPtr g = D.graph();
    long d = D.degree();
    if (d < 0) return -1;
    if (d > guard.max_degree) throw ScaleGuardError("rank: degree exceeds guard");
    if (g->model().edges.empty()) return d;  // singleton graph

    Rat spacing = LatticeGraph::data_spacing(g, {&D});
    LatticeGraph lat(g, spacing, guard);
    int qi = lex_least_vertex(g->model());
    auto base = lat.q_reduce(lat.to_vector(D), qi);
    if (base.reduced[qi] < 0) return -1;

    // r(D) >= r iff every effective lattice E of degree r keeps |D - E|
    // nonempty; test by depth-first enumeration with warm-started reductions.
    int n = lat.n();
    std::function<bool(int, long, const std::vector<long>&)> all_pass =
        [&](int start, long remaining, const std::vector<long>& reduced_now) -> bool {
        if (remaining == 0) return reduced_now[qi] >= 0;
        for (int i = start; i < n; ++i) {
            std::vector<long> next = reduced_now;
            next[i] -= 1;
            auto rr = lat.q_reduce(std::move(next), qi);
            if (!all_pass(i, remaining - 1, rr.reduced)) return false;
        }
        return true;
    };
    long r = 0;
    while (r < d) {
        if (!all_pass(0, r + 1, base.reduced)) break;
        ++r;
    }
    return r;
}

long riemann_roch_residual(const Divisor& D, const ScaleGuard& guard) {
    GraphPtr g = D.graph();
    Divisor K = Divisor::canonical_divisor(g);
    long lhs = rank(D, guard) - rank(K - D, guard);
    long rhs = D.degree() + 1 - g->genus();
    return lhs - rhs;
}

SpanResult span_membership(const GeneratingSet& F, const PLFunction& f) {
    SpanResult out;
    if (F.functions.empty()) return out;
    TropElem combo;
    for (const auto& fi : F.functions) {
        Rat ci = (f - fi).min_over_graph().first;
        out.coefficients.push_back(ci);
        combo = tropical_add(combo, TropElem(tropical_scale(ci, fi)));
    }
    if (*combo == f) {
        out.member = true;
    } else {
        out.witness = combo->first_difference(f);
        if (!out.witness) out.witness = f.first_difference(*combo);
    }
    return out;
}

std::vector<ClosedSubgraph> complement_components(const GraphPtr& g, const std::vector<PointRef>& pts) {
    std::vector<PointRef> interior;
    std::vector<char> removed_vertex(g->model().vertices.size(), 0);
    for (const auto& p : pts) {
        if (p.is_vertex())
            removed_vertex[p.vertex] = 1;
        else
            interior.push_back(p);
    }
    Marking mk(g, interior);
    std::vector<char> removed_node(mk.num_nodes(), 0);
    for (const auto& p : pts) {
        int node = mk.node_of(p);
        if (node >= 0) removed_node[node] = 1;
    }
    // union-find over cells; join across non-removed nodes
    std::vector<int> parent(mk.num_cells());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (int node = 0; node < mk.num_nodes(); ++node) {
        if (removed_node[node]) continue;
        const auto& inc = mk.node_cells(node);
        for (size_t i = 1; i < inc.size(); ++i) parent[find(inc[i].first)] = find(inc[0].first);
    }
    std::map<int, ClosedSubgraph> comps;
    for (int ci = 0; ci < mk.num_cells(); ++ci) {
        int root = find(ci);
        auto it = comps.find(root);
        if (it == comps.end()) it = comps.emplace(root, ClosedSubgraph(g)).first;
        const auto& c = mk.cell(ci);
        it->second.add_interval(c.edge, c.a, c.b);
    }
    std::vector<ClosedSubgraph> out;
    for (auto& [root, s] : comps) {
        s.normalize();
        out.push_back(std::move(s));
    }
    return out;
}

bool support_has_smooth_cut_set(const GraphPtr& g, const Divisor& effective) {
    std::vector<PointRef> smooth;
    for (auto& [p, c] : effective.coeffs())
        if (g->is_smooth(p)) smooth.push_back(p);
    if (smooth.empty()) return false;
    return complement_components(g, smooth).size() > 1;
}

// --- generators(D): enumeration of S(D) ---

namespace {

struct CellOption {
    long slope;  // departing slope at the cell's a-end
    long kink;   // k >= 1
    Rat t;       // kink offset within the cell, in (0, len)
};

struct GenEnumerator {
    const Marking& mk;
    const Divisor& D0;
    long d;
    GraphPtr g;
    std::map<Divisor, PLFunction>& found;

    int NC, NN;
    std::vector<Rat> cell_len;
    unsigned cmask = 0;

    std::vector<long> slope;     // per non-C cell, departing at a-end
    std::vector<CellOption> copt;  // per cell in C (indexed by cell id via map)
    std::map<int, CellOption> c_assign;

    std::vector<Rat> phi;  // node potentials

    GenEnumerator(const Marking& mk_, const Divisor& D0_, long d_, std::map<Divisor, PLFunction>& found_)
        : mk(mk_), D0(D0_), d(d_), g(mk_.graph()), found(found_) {
        NC = mk.num_cells();
        NN = mk.num_nodes();
        for (int i = 0; i < NC; ++i) cell_len.push_back(mk.cell(i).b - mk.cell(i).a);
    }

    bool complement_connected(unsigned mask) const {
        std::vector<char> seen(NN, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto& [ci, end] : mk.node_cells(v)) {
                if (mask & (1u << ci)) continue;
                const auto& c = mk.cell(ci);
                int w = end == 0 ? c.node_b : c.node_a;
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == NN;
    }

    void run(unsigned mask) {
        cmask = mask;
        // spanning tree of the complement
        std::vector<int> tree_cells;
        std::vector<int> order{0};
        std::vector<char> seen(NN, 0);
        seen[0] = 1;
        std::vector<int> parent_cell(NN, -1), parent_dir(NN, 0);
        for (size_t i = 0; i < order.size(); ++i) {
            int v = order[i];
            for (auto& [ci, end] : mk.node_cells(v)) {
                if (cmask & (1u << ci)) continue;
                const auto& c = mk.cell(ci);
                int w = end == 0 ? c.node_b : c.node_a;
                if (!seen[w]) {
                    seen[w] = 1;
                    parent_cell[w] = ci;
                    parent_dir[w] = end == 0 ? +1 : -1;  // +1: slope applies a->b
                    order.push_back(w);
                    tree_cells.push_back(ci);
                }
            }
        }
        std::vector<char> is_tree(NC, 0);
        for (int ci : tree_cells) is_tree[ci] = 1;

        phi.assign(NN, Rat(0));
        std::vector<long> tslope(tree_cells.size(), 0);
        enumerate_tree(order, parent_cell, parent_dir, is_tree, 1);
    }

    void enumerate_tree(const std::vector<int>& order, const std::vector<int>& parent_cell,
                        const std::vector<int>& parent_dir, const std::vector<char>& is_tree,
                        size_t idx) {
        if (idx == order.size()) {
            finish(is_tree);
            return;
        }
        int v = order[idx];
        int ci = parent_cell[v];
        int base = order[idx == 0 ? 0 : idx - 1];
        (void)base;
        int from = parent_dir[v] > 0 ? mk.cell(ci).node_a : mk.cell(ci).node_b;
        for (long s = -d; s <= d; ++s) {
            // slope s is the departing slope at the a-end; value difference
            // along a->b is s * len
            Rat delta = Rat(s) * cell_len[ci];
            phi[v] = parent_dir[v] > 0 ? phi[from] + delta : phi[from] - delta;
            enumerate_tree(order, parent_cell, parent_dir, is_tree, idx + 1);
        }
    }

    void finish(const std::vector<char>& is_tree) {
        // forced slopes on non-tree complement cells
        std::vector<long> cell_slope(NC, 0);
        for (int ci = 0; ci < NC; ++ci) {
            if (cmask & (1u << ci)) continue;
            const auto& c = mk.cell(ci);
            Rat delta = phi[c.node_b] - phi[c.node_a];
            Rat s = delta / cell_len[ci];
            if (!s.is_integer()) return;
            long sl = s.as_long();
            if (sl < -d || sl > d) return;
            cell_slope[ci] = sl;
        }
        // options per C cell
        std::vector<int> c_cells;
        std::vector<std::vector<CellOption>> options;
        for (int ci = 0; ci < NC; ++ci) {
            if (!(cmask & (1u << ci))) continue;
            const auto& c = mk.cell(ci);
            Rat delta = phi[c.node_b] - phi[c.node_a];
            std::vector<CellOption> opts;
            for (long k = 1; k <= d; ++k) {
                // integers s with s*len < delta < (s+k)*len, |s|,|s+k| <= d
                Rat lo = delta / cell_len[ci] - Rat(k);
                Rat hi = delta / cell_len[ci];
                long s_min = static_cast<long>(lo.floor().get_si()) + 1;
                long s_max = hi.is_integer() ? hi.as_long() - 1 : static_cast<long>(hi.floor().get_si());
                for (long s = std::max(s_min, -d); s <= std::min(s_max, d); ++s) {
                    if (s + k > d) continue;
                    Rat t = cell_len[ci] - (delta - Rat(s) * cell_len[ci]) / Rat(k);
                    opts.push_back({s, k, t});
                }
            }
            if (opts.empty()) return;
            c_cells.push_back(ci);
            options.push_back(std::move(opts));
        }
        // cartesian product over C-cell options
        std::vector<size_t> pick(c_cells.size(), 0);
        while (true) {
            std::map<int, CellOption> cassign;
            for (size_t i = 0; i < c_cells.size(); ++i) cassign[c_cells[i]] = options[i][pick[i]];
            try_candidate(cell_slope, cassign);
            size_t j = 0;
            for (; j < pick.size(); ++j) {
                if (++pick[j] < options[j].size()) break;
                pick[j] = 0;
            }
            if (j == pick.size()) break;
            if (pick.empty()) break;
        }
    }

    void try_candidate(const std::vector<long>& cell_slope, const std::map<int, CellOption>& cassign) {
        // vertex effectivity: n_v = D0(v) + sum of outgoing slopes >= 0
        std::vector<long> nv(NN, 0);
        for (int v = 0; v < NN; ++v) {
            long acc = D0.at(mk.node_point(v));
            for (auto& [ci, end] : mk.node_cells(v)) {
                long out;
                if (cmask & (1u << ci)) {
                    const CellOption& o = cassign.at(ci);
                    out = end == 0 ? o.slope : -(o.slope + o.kink);
                } else {
                    out = end == 0 ? cell_slope[ci] : -cell_slope[ci];
                }
                acc += out;
            }
            if (acc < 0) return;
            nv[v] = acc;
        }
        // assemble the function: profile per canonical edge
        const Model& m = g->model();
        std::vector<std::vector<std::pair<Rat, Rat>>> profiles(m.edges.size());
        for (size_t e = 0; e < m.edges.size(); ++e) {
            auto& pr = profiles[e];
            for (int ci : mk.cells_of_edge(static_cast<int>(e))) {
                const auto& c = mk.cell(ci);
                if (pr.empty()) pr.emplace_back(c.a, phi[c.node_a]);
                if (cmask & (1u << ci)) {
                    const CellOption& o = cassign.at(ci);
                    pr.emplace_back(c.a + o.t, phi[c.node_a] + Rat(o.slope) * o.t);
                }
                pr.emplace_back(c.b, phi[c.node_b]);
            }
        }
        PLFunction f = PLFunction::from_profiles(g, std::move(profiles));
        Divisor Dp = D0 + f.div();
        if (!Dp.is_effective()) return;  // interior marks could go negative
        if (support_has_smooth_cut_set(g, Dp)) return;
        if (found.find(Dp) == found.end()) found.emplace(Dp, f.anchored());
    }
};

}  // namespace

GeneratingSet generators(const Divisor& D, const ScaleGuard& guard) {
    GraphPtr g = D.graph();
    const Model& m = g->model();
    GeneratingSet out{g, D, {}};
    long d = D.degree();
    if (d < 0) throw InputError("generators: negative degree");
    if (d > guard.max_degree) throw ScaleGuardError("generators: degree exceeds guard");
    if (m.edges.empty()) {
        out.functions.push_back(PLFunction::constant(g, Rat(0)));
        return out;
    }
    PointRef q = PointRef::at_vertex(lex_least_vertex(m));
    ReducedDivisor rd = reduce(D, q, guard);
    if (rd.reduced.at(q) < 0) return out;  // |D| empty
    Divisor D0 = rd.reduced;

    std::vector<PointRef> marks;
    for (auto& [p, c] : D0.coeffs())
        if (!p.is_vertex()) marks.push_back(p);
    Marking mk(g, marks);
    if (mk.num_cells() > guard.max_gen_cells)
        throw ScaleGuardError("generators: cell count exceeds guard");
    if (mk.num_cells() >= 31) throw ScaleGuardError("generators: too many cells for mask enumeration");

    std::map<Divisor, PLFunction> found;
    GenEnumerator en(mk, D0, d, found);
    for (unsigned mask = 0; mask < (1u << mk.num_cells()); ++mask) {
        if (static_cast<long>(__builtin_popcount(mask)) > d) continue;
        if (!en.complement_connected(mask)) continue;
        en.run(mask);
    }
    // shift back to R(D): D + div(w + f0) = D0 + div(f0)
    for (auto& [Dp, f0] : found) {
        PLFunction f = rd.witness.is_constant() ? f0 : (rd.witness + f0);
        out.functions.push_back(f.anchored());
    }
    return out;
}

bool is_extremal(const PLFunction& f, const Divisor& D, const IsometricAction* action) {
    GraphPtr g = D.graph();
    Divisor Df = D + f.div();
    if (!Df.is_effective()) throw InputError("is_extremal: f not in R(D)");
    std::vector<PointRef> supp = Df.support();

    // atoms: closures of complement components plus support singletons
    std::vector<ClosedSubgraph> atoms;
    for (auto& c : complement_components(g, supp)) atoms.push_back(c);
    size_t num_comps = atoms.size();
    for (const auto& p : supp) atoms.push_back(ClosedSubgraph::point(g, p));

    // orbit-close the atoms when an action is given
    std::vector<std::vector<int>> groups;
    if (action) {
        std::vector<int> grp(atoms.size(), -1);
        for (size_t i = 0; i < atoms.size(); ++i) {
            if (grp[i] >= 0) continue;
            int id = static_cast<int>(groups.size());
            groups.push_back({static_cast<int>(i)});
            grp[i] = id;
            for (size_t j = i + 1; j < atoms.size(); ++j) {
                if (grp[j] >= 0) continue;
                if (action->maps_subgraph_to(atoms[i], atoms[j])) {
                    grp[j] = id;
                    groups[id].push_back(static_cast<int>(j));
                }
            }
        }
    } else {
        for (size_t i = 0; i < atoms.size(); ++i) groups.push_back({static_cast<int>(i)});
    }

    size_t ng = groups.size();
    if (ng > 20) throw ScaleGuardError("is_extremal: too many regions");

    const Marking mk(g, [&] {
        std::vector<PointRef> interior;
        for (auto& p : supp)
            if (!p.is_vertex()) interior.push_back(p);
        return interior;
    }());

    struct Candidate {
        ClosedSubgraph s;
        unsigned long cellmask = 0, pointmask = 0;
    };
    unsigned long full_cells = (mk.num_cells() >= 64) ? ~0ul : ((1ul << mk.num_cells()) - 1);
    unsigned long full_points = supp.empty() ? 0 : ((1ul << supp.size()) - 1);

    std::vector<Candidate> fireable;
    for (unsigned long sel = 1; sel < (1ul << ng); ++sel) {
        ClosedSubgraph s(g);
        for (size_t gi = 0; gi < ng; ++gi)
            if (sel & (1ul << gi))
                for (int ai : groups[gi]) s = union_of(s, atoms[ai]);
        if (s.is_whole()) continue;  // proper subgraphs only
        if (!can_fire(s, Df)) continue;
        Candidate c{std::move(s), 0, 0};
        for (int ci = 0; ci < mk.num_cells(); ++ci) {
            const auto& cell = mk.cell(ci);
            Rat mid = (cell.a + cell.b) / Rat(2);
            if (c.s.contains(normalize_point(g->model(), cell.edge, mid))) c.cellmask |= (1ul << ci);
        }
        for (size_t pi = 0; pi < supp.size(); ++pi)
            if (c.s.contains(supp[pi])) c.pointmask |= (1ul << pi);
        fireable.push_back(std::move(c));
    }
    for (size_t i = 0; i < fireable.size(); ++i)
        for (size_t j = i; j < fireable.size(); ++j) {
            if ((fireable[i].cellmask | fireable[j].cellmask) != full_cells) continue;
            if ((fireable[i].pointmask | fireable[j].pointmask) != full_points) continue;
            return false;
        }
    return true;
}

}  // namespace tropgal

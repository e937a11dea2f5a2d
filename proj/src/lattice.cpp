#include "tropgal/lattice.hpp"

#include <algorithm>
#include <deque>

namespace tropgal {

static std::vector<PointRef> lattice_marks(const GraphPtr& g, const Rat& spacing) {
    const Model& m = g->model();
    std::vector<PointRef> marks;
    for (size_t e = 0; e < m.edges.size(); ++e) {
        Rat len = m.edges[e].length;
        Rat cells = len / spacing;
        if (!cells.is_integer()) throw InputError("lattice: spacing does not divide edge " + m.edges[e].id);
        long k = cells.as_long();
        for (long i = 1; i < k; ++i)
            marks.push_back(PointRef::on_edge(static_cast<int>(e), spacing * Rat(i)));
    }
    return marks;
}

LatticeGraph::LatticeGraph(GraphPtr g, const Rat& spacing, const ScaleGuard& guard)
    : g_(g), spacing_(spacing), marking_(g, lattice_marks(g, spacing)) {
    const Model& m = g_->model();
    for (size_t e = 0; e < m.edges.size(); ++e) {
        if (m.edges[e].is_loop() && m.edges[e].length / spacing_ < Rat(2))
            throw InputError("lattice: loop edge needs at least two cells");
    }
    if (marking_.num_cells() > guard.max_cells)
        throw ScaleGuardError("lattice: " + std::to_string(marking_.num_cells()) + " cells exceed guard " +
                              std::to_string(guard.max_cells));
    points_.resize(marking_.num_nodes());
    for (int i = 0; i < marking_.num_nodes(); ++i) points_[i] = marking_.node_point(i);
    adj_.assign(points_.size(), {});
    for (int ci = 0; ci < marking_.num_cells(); ++ci) {
        const auto& c = marking_.cell(ci);
        adj_[c.node_a].push_back(c.node_b);
        adj_[c.node_b].push_back(c.node_a);
    }
}

Rat LatticeGraph::data_spacing(const GraphPtr& g, const std::vector<const Divisor*>& divisors) {
    const Model& m = g->model();
    std::vector<Rat> xs;
    for (const auto& e : m.edges) {
        xs.push_back(e.length);
        if (e.is_loop()) xs.push_back(e.length / Rat(2));
    }
    for (const Divisor* d : divisors)
        if (d)
            for (auto& [p, c] : d->coeffs())
                if (!p.is_vertex()) xs.push_back(p.offset);
    return rat_gcd(xs);
}

int LatticeGraph::index_of(const PointRef& p) const { return marking_.node_of(p); }

std::vector<long> LatticeGraph::to_vector(const Divisor& d) const {
    std::vector<long> v(points_.size(), 0);
    for (auto& [p, c] : d.coeffs()) {
        int i = index_of(p);
        if (i < 0) throw InputError("lattice: divisor support off-lattice at " + point_name(g_->model(), p));
        v[i] += c;
    }
    return v;
}

Divisor LatticeGraph::to_divisor(const std::vector<long>& v) const {
    Divisor d(g_);
    for (size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) d.set(points_[i], v[i]);
    return d;
}

LatticeGraph::ReduceResult LatticeGraph::q_reduce(std::vector<long> D, int q) const {
    const size_t n = points_.size();
    std::vector<long> fired(n, 0);

    // hop distances from q
    std::vector<int> hop(n, -1);
    std::deque<int> bfs{q};
    hop[q] = 0;
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop_front();
        for (int w : adj_[v])
            if (hop[w] < 0) {
                hop[w] = hop[v] + 1;
                bfs.push_back(w);
            }
    }

    // Phase 1: clear debt off q by unfiring the level sets farthest-first.
    long guard = 2000000;
    while (true) {
        int worst = -1;
        for (size_t v = 0; v < n; ++v)
            if (static_cast<int>(v) != q && D[v] < 0 && (worst < 0 || hop[v] > hop[worst]))
                worst = static_cast<int>(v);
        if (worst < 0) break;
        if (--guard < 0) throw InputError("q_reduce: phase 1 did not terminate");
        int k = hop[worst];
        // unfire A = {hop >= k}: chips cross into A over boundary edges
        for (size_t v = 0; v < n; ++v) {
            if (hop[v] < k) continue;
            fired[v] -= 1;
            for (int w : adj_[v])
                if (hop[w] < k) {
                    D[v] += 1;
                    D[w] -= 1;
                }
        }
    }

    // Phase 2: Dhar burning from q; fire the unburnt set until all burns.
    guard = 2000000;
    while (true) {
        std::vector<char> burnt(n, 0);
        burnt[q] = 1;
        bool grew = true;
        while (grew) {
            grew = false;
            for (size_t v = 0; v < n; ++v) {
                if (burnt[v]) continue;
                long burning = 0;
                for (int w : adj_[v])
                    if (burnt[w]) ++burning;
                if (burning > D[v]) {
                    burnt[v] = 1;
                    grew = true;
                }
            }
        }
        bool all = true;
        for (char c : burnt)
            if (!c) {
                all = false;
                break;
            }
        if (all) break;
        if (--guard < 0) throw InputError("q_reduce: phase 2 did not terminate");
        for (size_t v = 0; v < n; ++v) {
            if (burnt[v]) continue;
            fired[v] += 1;
            for (int w : adj_[v])
                if (burnt[w]) {
                    D[v] -= 1;
                    D[w] += 1;
                }
        }
    }
    return {std::move(D), std::move(fired)};
}

PLFunction LatticeGraph::witness(const std::vector<long>& fired) const {
    std::vector<Rat> vals(points_.size());
    for (size_t i = 0; i < points_.size(); ++i) vals[i] = spacing_ * Rat(fired[i]);
    return PLFunction::interpolate(marking_, vals).anchored();
}

}  // namespace tropgal

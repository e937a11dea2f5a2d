#include "tropgal/pl_function.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

namespace tropgal {

PLFunction PLFunction::constant(GraphPtr g, Rat c) {
    PLFunction f;
    f.g_ = std::move(g);
    f.vertex_values_.assign(f.g_->model().vertices.size(), c);
    f.interior_.resize(f.g_->model().edges.size());
    return f;
}

PLFunction PLFunction::from_profiles(GraphPtr g, std::vector<std::vector<std::pair<Rat, Rat>>> profiles) {
    const Model& m = g->model();
    PLFunction f;
    f.g_ = g;
    f.vertex_values_.assign(m.vertices.size(), Rat(0));
    std::vector<char> seen(m.vertices.size(), 0);
    f.interior_.assign(m.edges.size(), {});
    if (profiles.size() != m.edges.size()) throw InputError("pl: profile count mismatch");
    for (size_t e = 0; e < m.edges.size(); ++e) {
        auto& pr = profiles[e];
        const auto& ed = m.edges[e];
        if (pr.size() < 2 || !pr.front().first.is_zero() || pr.back().first != ed.length)
            throw InputError("pl: profile must span the edge");
        auto set_vertex = [&](int v, const Rat& val) {
            if (seen[v] && f.vertex_values_[v] != val)
                throw InputError("pl: discontinuous at vertex " + m.vertices[v]);
            f.vertex_values_[v] = val;
            seen[v] = 1;
        };
        set_vertex(ed.u, pr.front().second);
        set_vertex(ed.v, pr.back().second);
        for (size_t i = 1; i + 1 < pr.size(); ++i) f.interior_[e].push_back(pr[i]);
    }
    for (size_t v = 0; v < m.vertices.size(); ++v)
        if (!seen[v] && !m.edges.empty()) throw InputError("pl: vertex value missing");
    f.normalize();
    f.validate();
    return f;
}

PLFunction PLFunction::interpolate(const Marking& mk, const std::vector<Rat>& node_values) {
    const Model& m = mk.graph()->model();
    std::vector<std::vector<std::pair<Rat, Rat>>> profiles(m.edges.size());
    for (size_t e = 0; e < m.edges.size(); ++e) {
        for (int ci : mk.cells_of_edge(static_cast<int>(e))) {
            const auto& c = mk.cell(ci);
            if (profiles[e].empty()) profiles[e].emplace_back(c.a, node_values[c.node_a]);
            profiles[e].emplace_back(c.b, node_values[c.node_b]);
        }
    }
    return from_profiles(mk.graph(), std::move(profiles));
}

void PLFunction::normalize() {
    const Model& m = g_->model();
    for (size_t e = 0; e < m.edges.size(); ++e) {
        auto& br = interior_[e];
        std::sort(br.begin(), br.end());
        std::vector<std::pair<Rat, Rat>> out;
        auto full = [&](size_t i) -> std::pair<Rat, Rat> {
            if (i == 0) return {Rat(0), vertex_values_[m.edges[e].u]};
            if (i == br.size() + 1) return {m.edges[e].length, vertex_values_[m.edges[e].v]};
            return br[i - 1];
        };
        for (size_t i = 1; i <= br.size(); ++i) {
            auto [t0, v0] = full(i - 1);
            auto [t1, v1] = full(i);
            auto [t2, v2] = full(i + 1);
            if (!out.empty()) {
                t0 = out.back().first;
                v0 = out.back().second;
            }
            if (t1 == t0) {
                if (v1 != v0) throw InputError("pl: duplicate breakpoint with conflicting values");
                continue;
            }
            // keep unless collinear with neighbors
            Rat s0 = (v1 - v0) / (t1 - t0);
            Rat s1 = (v2 - v1) / (t2 - t1);
            if (s0 != s1) out.push_back({t1, v1});
        }
        br = std::move(out);
    }
}

void PLFunction::validate() const {
    const Model& m = g_->model();
    for (size_t e = 0; e < m.edges.size(); ++e) {
        auto pr = profile(static_cast<int>(e));
        for (size_t i = 1; i < pr.size(); ++i) {
            Rat slope = (pr[i].second - pr[i - 1].second) / (pr[i].first - pr[i - 1].first);
            if (!slope.is_integer())
                throw InputError("pl: non-integer slope " + slope.str() + " on edge " + m.edges[e].id);
        }
    }
}

std::vector<std::pair<Rat, Rat>> PLFunction::profile(int e) const {
    const auto& ed = g_->model().edges[e];
    std::vector<std::pair<Rat, Rat>> pr;
    pr.emplace_back(Rat(0), vertex_values_[ed.u]);
    for (auto& b : interior_[e]) pr.push_back(b);
    pr.emplace_back(ed.length, vertex_values_[ed.v]);
    return pr;
}

Rat PLFunction::evaluate(const PointRef& p) const {
    if (p.is_vertex()) return vertex_values_[p.vertex];
    auto pr = profile(p.edge);
    for (size_t i = 1; i < pr.size(); ++i) {
        if (p.offset <= pr[i].first) {
            const Rat& t0 = pr[i - 1].first;
            const Rat& v0 = pr[i - 1].second;
            Rat slope = (pr[i].second - v0) / (pr[i].first - t0);
            return v0 + slope * (p.offset - t0);
        }
    }
    throw InputError("pl: evaluate out of range");
}

std::vector<PointRef> PLFunction::breakpoints() const {
    std::vector<PointRef> out;
    for (size_t e = 0; e < interior_.size(); ++e)
        for (auto& [t, v] : interior_[e]) out.push_back(PointRef::on_edge(static_cast<int>(e), t));
    return out;
}

std::vector<PointRef> PLFunction::structural_points() const {
    std::vector<PointRef> out;
    for (size_t v = 0; v < vertex_values_.size(); ++v) out.push_back(PointRef::at_vertex(static_cast<int>(v)));
    auto br = breakpoints();
    out.insert(out.end(), br.begin(), br.end());
    return out;
}

Rat PLFunction::outgoing_slope_vertex(int v, int edge, int end) const {
    auto pr = profile(edge);
    if (end == 0) {
        Rat s = (pr[1].second - pr[0].second) / (pr[1].first - pr[0].first);
        return s;
    }
    size_t n = pr.size();
    Rat s = (pr[n - 2].second - pr[n - 1].second) / (pr[n - 1].first - pr[n - 2].first);
    return s;
}

Rat PLFunction::outgoing_slope_interior(int edge, const Rat& t, int direction) const {
    auto pr = profile(edge);
    for (size_t i = 1; i < pr.size(); ++i) {
        Rat slope = (pr[i].second - pr[i - 1].second) / (pr[i].first - pr[i - 1].first);
        if (direction > 0 && t >= pr[i - 1].first && t < pr[i].first) return slope;
        if (direction < 0 && t > pr[i - 1].first && t <= pr[i].first) return -slope;
    }
    throw InputError("pl: slope query out of range");
}

long PLFunction::ord_at(const PointRef& p) const {
    const Model& m = g_->model();
    Rat total(0);
    if (p.is_vertex()) {
        for (size_t e = 0; e < m.edges.size(); ++e) {
            if (m.edges[e].u == p.vertex) total += outgoing_slope_vertex(p.vertex, static_cast<int>(e), 0);
            if (m.edges[e].v == p.vertex) total += outgoing_slope_vertex(p.vertex, static_cast<int>(e), 1);
        }
    } else {
        total = outgoing_slope_interior(p.edge, p.offset, +1) + outgoing_slope_interior(p.edge, p.offset, -1);
    }
    return total.as_long();
}

Divisor PLFunction::div() const {
    Divisor d(g_);
    const Model& m = g_->model();
    for (size_t v = 0; v < m.vertices.size(); ++v) {
        long o = ord_at(PointRef::at_vertex(static_cast<int>(v)));
        if (o != 0) d.set(PointRef::at_vertex(static_cast<int>(v)), o);
    }
    for (size_t e = 0; e < m.edges.size(); ++e)
        for (auto& [t, val] : interior_[e]) {
            long o = ord_at(PointRef::on_edge(static_cast<int>(e), t));
            if (o != 0) d.set(PointRef::on_edge(static_cast<int>(e), t), o);
        }
    return d;
}

PLFunction PLFunction::add_constant(const Rat& c) const {
    PLFunction f = *this;
    for (auto& v : f.vertex_values_) v += c;
    for (auto& br : f.interior_)
        for (auto& [t, val] : br) val += c;
    return f;
}

PLFunction PLFunction::negate() const {
    PLFunction f = *this;
    for (auto& v : f.vertex_values_) v = -v;
    for (auto& br : f.interior_)
        for (auto& [t, val] : br) val = -val;
    return f;
}

PLFunction pointwise(const PLFunction& f, const PLFunction& g,
                     const std::function<Rat(const Rat&, const Rat&)>& op, bool insert_crossings) {
    if (f.g_ != g.g_ && f.g_->model().edges.size() != g.g_->model().edges.size())
        throw InputError("pl: pointwise op on different graphs");
    const Model& m = f.g_->model();
    std::vector<std::vector<std::pair<Rat, Rat>>> profiles(m.edges.size());
    for (size_t e = 0; e < m.edges.size(); ++e) {
        auto pf = f.profile(static_cast<int>(e));
        auto pg = g.profile(static_cast<int>(e));
        std::set<Rat> offs;
        for (auto& [t, v] : pf) offs.insert(t);
        for (auto& [t, v] : pg) offs.insert(t);
        if (insert_crossings) {
            std::vector<Rat> base(offs.begin(), offs.end());
            for (size_t i = 1; i < base.size(); ++i) {
                PointRef a = normalize_point(m, static_cast<int>(e), base[i - 1]);
                PointRef b = normalize_point(m, static_cast<int>(e), base[i]);
                Rat fa = f.evaluate(a) - g.evaluate(a);
                Rat fb = f.evaluate(b) - g.evaluate(b);
                if (fa.sign() * fb.sign() < 0) {
                    // linear crossing inside the open cell
                    Rat t = base[i - 1] + (base[i] - base[i - 1]) * (-fa) / (fb - fa);
                    offs.insert(t);
                }
            }
        }
        for (const Rat& t : offs) {
            PointRef p = normalize_point(m, static_cast<int>(e), t);
            profiles[e].emplace_back(t, op(f.evaluate(p), g.evaluate(p)));
        }
    }
    return PLFunction::from_profiles(f.g_, std::move(profiles));
}

PLFunction operator+(const PLFunction& f, const PLFunction& g) {
    return pointwise(f, g, [](const Rat& a, const Rat& b) { return a + b; }, false);
}

PLFunction operator-(const PLFunction& f, const PLFunction& g) {
    return pointwise(f, g, [](const Rat& a, const Rat& b) { return a - b; }, false);
}

PLFunction tropical_add(const PLFunction& f, const PLFunction& g) {
    return pointwise(f, g, [](const Rat& a, const Rat& b) { return max(a, b); }, true);
}

TropElem tropical_add(const TropElem& f, const TropElem& g) {
    if (!f) return g;
    if (!g) return f;
    return tropical_add(*f, *g);
}

PLFunction tropical_scale(const Rat& c, const PLFunction& f) { return f.add_constant(c); }

TropElem tropical_scale(const Rat& c, const TropElem& f) {
    if (!f) return std::nullopt;  // bottom absorbs
    return tropical_scale(c, *f);
}

std::pair<Rat, PointRef> PLFunction::min_over_graph() const {
    std::optional<Rat> best;
    PointRef arg;
    const Model& m = g_->model();
    auto consider = [&](const PointRef& p) {
        Rat v = evaluate(p);
        if (!best || v < *best) {
            best = v;
            arg = p;
        }
    };
    for (size_t v = 0; v < m.vertices.size(); ++v) consider(PointRef::at_vertex(static_cast<int>(v)));
    for (size_t e = 0; e < interior_.size(); ++e)
        for (auto& [t, val] : interior_[e]) consider(PointRef::on_edge(static_cast<int>(e), t));
    return {*best, arg};
}

std::pair<Rat, PointRef> PLFunction::max_over_graph() const {
    auto [v, p] = negate().min_over_graph();
    return {-v, p};
}

bool operator==(const PLFunction& f, const PLFunction& g) {
    return f.vertex_values_ == g.vertex_values_ && f.interior_ == g.interior_;
}

bool PLFunction::is_constant() const {
    for (auto& br : interior_)
        if (!br.empty()) return false;
    for (auto& v : vertex_values_)
        if (v != vertex_values_[0]) return false;
    return true;
}

bool PLFunction::equals_mod_constant(const PLFunction& g) const {
    PLFunction d = *this - g;
    return d.is_constant();
}

PLFunction PLFunction::anchored() const {
    const Model& m = g_->model();
    int least = 0;
    for (size_t v = 1; v < m.vertices.size(); ++v)
        if (m.vertices[v] < m.vertices[least]) least = static_cast<int>(v);
    return add_constant(-vertex_values_[least]);
}

std::optional<PointRef> PLFunction::first_difference(const PLFunction& g) const {
    PLFunction d = *this - g;
    const Model& m = g_->model();
    for (size_t v = 0; v < d.vertex_values_.size(); ++v)
        if (!d.vertex_values_[v].is_zero()) return PointRef::at_vertex(static_cast<int>(v));
    for (size_t e = 0; e < d.interior_.size(); ++e)
        for (auto& [t, val] : d.interior_[e])
            if (!val.is_zero()) return PointRef::on_edge(static_cast<int>(e), t);
    return std::nullopt;
}

std::string PLFunction::str() const {
    const Model& m = g_->model();
    std::ostringstream os;
    for (size_t v = 0; v < vertex_values_.size(); ++v)
        os << m.vertices[v] << "=" << vertex_values_[v] << " ";
    for (size_t e = 0; e < interior_.size(); ++e)
        for (auto& [t, val] : interior_[e]) os << m.edges[e].id << "@" << t << "=" << val << " ";
    return os.str();
}

}  // namespace tropgal

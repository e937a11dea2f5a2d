#include "tropgal/morphism.hpp"

#include "tropgal/group_action.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tropgal {

MultiMorphism MultiMorphism::build(Marking src, Marking dst, std::vector<int> node_map,
                                   const std::vector<std::vector<std::pair<int, bool>>>& cell_paths) {
    if (static_cast<int>(node_map.size()) != src.num_nodes())
        throw InputError("morphism: node map size mismatch");
    if (static_cast<int>(cell_paths.size()) != src.num_cells())
        throw InputError("morphism: cell path count mismatch");

    // validate paths and compute dilations
    std::vector<long> dilation(src.num_cells(), 0);
    for (int ci = 0; ci < src.num_cells(); ++ci) {
        const auto& c = src.cell(ci);
        const auto& path = cell_paths[ci];
        int at = node_map[c.node_a];
        Rat total(0);
        for (auto& [tc, fwd] : path) {
            const auto& t = dst.cell(tc);
            if ((fwd ? t.node_a : t.node_b) != at)
                throw InputError("morphism: discontinuous image path");
            at = fwd ? t.node_b : t.node_a;
            total += t.b - t.a;
        }
        if (at != node_map[c.node_b]) throw InputError("morphism: path endpoint mismatch");
        if (path.empty()) {
            dilation[ci] = 0;
        } else {
            Rat k = total / (c.b - c.a);
            if (!k.is_integer() || k.as_long() <= 0)
                throw InputError("morphism: dilation factor " + k.str() + " is not a positive integer");
            dilation[ci] = k.as_long();
        }
    }

    // refinement marks: preimages of intermediate path nodes
    std::vector<PointRef> marks;
    for (int i = 0; i < src.num_nodes(); ++i)
        if (!src.node_point(i).is_vertex()) marks.push_back(src.node_point(i));
    for (int ci = 0; ci < src.num_cells(); ++ci) {
        const auto& c = src.cell(ci);
        const auto& path = cell_paths[ci];
        if (path.size() <= 1) continue;
        Rat acc(0);
        for (size_t k = 0; k + 1 < path.size(); ++k) {
            acc += dst.cell(path[k].first).b - dst.cell(path[k].first).a;
            Rat off = c.a + acc / Rat(dilation[ci]);
            marks.push_back(PointRef::on_edge(c.edge, off));
        }
    }
    Marking fine(src.graph(), marks);

    MultiMorphism phi(fine, dst);
    phi.node_images_.assign(fine.num_nodes(), -1);
    phi.images_.assign(fine.num_cells(), CellImage{});

    // node images: old nodes keep theirs; new nodes take the path node
    for (int i = 0; i < src.num_nodes(); ++i) {
        int ni = fine.node_of(src.node_point(i));
        phi.node_images_[ni] = node_map[i];
    }
    for (int ci = 0; ci < src.num_cells(); ++ci) {
        const auto& c = src.cell(ci);
        const auto& path = cell_paths[ci];
        if (path.empty()) {
            // collapsed: all sub-cells of this cell collapse (no sub-marks added)
            int fci = -1;
            for (int cand : fine.cells_of_edge(c.edge)) {
                const auto& fc = fine.cell(cand);
                if (fc.a >= c.a && fc.b <= c.b) fci = cand;
            }
            if (fci >= 0) phi.images_[fci] = CellImage{-1, true, 0};
            continue;
        }
        // sub-cells of c in offset order
        std::vector<int> subs;
        for (int cand : fine.cells_of_edge(c.edge)) {
            const auto& fc = fine.cell(cand);
            if (fc.a >= c.a && fc.b <= c.b) subs.push_back(cand);
        }
        if (subs.size() != path.size())
            throw InputError("morphism: normalization produced unexpected sub-cell count");
        int at = node_map[c.node_a];
        for (size_t k = 0; k < subs.size(); ++k) {
            auto [tc, fwd] = path[k];
            phi.images_[subs[k]] = CellImage{tc, fwd, dilation[ci]};
            const auto& fc = fine.cell(subs[k]);
            phi.node_images_[fc.node_a] =
                (k == 0) ? at : phi.node_images_[fc.node_a];
            int nxt = fwd ? dst.cell(tc).node_b : dst.cell(tc).node_a;
            phi.node_images_[fc.node_b] = nxt;
            at = nxt;
        }
    }
    for (int v : phi.node_images_)
        if (v < 0) throw InputError("morphism: node image missing");
    phi.validate();
    return phi;
}

MultiMorphism MultiMorphism::identity(GraphPtr g) {
    Marking mk(g, {});
    std::vector<int> node_map(mk.num_nodes());
    for (int i = 0; i < mk.num_nodes(); ++i) node_map[i] = i;
    std::vector<std::vector<std::pair<int, bool>>> paths(mk.num_cells());
    for (int c = 0; c < mk.num_cells(); ++c) paths[c] = {{c, true}};
    return build(mk, mk, node_map, paths);
}

void MultiMorphism::validate() const {
    for (int ci = 0; ci < src_.num_cells(); ++ci) {
        const auto& c = src_.cell(ci);
        const auto& img = images_[ci];
        if (img.target_cell < 0) {
            if (img.dilation != 0) throw InputError("morphism: collapsed cell with dilation");
            if (node_images_[c.node_a] != node_images_[c.node_b])
                throw InputError("morphism: collapsed cell endpoints differ");
            continue;
        }
        const auto& t = dst_.cell(img.target_cell);
        if ((t.b - t.a) != Rat(img.dilation) * (c.b - c.a))
            throw InputError("morphism: dilation does not match lengths");
        int ia = img.forward ? t.node_a : t.node_b;
        int ib = img.forward ? t.node_b : t.node_a;
        if (node_images_[c.node_a] != ia || node_images_[c.node_b] != ib)
            throw InputError("morphism: cell image inconsistent with node images");
    }
}

void MultiMorphism::set_source_multiplicities(std::vector<long> m) {
    if (static_cast<int>(m.size()) != src_.num_cells()) throw InputError("morphism: m size");
    for (long x : m)
        if (x < 1) throw InputError("morphism: multiplicities must be >= 1");
    m_src_ = std::move(m);
    has_mult_ = true;
}

void MultiMorphism::set_target_multiplicities(std::vector<long> m) {
    if (static_cast<int>(m.size()) != dst_.num_cells()) throw InputError("morphism: m' size");
    for (long x : m)
        if (x < 1) throw InputError("morphism: multiplicities must be >= 1");
    m_dst_ = std::move(m);
    has_mult_ = true;
}

bool MultiMorphism::is_finite() const {
    for (const auto& img : images_)
        if (img.dilation == 0) return false;
    return true;
}

PointRef MultiMorphism::apply(const PointRef& p) const {
    int node, cell;
    src_.locate(p, node, cell);
    if (node >= 0) return dst_.node_point(node_images_[node]);
    const auto& c = src_.cell(cell);
    const auto& img = images_[cell];
    if (img.target_cell < 0) return dst_.node_point(node_images_[c.node_a]);
    const auto& t = dst_.cell(img.target_cell);
    Rat local = Rat(img.dilation) * (p.offset - c.a);
    Rat off = img.forward ? t.a + local : t.b - local;
    return normalize_point(dst_.graph()->model(), t.edge, off);
}

std::vector<PointRef> MultiMorphism::fiber(const PointRef& q) const {
    std::set<PointRef> out;
    int node, cell;
    dst_.locate(q, node, cell);
    if (node >= 0) {
        for (int i = 0; i < src_.num_nodes(); ++i)
            if (node_images_[i] == node) out.insert(src_.node_point(i));
    } else {
        const auto& t = dst_.cell(cell);
        for (int ci = 0; ci < src_.num_cells(); ++ci) {
            const auto& img = images_[ci];
            if (img.target_cell != cell) continue;
            const auto& c = src_.cell(ci);
            Rat local = img.forward ? q.offset - t.a : t.b - q.offset;
            Rat off = c.a + local / Rat(img.dilation);
            out.insert(PointRef::on_edge(c.edge, off));
        }
    }
    return {out.begin(), out.end()};
}

namespace {
// target germ key: (cell, end) at a node, or (cell, dir sign) at an interior point
struct GermKey {
    int cell;
    int tag;
    bool operator<(const GermKey& o) const { return cell != o.cell ? cell < o.cell : tag < o.tag; }
};
}  // namespace

MultiMorphism::LocalDegree MultiMorphism::local_degree(const PointRef& p) const {
    LocalDegree out;
    PointRef q = apply(p);
    // enumerate target germs at q
    int qnode, qcell;
    dst_.locate(q, qnode, qcell);
    std::vector<GermKey> target_germs;
    if (qnode >= 0) {
        for (auto& [tc, end] : dst_.node_cells(qnode)) target_germs.push_back({tc, end});
    } else {
        target_germs.push_back({qcell, 2});  // +direction
        target_germs.push_back({qcell, 3});  // -direction
    }
    // source germs at p with their weighted dilations and image germs
    int pnode, pcell;
    src_.locate(p, pnode, pcell);
    std::vector<std::pair<int, int>> src_germs;  // (cell, end or dir-tag)
    if (pnode >= 0) {
        for (auto& [ci, end] : src_.node_cells(pnode)) src_germs.push_back({ci, end});
    } else {
        src_germs.push_back({pcell, 2});
        src_germs.push_back({pcell, 3});
    }
    std::map<GermKey, long> sums;
    for (auto& g : target_germs) sums[g] = 0;
    for (auto& [ci, tag] : src_germs) {
        const auto& img = images_[ci];
        if (img.dilation == 0) continue;  // collapsed germs cover no target germ
        long w = img.dilation;
        if (has_mult_) {
            long ms = source_multiplicity(ci), mt = target_multiplicity(img.target_cell);
            if (mt % ms != 0) {
                out.report = "multiplicity divisibility fails: m(" +
                             src_.graph()->model().edges[src_.cell(ci).edge].id + ")=" + std::to_string(ms) +
                             " does not divide m'=" + std::to_string(mt);
                return out;
            }
            w *= mt / ms;
        }
        GermKey image;
        if (qnode >= 0) {
            int end = tag <= 1 ? tag : (tag == 2 ? 0 : 1);
            // for interior source germs mapping to a node: impossible in
            // normalized form, but keep the formula uniform
            int img_end = img.forward ? end : 1 - end;
            image = {img.target_cell, img_end};
        } else {
            int dir = tag == 2 ? +1 : -1;
            int img_dir = img.forward ? dir : -dir;
            image = {img.target_cell, img_dir > 0 ? 2 : 3};
        }
        auto it = sums.find(image);
        if (it == sums.end()) {
            out.report = "source germ maps outside the germs at the image point";
            return out;
        }
        it->second += w;
    }
    std::optional<long> deg;
    for (auto& [g, s] : sums) {
        if (!deg) {
            deg = s;
            continue;
        }
        if (s != *deg) {
            std::ostringstream os;
            const Model& dm = dst_.graph()->model();
            os << "inconsistent local degree at " << point_name(src_.graph()->model(), p) << ": germ "
               << dm.edges[dst_.cell(g.cell).edge].id << " sums " << s << " vs " << *deg;
            out.report = os.str();
            return out;
        }
    }
    out.degree = deg ? deg : std::optional<long>(0);
    return out;
}

MultiMorphism::HarmonicReport MultiMorphism::is_harmonic() const {
    HarmonicReport rep;
    if (dst_.graph()->model().edges.empty()) {
        // singleton target: harmonic by convention
        rep.harmonic = true;
        rep.degree = src_.graph()->model().edges.empty() ? 1 : 0;
        return rep;
    }
    for (int i = 0; i < src_.num_nodes(); ++i) {
        auto ld = local_degree(src_.node_point(i));
        if (!ld.degree) {
            rep.report = ld.report;
            return rep;
        }
    }
    rep.harmonic = true;
    if (!is_finite()) return rep;
    // degree: sum of local degrees over the fiber of every target node and one
    // interior sample per target cell
    std::optional<long> deg;
    auto check_fiber = [&](const PointRef& q) -> bool {
        long total = 0;
        for (const auto& x : fiber(q)) {
            auto ld = local_degree(x);
            if (!ld.degree) return false;
            total += *ld.degree;
        }
        if (!deg) deg = total;
        return *deg == total;
    };
    for (int i = 0; i < dst_.num_nodes(); ++i)
        if (!check_fiber(dst_.node_point(i))) {
            rep.report = "degree differs across target points";
            rep.harmonic = true;  // harmonic but not of well-defined degree: report it
            return rep;
        }
    for (int c = 0; c < dst_.num_cells(); ++c) {
        const auto& t = dst_.cell(c);
        Rat mid = (t.a + t.b) / Rat(2);
        if (!check_fiber(normalize_point(dst_.graph()->model(), t.edge, mid))) {
            rep.report = "degree differs at interior sample";
            return rep;
        }
    }
    rep.degree = deg;
    return rep;
}

Divisor MultiMorphism::push_forward(const Divisor& D) const {
    Divisor out(dst_.graph());
    for (auto& [p, c] : D.coeffs()) out.add(apply(p), c);
    return out;
}

Divisor MultiMorphism::pull_back(const Divisor& Dp) const {
    Divisor out(src_.graph());
    for (auto& [q, c] : Dp.coeffs()) {
        for (const auto& x : fiber(q)) {
            auto ld = local_degree(x);
            if (!ld.degree) throw InputError("pull_back: local degree undefined: " + ld.report);
            if (*ld.degree != 0) out.add(x, *ld.degree * c);
        }
    }
    return out;
}

PLFunction MultiMorphism::pull_back(const PLFunction& fp) const {
    const Model& sm = src_.graph()->model();
    std::vector<std::vector<std::pair<Rat, Rat>>> profiles(sm.edges.size());
    for (size_t e = 0; e < sm.edges.size(); ++e) {
        auto& pr = profiles[e];
        for (int ci : src_.cells_of_edge(static_cast<int>(e))) {
            const auto& c = src_.cell(ci);
            const auto& img = images_[ci];
            auto value_at = [&](const Rat& off) {
                PointRef p = normalize_point(sm, c.edge, off);
                return fp.evaluate(apply(p));
            };
            if (pr.empty()) pr.emplace_back(c.a, value_at(c.a));
            if (img.target_cell >= 0) {
                const auto& t = dst_.cell(img.target_cell);
                // pull target breakpoints of fp inside t back into this cell
                for (auto& [tt, tv] : fp.interior_breaks(t.edge)) {
                    if (tt <= t.a || tt >= t.b) continue;
                    Rat local = img.forward ? tt - t.a : t.b - tt;
                    Rat off = c.a + local / Rat(img.dilation);
                    pr.emplace_back(off, tv);
                }
                std::sort(pr.begin(), pr.end());
            }
            pr.emplace_back(c.b, value_at(c.b));
        }
    }
    return PLFunction::from_profiles(src_.graph(), std::move(profiles));
}

PLFunction MultiMorphism::push_forward(const PLFunction& f) const {
    const Model& dm = dst_.graph()->model();
    auto weighted_sum = [&](const PointRef& q) {
        Rat total(0);
        for (const auto& x : fiber(q)) {
            auto ld = local_degree(x);
            if (!ld.degree) throw InputError("push_forward: not harmonic: " + ld.report);
            total += Rat(*ld.degree) * f.evaluate(x);
        }
        return total;
    };
    std::vector<std::vector<std::pair<Rat, Rat>>> profiles(dm.edges.size());
    for (size_t e = 0; e < dm.edges.size(); ++e) {
        auto& pr = profiles[e];
        for (int tc : dst_.cells_of_edge(static_cast<int>(e))) {
            const auto& t = dst_.cell(tc);
            std::set<Rat> offs{t.a, t.b};
            // breakpoints: images of source breakpoints of f inside covering cells
            for (int ci = 0; ci < src_.num_cells(); ++ci) {
                if (images_[ci].target_cell != tc) continue;
                const auto& c = src_.cell(ci);
                for (auto& [st, sv] : f.interior_breaks(c.edge)) {
                    if (st <= c.a || st >= c.b) continue;
                    Rat local = Rat(images_[ci].dilation) * (st - c.a);
                    offs.insert(images_[ci].forward ? t.a + local : t.b - local);
                }
            }
            for (const Rat& off : offs) {
                PointRef q = normalize_point(dm, t.edge, off);
                if (!pr.empty() && pr.back().first == off) continue;
                pr.emplace_back(off, weighted_sum(q));
            }
        }
    }
    return PLFunction::from_profiles(dst_.graph(), std::move(profiles));
}

Divisor MultiMorphism::div_mm(const PLFunction& f) const {
    const Model& sm = src_.graph()->model();
    Divisor out(src_.graph());
    std::set<PointRef> pts;
    for (const auto& p : f.structural_points()) pts.insert(p);
    for (int i = 0; i < src_.num_nodes(); ++i) pts.insert(src_.node_point(i));
    for (const auto& p : pts) {
        Rat acc(0);
        auto weight_of_cell = [&](int ci) {
            long w = 1;
            if (has_mult_) {
                long ms = source_multiplicity(ci);
                long mt = images_[ci].target_cell >= 0 ? target_multiplicity(images_[ci].target_cell) : 0;
                if (images_[ci].target_cell >= 0 && mt % ms != 0)
                    throw InputError("div_mm: divisibility condition fails");
                w = images_[ci].target_cell >= 0 ? mt / ms : 1;
            }
            return w;
        };
        int node, cell;
        src_.locate(p, node, cell);
        if (node >= 0) {
            for (auto& [ci, end] : src_.node_cells(node)) {
                const auto& c = src_.cell(ci);
                Rat slope = end == 0 ? f.outgoing_slope_interior(c.edge, c.a, +1)
                                     : f.outgoing_slope_interior(c.edge, c.b, -1);
                // end offsets at canonical vertices need the vertex germ form
                acc += Rat(weight_of_cell(ci)) * slope;
            }
        } else {
            int ci = cell;
            acc += Rat(weight_of_cell(ci)) *
                   (f.outgoing_slope_interior(src_.cell(ci).edge, p.offset, +1) +
                    f.outgoing_slope_interior(src_.cell(ci).edge, p.offset, -1));
        }
        if (!acc.is_zero()) out.add(p, acc.as_long());
    }
    (void)sm;
    return out;
}

std::string MultiMorphism::str() const {
    std::ostringstream os;
    const Model& smod = src_.graph()->model();
    const Model& dmod = dst_.graph()->model();
    for (int i = 0; i < src_.num_nodes(); ++i)
        os << point_name(smod, src_.node_point(i)) << " -> "
           << point_name(dmod, dst_.node_point(node_images_[i])) << "; ";
    return os.str();
}

// --- Galois verification ---

GaloisVerdict verify_galois(const MultiMorphism& phi, const IsometricAction& action) {
    GaloisVerdict v;
    if (!phi.is_finite()) {
        v.reason = "morphism is not finite (a cell collapses)";
        return v;
    }
    auto rep = phi.is_harmonic();
    if (!rep.harmonic || !rep.degree) {
        v.reason = rep.report.empty() ? "not harmonic" : rep.report;
        return v;
    }
    v.degree = *rep.degree;
    if (v.degree != action.order()) {
        v.reason = "degree " + std::to_string(v.degree) + " differs from group order " +
                   std::to_string(action.order());
        return v;
    }
    if (phi.has_multiplicities()) {
        // the action must preserve multiplicities: sigma(cell) carries equal m
        for (int ci = 0; ci < phi.source_marking().num_cells(); ++ci) {
            const auto& c = phi.source_marking().cell(ci);
            Rat mid = (c.a + c.b) / Rat(2);
            PointRef p = PointRef::on_edge(c.edge, mid);
            for (int s = 0; s < action.order(); ++s) {
                PointRef q = action.apply(action.elements()[s], p);
                int n2, c2;
                phi.source_marking().locate(q, n2, c2);
                if (c2 < 0 || phi.source_multiplicity(c2) != phi.source_multiplicity(ci)) {
                    v.reason = "action does not preserve edge-multiplicities";
                    return v;
                }
            }
        }
    }
    // phi o sigma == phi on a sigma-stable refinement: affine pieces agree once
    // they agree on all refined nodes
    {
        std::vector<PointRef> marks;
        for (int i = 0; i < phi.source_marking().num_nodes(); ++i) {
            const PointRef& p = phi.source_marking().node_point(i);
            for (const auto& el : action.elements()) {
                PointRef q = action.apply(el, p);
                if (!q.is_vertex()) marks.push_back(q);
            }
        }
        Marking stable(phi.source(), marks);
        for (int i = 0; i < stable.num_nodes(); ++i) {
            const PointRef& p = stable.node_point(i);
            PointRef base = phi.apply(p);
            for (const auto& el : action.elements()) {
                if (phi.apply(action.apply(el, p)) != base) {
                    v.reason = "phi o sigma != phi at " + point_name(phi.source()->model(), p);
                    return v;
                }
            }
        }
    }
    // transitivity on fibers: target nodes plus one interior sample per cell
    auto check = [&](const PointRef& q) -> bool {
        GaloisVerdict::FiberRecord rec;
        rec.base = q;
        rec.fiber = phi.fiber(q);
        if (rec.fiber.empty()) {
            v.reason = "empty fiber (target point not in the image)";
            v.fibers.push_back(rec);
            return false;
        }
        std::set<PointRef> orbit;
        for (const auto& el : action.elements()) orbit.insert(action.apply(el, rec.fiber.front()));
        std::set<PointRef> fib(rec.fiber.begin(), rec.fiber.end());
        rec.transitive = (orbit == fib);
        if (!rec.transitive) {
            for (const auto& x : fib)
                if (!orbit.count(x)) {
                    v.witness = {rec.fiber.front(), x};
                    break;
                }
        }
        v.fibers.push_back(rec);
        return rec.transitive;
    };
    const Marking& dmk = phi.target_marking();
    for (int i = 0; i < dmk.num_nodes(); ++i)
        if (!check(dmk.node_point(i))) {
            if (v.reason.empty()) v.reason = "action is not transitive on a fiber";
            return v;
        }
    for (int c = 0; c < dmk.num_cells(); ++c) {
        const auto& t = dmk.cell(c);
        Rat mid = (t.a + t.b) / Rat(2);
        if (!check(normalize_point(phi.target()->model(), t.edge, mid))) {
            if (v.reason.empty()) v.reason = "action is not transitive on a fiber";
            return v;
        }
    }
    v.galois = true;
    return v;
}

}  // namespace tropgal

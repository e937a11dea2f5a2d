#pragma once

// Metric graphs, models, subdivisions and the path metric.
//
// A Model is a finite connected multigraph (loops allowed) with exact positive
// rational edge lengths. A MetricGraph owns the canonical model of the
// underlying metric space (valence-2 points suppressed, one marker vertex kept
// on a circle) plus the subdivision relating it to the model it was built
// from. All points are addressed in canonical coordinates via PointRef.

#include "tropgal/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tropgal {

// Malformed input data (exit code 2 at the CLI).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& m) : std::runtime_error(m) {}
};

// Enumeration-size guard tripped (exit code 3 at the CLI).
struct ScaleGuardError : std::runtime_error {
    explicit ScaleGuardError(const std::string& m) : std::runtime_error(m) {}
};

struct ScaleGuard {
    long max_cells = 4096;       // lattice / subdivision size
    long max_group_order = 256;  // isometry group closure
    long max_degree = 24;        // divisor degree in enumerations
    long max_gen_cells = 24;     // model cells in generator enumeration
    long max_ample_k = 12;       // k search bound in k_ample_witness

    static ScaleGuard from_env();
};

struct ModelEdge {
    std::string id;
    int u = -1, v = -1;
    Rat length;
    bool is_loop() const { return u == v; }
};

struct Model {
    std::vector<std::string> vertices;  // names; index is the vertex id
    std::vector<ModelEdge> edges;

    int vertex_index(const std::string& name) const;
    int edge_index(const std::string& id) const;
    int valence(int v) const;  // loops count twice
    long genus() const { return static_cast<long>(edges.size()) - static_cast<long>(vertices.size()) + 1; }
    bool connected() const;
    bool has_loops() const;
    Rat total_length() const;
    void validate() const;  // nonempty, connected, positive finite lengths, sane indices
};

// A point of a model: either a vertex or a point strictly inside an edge.
struct PointRef {
    int vertex = -1;  // >= 0 iff vertex form
    int edge = -1;
    Rat offset;

    static PointRef at_vertex(int v) { PointRef p; p.vertex = v; return p; }
    static PointRef on_edge(int e, Rat t) { PointRef p; p.edge = e; p.offset = std::move(t); return p; }
    bool is_vertex() const { return vertex >= 0; }

    friend bool operator==(const PointRef& a, const PointRef& b) {
        if (a.is_vertex() != b.is_vertex()) return false;
        if (a.is_vertex()) return a.vertex == b.vertex;
        return a.edge == b.edge && a.offset == b.offset;
    }
    friend bool operator!=(const PointRef& a, const PointRef& b) { return !(a == b); }
    friend bool operator<(const PointRef& a, const PointRef& b) {
        if (a.is_vertex() != b.is_vertex()) return a.is_vertex();
        if (a.is_vertex()) return a.vertex < b.vertex;
        if (a.edge != b.edge) return a.edge < b.edge;
        return a.offset < b.offset;
    }
};

// Endpoint offsets collapse to vertex form; out-of-range offsets are rejected.
PointRef normalize_point(const Model& m, int edge, const Rat& t);
std::string point_name(const Model& m, const PointRef& p);

struct Subdivision {
    Model parent;
    Model child;
    std::vector<int> parent_vertex_in_child;      // parent vertex id -> child vertex id
    std::vector<PointRef> child_vertex_in_parent; // child vertex id -> location on parent
    std::vector<std::vector<int>> edge_pieces;    // parent edge -> ordered child edges, oriented from parent u

    PointRef to_parent(const PointRef& child_pt) const;
    PointRef to_child(const PointRef& parent_pt) const;
};

// Child vertex set = parent vertices plus pts; lengths split exactly.
Subdivision refine(const Model& m, std::vector<PointRef> pts);

// Splits every loop at its midpoint; child has no loops.
Subdivision loopless_subdivision(const Model& m);

class MetricGraph {
public:
    // Builds the canonical model of the metric graph presented by `raw`
    // (valence-2 suppression; a circle keeps its lexicographically-least
    // input vertex as marker).
    static std::shared_ptr<const MetricGraph> canonicalize(const Model& raw);

    const Model& model() const { return canon_; }
    const Model& input_model() const { return over_.child; }
    // The input model as a subdivision of the canonical model.
    const Subdivision& input_subdivision() const { return over_; }

    long genus() const { return canon_.genus(); }
    bool is_circle() const { return circle_; }
    int valence(const PointRef& p) const { return p.is_vertex() ? canon_.valence(p.vertex) : 2; }
    bool is_smooth(const PointRef& p) const { return valence(p) == 2; }
    bool has_valence_one() const;
    int num_vertices() const { return static_cast<int>(canon_.vertices.size()); }
    int num_edges() const { return static_cast<int>(canon_.edges.size()); }
    const Rat& edge_length(int e) const { return canon_.edges[e].length; }

    // Canonical-coordinate point for a point of the input model.
    PointRef from_input(const PointRef& input_pt) const { return over_.to_parent(input_pt); }

    Rat distance(const PointRef& x, const PointRef& y) const;
    Rat vertex_distance(int u, int v) const;
    Rat max_distance_from(const PointRef& x) const;  // eccentricity

    bool applying_canonicalize_is_identity(const Model& m) const;

private:
    MetricGraph() = default;
    Model canon_;
    Subdivision over_;  // parent = canon_, child = input model
    bool circle_ = false;
    mutable std::vector<std::vector<Rat>> vdist_;  // lazy APSP on canonical vertices
    void ensure_vdist() const;
};

using GraphPtr = std::shared_ptr<const MetricGraph>;

// A working model: the canonical model refined at a set of marked points.
// Nodes are canonical vertices followed by interior marks; cells are the
// closed sub-segments between consecutive nodes along each canonical edge.
class Marking {
public:
    Marking(GraphPtr g, const std::vector<PointRef>& marks);

    struct Cell {
        int edge;     // canonical edge
        Rat a, b;     // 0 <= a < b <= length
        int node_a, node_b;
    };

    const GraphPtr& graph() const { return g_; }
    int num_nodes() const { return static_cast<int>(node_points_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    const Cell& cell(int i) const { return cells_[i]; }
    const std::vector<Cell>& cells() const { return cells_; }
    const PointRef& node_point(int i) const { return node_points_[i]; }
    bool node_is_vertex(int i) const { return node_points_[i].is_vertex(); }
    // Node id of a point that is a node; -1 otherwise.
    int node_of(const PointRef& p) const;
    int node_of_vertex(int v) const { return v; }
    // Cells incident to a node, with the end (0 = at cell.a, 1 = at cell.b).
    const std::vector<std::pair<int, int>>& node_cells(int node) const { return node_cells_[node]; }
    // Locates p: if on a node, (node, -1); else (-1, cell) with offset within [a,b].
    void locate(const PointRef& p, int& node, int& cell) const;
    const std::vector<int>& cells_of_edge(int e) const { return edge_cells_[e]; }

    // Standalone model whose vertices are the nodes. Generated vertex names
    // are "<edge-id>@<offset>".
    Model to_model() const;
    // Point of to_model() corresponding to a canonical point.
    PointRef to_model_point(const PointRef& canonical_pt) const;
    PointRef model_point_to_canonical(const PointRef& model_pt) const;

private:
    GraphPtr g_;
    std::vector<PointRef> node_points_;
    std::vector<std::map<Rat, int>> edge_marks_;  // per edge: interior offset -> node id
    std::vector<Cell> cells_;
    std::vector<std::vector<int>> edge_cells_;
    std::vector<std::vector<std::pair<int, int>>> node_cells_;
};

}  // namespace tropgal

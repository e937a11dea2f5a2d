#pragma once

// Continuous piecewise-linear functions with integer slopes on a metric graph,
// stored as a value per canonical vertex plus per-edge interior breakpoints.
// Breakpoint lists are kept minimal (collinear points merged), so structural
// equality is canonical-form equality.

#include "tropgal/divisor.hpp"
#include "tropgal/graph.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace tropgal {

class PLFunction {
public:
    PLFunction() = default;

    static PLFunction constant(GraphPtr g, Rat c);
    // Full per-edge profiles including both endpoints (offset, value); endpoint
    // values must agree across edges at shared vertices, slopes must be
    // integers.
    static PLFunction from_profiles(GraphPtr g, std::vector<std::vector<std::pair<Rat, Rat>>> profiles);
    // Values at the nodes of a marking, linear on cells.
    static PLFunction interpolate(const Marking& mk, const std::vector<Rat>& node_values);

    bool valid() const { return static_cast<bool>(g_); }
    const GraphPtr& graph() const { return g_; }

    Rat evaluate(const PointRef& p) const;
    Rat operator()(const PointRef& p) const { return evaluate(p); }
    const Rat& vertex_value(int v) const { return vertex_values_[v]; }

    // Profile of edge e including endpoints.
    std::vector<std::pair<Rat, Rat>> profile(int e) const;
    // Interior breakpoints of edge e (minimal form).
    const std::vector<std::pair<Rat, Rat>>& interior_breaks(int e) const { return interior_[e]; }
    std::vector<PointRef> breakpoints() const;        // interior kinks
    std::vector<PointRef> structural_points() const;  // vertices + interior kinks

    // Outgoing slope at p along a germ. For a vertex, the germ is (edge, end)
    // with end 0 = the u side, 1 = the v side; for an interior point direction
    // +1 (increasing offset) or -1.
    Rat outgoing_slope_vertex(int v, int edge, int end) const;
    Rat outgoing_slope_interior(int edge, const Rat& t, int direction) const;

    long ord_at(const PointRef& p) const;  // sum of outgoing slopes
    Divisor div() const;                   // principal divisor; degree 0

    PLFunction add_constant(const Rat& c) const;  // tropical scaling
    PLFunction negate() const;

    friend PLFunction pointwise(const PLFunction& f, const PLFunction& g,
                                const std::function<Rat(const Rat&, const Rat&)>& op,
                                bool insert_crossings);
    friend PLFunction operator+(const PLFunction& f, const PLFunction& g);
    friend PLFunction operator-(const PLFunction& f, const PLFunction& g);

    std::pair<Rat, PointRef> min_over_graph() const;
    std::pair<Rat, PointRef> max_over_graph() const;

    friend bool operator==(const PLFunction& f, const PLFunction& g);
    friend bool operator!=(const PLFunction& f, const PLFunction& g) { return !(f == g); }
    bool equals_mod_constant(const PLFunction& g) const;
    bool is_constant() const;

    // Anchors the function to value 0 at the lexicographically-least vertex.
    PLFunction anchored() const;

    // First point where *this and g differ, if any.
    std::optional<PointRef> first_difference(const PLFunction& g) const;

    std::string str() const;

private:
    GraphPtr g_;
    std::vector<Rat> vertex_values_;
    std::vector<std::vector<std::pair<Rat, Rat>>> interior_;
    void normalize();
    void validate() const;
};

// Tropical semimodule operations on R(D)-style functions. The bottom element
// (-infinity) is represented by an disengaged optional, never as a PLFunction.
using TropElem = std::optional<PLFunction>;

PLFunction tropical_add(const PLFunction& f, const PLFunction& g);  // pointwise max
TropElem tropical_add(const TropElem& f, const TropElem& g);
PLFunction tropical_scale(const Rat& c, const PLFunction& f);  // pointwise + c
TropElem tropical_scale(const Rat& c, const TropElem& f);

}  // namespace tropgal

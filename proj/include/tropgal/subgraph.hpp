#pragma once

// Closed subgraphs (compact subsets with finitely many components), chip-firing
// moves CF(S, l) = -min(l, dist(., S)), the can-fire predicate, and the
// decomposition of any rational function into an integer combination of
// chip-firing moves plus a constant.

#include "tropgal/pl_function.hpp"

#include <optional>

namespace tropgal {

class ClosedSubgraph {
public:
    explicit ClosedSubgraph(GraphPtr g);
    static ClosedSubgraph whole(GraphPtr g);
    static ClosedSubgraph point(GraphPtr g, const PointRef& p);

    const GraphPtr& graph() const { return g_; }

    void add_vertex(int v);
    void add_point(const PointRef& p);
    void add_interval(int e, Rat a, Rat b);  // closed [a,b], may be degenerate
    void normalize();

    bool empty() const;
    bool is_whole() const;
    bool contains(const PointRef& p) const;
    // Is the germ of edge `e` at its `end` (0 = u side, 1 = v side) in S?
    bool germ_in(int e, int end) const;

    const std::vector<char>& vertex_set() const { return vertex_in_; }
    const std::vector<std::vector<std::pair<Rat, Rat>>>& intervals() const { return intervals_; }

    struct BoundaryPoint {
        PointRef p;
        int outgoing;  // half-edges leaving S at p
    };
    std::vector<BoundaryPoint> boundary() const;

    // Exact PL distance function dist(., S); slopes lie in {-1, 0, 1}.
    PLFunction distance_function() const;

    friend ClosedSubgraph union_of(const ClosedSubgraph& a, const ClosedSubgraph& b);
    friend bool operator==(const ClosedSubgraph& a, const ClosedSubgraph& b) {
        return a.vertex_in_ == b.vertex_in_ && a.intervals_ == b.intervals_;
    }

    std::string str() const;

private:
    GraphPtr g_;
    std::vector<char> vertex_in_;
    std::vector<std::vector<std::pair<Rat, Rat>>> intervals_;  // per edge, interior-closed, sorted, disjoint
};

// CF(S, l); l = nullopt means the +infinity sentinel (pure negated distance).
PLFunction chip_firing(const ClosedSubgraph& s, const std::optional<Rat>& l);

// True iff every boundary point p of s has D(p) >= half-edges leaving s at p.
bool can_fire(const ClosedSubgraph& s, const Divisor& D);

// {x : f(x) >= c} as a closed subgraph.
ClosedSubgraph superlevel_set(const PLFunction& f, const Rat& c);

struct CFTerm {
    ClosedSubgraph subgraph;
    Rat length;
    long coeff;
};

// f = sum coeff_i * CF(S_i, l_i) + constant, exactly.
std::pair<std::vector<CFTerm>, Rat> decompose_into_chip_firings(const PLFunction& f);

// Re-evaluates a decomposition (for round-trip checks).
PLFunction evaluate_chip_firing_combination(const GraphPtr& g, const std::vector<CFTerm>& terms,
                                            const Rat& constant);

}  // namespace tropgal

#pragma once

// Uniform rational subdivisions of a metric graph and exact q-reduction of
// divisors by Dhar burning on the subdivision. Divisors supported on the
// lattice reduce combinatorially; firing counts convert back into the exact
// piecewise-linear witness function on the metric graph.

#include "tropgal/divisor.hpp"
#include "tropgal/pl_function.hpp"

#include <vector>

namespace tropgal {

class LatticeGraph {
public:
    // `spacing` must divide every edge length; loop edges must receive at
    // least two cells (pass a spacing dividing their half-length).
    LatticeGraph(GraphPtr g, const Rat& spacing, const ScaleGuard& guard = ScaleGuard::from_env());

    // gcd of all edge lengths, loop half-lengths and the interior support
    // offsets of the given divisors; the coarsest exact lattice for them.
    static Rat data_spacing(const GraphPtr& g, const std::vector<const Divisor*>& divisors);

    const GraphPtr& graph() const { return g_; }
    const Rat& spacing() const { return spacing_; }
    int n() const { return static_cast<int>(points_.size()); }
    const PointRef& point_of(int i) const { return points_[i]; }
    int index_of(const PointRef& p) const;  // -1 when off-lattice
    int degree(int i) const { return static_cast<int>(adj_[i].size()); }
    const std::vector<std::vector<int>>& adjacency() const { return adj_; }

    std::vector<long> to_vector(const Divisor& d) const;
    Divisor to_divisor(const std::vector<long>& v) const;

    struct ReduceResult {
        std::vector<long> reduced;
        std::vector<long> fired;  // net set-firing count per lattice vertex; fired[q] = 0
    };
    ReduceResult q_reduce(std::vector<long> D, int q) const;

    // PL function with div(witness) = reduced - original, anchored at 0.
    PLFunction witness(const std::vector<long>& fired) const;

private:
    GraphPtr g_;
    Rat spacing_;
    std::vector<PointRef> points_;
    std::vector<std::vector<int>> adj_;  // neighbor list with multiplicity
    Marking marking_;
};

}  // namespace tropgal

#pragma once

// Finite isometric group actions on metric graphs: validation, orbits and
// stabilizers, V1 points, invariant divisor parts, symmetrization, invariant
// generating sets, the quotient metric graph with its natural projection, and
// the factorization of Galois coverings through the quotient.

#include "tropgal/linear_system.hpp"
#include "tropgal/morphism.hpp"
#include "tropgal/pl_function.hpp"
#include "tropgal/subgraph.hpp"

#include <string>
#include <vector>

namespace tropgal {

// A length-preserving automorphism of the canonical model: vertex and edge
// permutations plus per-edge orientation flags (image traversed reversed).
struct GroupElement {
    std::vector<int> vperm;
    std::vector<int> eperm;
    std::vector<char> eflip;

    friend bool operator==(const GroupElement& a, const GroupElement& b) {
        return a.vperm == b.vperm && a.eperm == b.eperm && a.eflip == b.eflip;
    }
    friend bool operator<(const GroupElement& a, const GroupElement& b) {
        if (a.vperm != b.vperm) return a.vperm < b.vperm;
        if (a.eperm != b.eperm) return a.eperm < b.eperm;
        return a.eflip < b.eflip;
    }
};

class IsometricAction {
public:
    static IsometricAction trivial(GraphPtr g);
    // Closure of the generators under composition; validates every element.
    static IsometricAction generate(GraphPtr g, const std::vector<GroupElement>& gens,
                                    const ScaleGuard& guard = ScaleGuard::from_env());
    // All length-preserving automorphisms of the canonical model, found by
    // backtracking over vertex and edge assignments. On a circle the rotations
    // are excluded by the marker-vertex convention.
    static IsometricAction full_isometry_group(GraphPtr g,
                                               const ScaleGuard& guard = ScaleGuard::from_env());

    const GraphPtr& graph() const { return g_; }
    int order() const { return static_cast<int>(elements_.size()); }
    const std::vector<GroupElement>& elements() const { return elements_; }
    const GroupElement& identity_element() const { return elements_[id_index_]; }

    struct Validation {
        bool ok = true;
        std::string report;
    };
    Validation validate() const;

    GroupElement compose_elements(const GroupElement& a, const GroupElement& b) const;  // a after b
    GroupElement inverse_element(const GroupElement& a) const;
    int element_order(const GroupElement& a) const;
    IsometricAction subgroup(const std::vector<GroupElement>& gens) const;

    PointRef apply(const GroupElement& s, const PointRef& p) const;
    Divisor apply_divisor(const GroupElement& s, const Divisor& d) const;
    PLFunction compose(const PLFunction& f, const GroupElement& s) const;  // x -> f(s(x))
    ClosedSubgraph apply_subgraph(const GroupElement& s, const ClosedSubgraph& sub) const;
    bool maps_subgraph_to(const ClosedSubgraph& a, const ClosedSubgraph& b) const;

    std::vector<PointRef> orbit(const PointRef& p) const;
    long stabilizer_order(const PointRef& p) const;
    long edge_stabilizer_order(int e) const;  // setwise stabilizer
    bool edge_reversed(int e) const;          // some element maps e to itself reversed

    bool is_invariant(const Divisor& d) const;
    bool is_invariant(const PLFunction& f) const;
    bool is_invariant_subgraph(const ClosedSubgraph& s) const;

private:
    GraphPtr g_;
    std::vector<GroupElement> elements_;
    int id_index_ = 0;
};

// Points whose stabilizer differs from that of some point in every
// neighborhood: midpoints of reversed edges plus vertices where an incident
// edge-germ stabilizer is strictly smaller than the vertex stabilizer.
std::vector<PointRef> v1_points(const IsometricAction& a);

// D1 = pointwise orbit minimum (the maximal invariant part), D2 = D - D1.
std::pair<Divisor, Divisor> invariant_part(const Divisor& D, const IsometricAction& a);

// Pointwise tropical sum of f over the orbit: max over sigma of f(sigma(x)).
PLFunction symmetrize(const PLFunction& f, const IsometricAction& a);

struct QuotientResult {
    GraphPtr quotient;
    MultiMorphism projection;  // source -> quotient, deg_e = |K_e|
    std::vector<std::pair<std::string, long>> edge_stabilizers;  // quotient edge id -> |K_e|
};

QuotientResult quotient(const IsometricAction& a);

// Symmetrized generators of R(D1) with non-extremal members pruned; generates
// R(D)^K = R(D1)^K.
GeneratingSet invariant_generators(const Divisor& D, const IsometricAction& a,
                                   const ScaleGuard& guard = ScaleGuard::from_env());

// psi with phi = psi o pi for a verified K-Galois phi; literal isometry for
// plain coverings, multiplicity-scaled identification otherwise.
Factorization factor_through_quotient(const MultiMorphism& phi, const IsometricAction& a);

}  // namespace tropgal

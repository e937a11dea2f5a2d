#pragma once

// R(D) machinery: membership, q-reduced divisors, Baker-Norine rank, span
// membership with certificates, the generating set S(D) of HMY type, and the
// extremality test via fireable covers.

#include "tropgal/divisor.hpp"
#include "tropgal/pl_function.hpp"
#include "tropgal/subgraph.hpp"

#include <optional>
#include <vector>

namespace tropgal {

class IsometricAction;  // group_action.hpp

struct GeneratingSet {
    GraphPtr graph;
    Divisor divisor;                   // the D of R(D)
    std::vector<PLFunction> functions; // anchored to 0 at the lexicographically-least vertex
};

// True iff D + div(f) is effective.
bool is_in_R(const Divisor& D, const PLFunction& f);

struct ReducedDivisor {
    Divisor reduced;
    PLFunction witness;  // D + div(witness) = reduced
};

// The unique q-reduced divisor linearly equivalent to D.
ReducedDivisor reduce(const Divisor& D, const PointRef& q,
                      const ScaleGuard& guard = ScaleGuard::from_env());

// |D| nonempty iff the q-reduced form is effective at q.
bool linear_system_nonempty(const Divisor& D, const ScaleGuard& guard = ScaleGuard::from_env());

// Baker-Norine rank of D on the metric graph.
long rank(const Divisor& D, const ScaleGuard& guard = ScaleGuard::from_env());

// r(D) - r(K - D) - (deg D + 1 - g); zero by the Riemann-Roch theorem.
long riemann_roch_residual(const Divisor& D, const ScaleGuard& guard = ScaleGuard::from_env());

struct SpanResult {
    bool member = false;
    std::vector<Rat> coefficients;      // c_i = min over the graph of (f - f_i)
    std::optional<PointRef> witness;    // point where max_i(c_i + f_i) != f
};

// f in the tropical span of F, with certificate.
SpanResult span_membership(const GeneratingSet& F, const PLFunction& f);

// S(D): every f in R(D) (mod constants) whose D + div(f) has one support
// position per model cell, no smooth cut set in its support. Generates R(D).
GeneratingSet generators(const Divisor& D, const ScaleGuard& guard = ScaleGuard::from_env());

// No two proper (K-invariant) closed subgraphs covering the graph can both
// fire on D + div(f).
bool is_extremal(const PLFunction& f, const Divisor& D, const IsometricAction* action = nullptr);

// Connected components of the graph minus a finite point set, as closed
// subgraphs (closures), plus helper for smooth-cut-set checks.
std::vector<ClosedSubgraph> complement_components(const GraphPtr& g, const std::vector<PointRef>& pts);
bool support_has_smooth_cut_set(const GraphPtr& g, const Divisor& effective);

}  // namespace tropgal

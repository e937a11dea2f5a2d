#pragma once

// Morphisms of metric graphs: per-cell dilations between working models,
// local/global degrees (with optional edge-multiplicities), push-forward and
// pull-back of divisors and functions, and K-Galois covering verification.

#include "tropgal/divisor.hpp"
#include "tropgal/pl_function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tropgal {

class IsometricAction;

class MultiMorphism {
public:
    struct CellImage {
        int target_cell = -1;  // -1 iff collapsed to a vertex
        bool forward = true;
        long dilation = 0;  // deg_e; 0 iff collapsed
    };

    // Builds and normalizes a morphism. `cell_paths[c]` lists the directed
    // target cells traversed by source cell c (empty = collapsed); the source
    // marking is refined until every source cell maps onto exactly one target
    // cell by an integer dilation.
    static MultiMorphism build(Marking src, Marking dst, std::vector<int> node_map,
                               const std::vector<std::vector<std::pair<int, bool>>>& cell_paths);

    static MultiMorphism identity(GraphPtr g);

    const GraphPtr& source() const { return src_.graph(); }
    const GraphPtr& target() const { return dst_.graph(); }
    const Marking& source_marking() const { return src_; }
    const Marking& target_marking() const { return dst_; }
    const std::vector<CellImage>& cell_images() const { return images_; }
    int node_image(int src_node) const { return node_images_[src_node]; }

    // Optional edge-multiplicities (per marking cell; defaults to 1).
    void set_source_multiplicities(std::vector<long> m);
    void set_target_multiplicities(std::vector<long> m);
    bool has_multiplicities() const { return has_mult_; }
    long source_multiplicity(int src_cell) const { return m_src_.empty() ? 1 : m_src_[src_cell]; }
    long target_multiplicity(int dst_cell) const { return m_dst_.empty() ? 1 : m_dst_[dst_cell]; }

    bool is_finite() const;  // no collapsed cells

    PointRef apply(const PointRef& p) const;               // source canonical -> target canonical
    std::vector<PointRef> fiber(const PointRef& q) const;  // exact preimage list

    // Local degree at a source point. When inconsistent, `degree` is empty and
    // `report` names the two target half-edges with differing sums. With
    // multiplicities the terms are weighted by m'(phi(e))/m(e) and the section-4
    // divisibility condition m(e) | m'(phi(e)) is checked.
    struct LocalDegree {
        std::optional<long> degree;
        std::string report;
    };
    LocalDegree local_degree(const PointRef& p) const;

    struct HarmonicReport {
        bool harmonic = false;
        std::optional<long> degree;  // for finite harmonic morphisms
        std::string report;
    };
    HarmonicReport is_harmonic() const;

    Divisor push_forward(const Divisor& D) const;
    Divisor pull_back(const Divisor& Dp) const;
    PLFunction pull_back(const PLFunction& fp) const;  // f' o phi
    PLFunction push_forward(const PLFunction& f) const;

    // Principal divisor of f weighted by m'(phi(e))/m(e).
    Divisor div_mm(const PLFunction& f) const;

    std::string str() const;

private:
    MultiMorphism(Marking src, Marking dst) : src_(std::move(src)), dst_(std::move(dst)) {}
    Marking src_, dst_;
    std::vector<int> node_images_;
    std::vector<CellImage> images_;
    std::vector<long> m_src_, m_dst_;
    bool has_mult_ = false;
    void validate() const;
};

struct GaloisVerdict {
    bool galois = false;
    long degree = -1;
    std::string reason;  // empty on success
    // fibers sampled at target nodes and one interior point per target cell
    struct FiberRecord {
        PointRef base;
        std::vector<PointRef> fiber;
        bool transitive = false;
    };
    std::vector<FiberRecord> fibers;
    std::optional<std::pair<PointRef, PointRef>> witness;  // non-transitive pair
};

// (i) harmonic (with multiplicities when present), (ii) degree == |K|,
// (iii) phi o sigma == phi for all sigma, (iv) K transitive on every fiber.
GaloisVerdict verify_galois(const MultiMorphism& phi, const IsometricAction& action);

struct Factorization {
    bool ok = false;
    std::string report;
    // psi: quotient -> target as vertex/edge identification tables
    std::vector<std::pair<std::string, std::string>> vertex_pairs;
    bool multiplicity_scaled = false;  // lengths match after m'-scaling
};

}  // namespace tropgal

#pragma once

// Divisors: finitely supported integer maps on the points of a metric graph,
// in canonical coordinates.

#include "tropgal/graph.hpp"

#include <map>
#include <vector>

namespace tropgal {

class Divisor {
public:
    Divisor() = default;
    explicit Divisor(GraphPtr g) : g_(std::move(g)) {}

    const GraphPtr& graph() const { return g_; }

    long at(const PointRef& p) const;
    void add(const PointRef& p, long c);
    void set(const PointRef& p, long c);

    long degree() const;
    bool is_effective() const;
    bool is_zero() const { return coeffs_.empty(); }
    std::vector<PointRef> support() const;
    const std::map<PointRef, long>& coeffs() const { return coeffs_; }

    Divisor& operator+=(const Divisor& o);
    Divisor& operator-=(const Divisor& o);
    Divisor operator-() const;
    friend Divisor operator+(Divisor a, const Divisor& b) { a += b; return a; }
    friend Divisor operator-(Divisor a, const Divisor& b) { a -= b; return a; }
    Divisor operator*(long k) const;

    friend bool operator==(const Divisor& a, const Divisor& b) { return a.coeffs_ == b.coeffs_; }
    friend bool operator!=(const Divisor& a, const Divisor& b) { return !(a == b); }
    friend bool operator<(const Divisor& a, const Divisor& b) { return a.coeffs_ < b.coeffs_; }

    std::string str() const;

    // K_Gamma = sum (val(x) - 2) x over canonical vertices; degree 2g - 2.
    static Divisor canonical_divisor(const GraphPtr& g);

private:
    GraphPtr g_;
    std::map<PointRef, long> coeffs_;  // nonzero entries only
};

}  // namespace tropgal

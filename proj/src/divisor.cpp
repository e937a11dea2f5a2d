#include "tropgal/divisor.hpp"

#include <sstream>

namespace tropgal {

long Divisor::at(const PointRef& p) const {
    auto it = coeffs_.find(p);
    return it == coeffs_.end() ? 0 : it->second;
}

void Divisor::add(const PointRef& p, long c) { set(p, at(p) + c); }

void Divisor::set(const PointRef& p, long c) {
    if (c == 0)
        coeffs_.erase(p);
    else
        coeffs_[p] = c;
}

long Divisor::degree() const {
    long d = 0;
    for (auto& [p, c] : coeffs_) d += c;
    return d;
}

bool Divisor::is_effective() const {
    for (auto& [p, c] : coeffs_)
        if (c < 0) return false;
    return true;
}

std::vector<PointRef> Divisor::support() const {
    std::vector<PointRef> s;
    for (auto& [p, c] : coeffs_) s.push_back(p);
    return s;
}

Divisor& Divisor::operator+=(const Divisor& o) {
    if (!g_) g_ = o.g_;
    for (auto& [p, c] : o.coeffs_) add(p, c);
    return *this;
}

Divisor& Divisor::operator-=(const Divisor& o) {
    if (!g_) g_ = o.g_;
    for (auto& [p, c] : o.coeffs_) add(p, -c);
    return *this;
}

Divisor Divisor::operator-() const {
    Divisor r(g_);
    for (auto& [p, c] : coeffs_) r.set(p, -c);
    return r;
}

Divisor Divisor::operator*(long k) const {
    Divisor r(g_);
    if (k != 0)
        for (auto& [p, c] : coeffs_) r.set(p, c * k);
    return r;
}

std::string Divisor::str() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [p, c] : coeffs_) {
        if (!first) os << (c > 0 ? " + " : " - ");
        else if (c < 0) os << "-";
        long a = c > 0 ? c : -c;
        if (a != 1) os << a << "*";
        os << point_name(g_->model(), p);
        first = false;
    }
    return os.str();
}

Divisor Divisor::canonical_divisor(const GraphPtr& g) {
    Divisor d(g);
    const Model& m = g->model();
    for (size_t v = 0; v < m.vertices.size(); ++v) {
        long c = m.valence(static_cast<int>(v)) - 2;
        if (c != 0) d.set(PointRef::at_vertex(static_cast<int>(v)), c);
    }
    return d;
}

}  // namespace tropgal

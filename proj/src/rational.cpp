#include "tropgal/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace tropgal {

Rat::Rat(long n, long d) {
    if (d == 0) throw std::invalid_argument("Rat: zero denominator");
    v_ = mpq_class(n, d);
    v_.canonicalize();
}

Rat& Rat::operator/=(const Rat& o) {
    if (o.is_zero()) throw std::invalid_argument("Rat: division by zero");
    v_ /= o.v_;
    return *this;
}

Rat Rat::parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("Rat: empty string");
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("Rat: malformed rational '" + s + "'");
    if (q.get_den() == 0) throw std::invalid_argument("Rat: zero denominator in '" + s + "'");
    q.canonicalize();
    return Rat(q);
}

long Rat::as_long() const {
    if (!is_integer() || !v_.get_num().fits_slong_p())
        throw std::domain_error("Rat: not a small integer: " + str());
    return v_.get_num().get_si();
}

std::string Rat::str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

mpz_class Rat::floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
    return q;
}

mpz_class Rat::ceil() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
    return q;
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }
Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

Rat rat_gcd(const Rat& a, const Rat& b) {
    Rat x = abs(a), y = abs(b);
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    mpz_class num;
    mpz_gcd(num.get_mpz_t(), mpz_class(x.num() * y.den()).get_mpz_t(),
            mpz_class(y.num() * x.den()).get_mpz_t());
    mpq_class q(num, x.den() * y.den());
    q.canonicalize();
    return Rat(q);
}

Rat rat_gcd(const std::vector<Rat>& xs) {
    Rat g(0);
    for (const Rat& x : xs) g = rat_gcd(g, x);
    return g;
}

long rat_quot(const Rat& a, const Rat& b) {
    Rat q = a / b;
    return q.as_long();
}

}  // namespace tropgal

#include "qg/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace qg {

MultiPoly MultiPoly::constant(int n_vars, const Rational& c) {
    return term(n_vars, c, Monomial(n_vars, 0));
}

MultiPoly MultiPoly::term(int n_vars, const Rational& c, const Monomial& expo) {
    MultiPoly p(n_vars);
    if (c != 0) p.terms_[expo] = c;
    return p;
}

void MultiPoly::prune(const Monomial& m) {
    auto it = terms_.find(m);
    if (it != terms_.end() && it->second == 0) terms_.erase(it);
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) {
        terms_[m] += c;
        prune(m);
    }
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) {
        terms_[m] -= c;
        prune(m);
    }
    return *this;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    MultiPoly r = *this;
    r += o;
    return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
    MultiPoly r = *this;
    r -= o;
    return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    MultiPoly r(n_vars_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) {
            Monomial m(n_vars_);
            for (int i = 0; i < n_vars_; ++i) m[i] = ma[i] + mb[i];
            r.terms_[m] += ca * cb;
            r.prune(m);
        }
    return r;
}

MultiPoly MultiPoly::operator*(const Rational& c) const {
    MultiPoly r(n_vars_);
    if (c == 0) return r;
    for (const auto& [m, co] : terms_) r.terms_[m] = co * c;
    return r;
}

std::complex<double> MultiPoly::eval(const std::vector<std::complex<double>>& z) const {
    std::complex<double> acc = 0.0;
    for (const auto& [m, c] : terms_) {
        std::complex<double> t = static_cast<double>(c);
        for (int i = 0; i < n_vars_; ++i)
            for (uint32_t p = 0; p < m[i]; ++p) t *= z[i];
        acc += t;
    }
    return acc;
}

MultiPoly MultiPoly::normalized(Unit* unit) const {
    MultiPoly r(n_vars_);
    if (unit) *unit = Unit{1, Monomial(n_vars_, 0)};
    if (terms_.empty()) return r;

    // clear denominators, then divide by integer content
    BigInt lcm = 1, gcd = 0;
    for (const auto& [m, c] : terms_)
        lcm = boost::multiprecision::lcm(lcm, denominator(c));
    for (const auto& [m, c] : terms_)
        gcd = boost::multiprecision::gcd(gcd, BigInt(numerator(c) * (lcm / denominator(c))));
    Rational scale = Rational(lcm, gcd);

    // common monomial factor
    Monomial shift(n_vars_, UINT32_MAX);
    for (const auto& [m, c] : terms_)
        for (int i = 0; i < n_vars_; ++i) shift[i] = std::min(shift[i], m[i]);

    // sign of the lexicographically largest monomial
    const Rational& lead = terms_.rbegin()->second;
    if (lead * scale < 0) scale = -scale;

    for (const auto& [m, c] : terms_) {
        Monomial mm(n_vars_);
        for (int i = 0; i < n_vars_; ++i) mm[i] = m[i] - shift[i];
        r.terms_[mm] = c * scale;
    }
    if (unit) {
        unit->coeff = Rational(1) / scale;
        unit->expo = shift;
    }
    return r;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!first) os << "\n";
        first = false;
        os << it->second.str();
        bool any = false;
        for (int i = 0; i < n_vars_; ++i)
            if (it->first[i] > 0) {
                os << (any ? " " : " * ") << "z" << (i + 1) << "^" << it->first[i];
                any = true;
            }
    }
    return os.str();
}

bool proportional(const MultiPoly& p, const MultiPoly& q) {
    if (p.n_vars() != q.n_vars()) return false;
    if (p.is_zero() || q.is_zero()) return p.is_zero() && q.is_zero();
    return p.normalized() == q.normalized();
}

} // namespace qg

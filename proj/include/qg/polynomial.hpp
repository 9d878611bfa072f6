#ifndef QG_POLYNOMIAL_HPP
#define QG_POLYNOMIAL_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qg {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exponent vector, one entry per variable. Lexicographic comparison with
/// the first variable most significant (std::vector's operator<).
using Monomial = std::vector<uint32_t>;

/// Sparse multivariate polynomial with exact rational coefficients.
class MultiPoly {
public:
    MultiPoly() = default;
    explicit MultiPoly(int n_vars) : n_vars_(n_vars) {}
    static MultiPoly constant(int n_vars, const Rational& c);
    /// c * prod z_i^{expo_i}
    static MultiPoly term(int n_vars, const Rational& c, const Monomial& expo);

    int n_vars() const { return n_vars_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Monomial, Rational>& terms() const { return terms_; }

    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly operator*(const Rational& c) const;
    bool operator==(const MultiPoly& o) const { return n_vars_ == o.n_vars_ && terms_ == o.terms_; }

    std::complex<double> eval(const std::vector<std::complex<double>>& z) const;

    /// Extracted unit: original = coeff * prod z^expo * normalized.
    struct Unit {
        Rational coeff = 1;
        Monomial expo;
    };
    /// Integer content 1, common monomial factor removed, lexicographically
    /// largest monomial positive. Returns the unit that was divided out.
    MultiPoly normalized(Unit* unit = nullptr) const;

    /// "c * z1^a z2^b" per term, largest monomial first, '\n'-separated.
    std::string to_string() const;

private:
    void prune(const Monomial& m);
    int n_vars_ = 0;
    std::map<Monomial, Rational> terms_;
};

/// True iff p = c * prod z^m * q for a nonzero rational c and integer shift m.
bool proportional(const MultiPoly& p, const MultiPoly& q);

} // namespace qg

#endif

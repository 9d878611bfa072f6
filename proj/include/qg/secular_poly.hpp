#ifndef QG_SECULAR_POLY_HPP
#define QG_SECULAR_POLY_HPP

#include "qg/graph.hpp"
#include "qg/polynomial.hpp"

namespace qg {

/// The secular polynomial in normalized form together with the unit
/// (rational scalar times a monomial) that was divided out of the raw
/// determinant expansion.
struct SecularPolynomial {
    MultiPoly poly;        // normalized
    MultiPoly::Unit unit;  // det(Id - U(z)_2) = unit * poly
};

/// Exact expansion of det(Id - U(z)_2) with one formal variable per edge
/// (input order), leads included, over rational arithmetic. Guarded to
/// n <= 8 edges. Degree in each variable is at most 2.
SecularPolynomial symbolic_secular(const MetricGraph& g);

} // namespace qg

#endif

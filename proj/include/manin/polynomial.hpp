#pragma once

// Dense univariate polynomials over a small finite field. Coefficients are
// stored low to high and kept trimmed: the zero polynomial is empty.

#include <vector>

#include "manin/field.hpp"

namespace manin {

using Poly = std::vector<FieldElem>;

namespace poly {

void trim(Poly& f);
int degree(const Poly& f);  // -1 for the zero polynomial
Poly add(const Field& F, const Poly& f, const Poly& g);
Poly sub(const Field& F, const Poly& f, const Poly& g);
Poly mul(const Field& F, const Poly& f, const Poly& g);
Poly scale(const Field& F, const Poly& f, FieldElem c);
// Quotient and remainder; g must be nonzero.
void divmod(const Field& F, const Poly& f, const Poly& g, Poly& quotient, Poly& remainder);
Poly rem(const Field& F, const Poly& f, const Poly& g);
Poly monic(const Field& F, const Poly& f);
// Monic gcd; gcd(0, 0) = 0.
Poly gcd(const Field& F, Poly f, Poly g);
FieldElem eval(const Field& F, const Poly& f, FieldElem x);

// Monic polynomials of degree n are numbered by sum_{j<n} index(c_j) q^j.
long long monic_index(const Field& F, const Poly& f);
Poly monic_from_index(const Field& F, int n, long long index);

}  // namespace poly
}  // namespace manin

#pragma once

// Binary forms, closed points and effective divisors on P^1 over F_q.

#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "manin/field.hpp"
#include "manin/polynomial.hpp"

namespace manin {

// sum_j coeffs[j] X^j Y^{degree-j}. The zero form is allowed as a value
// but rejected by divisor extraction.
struct BinaryForm {
  int degree = 0;
  std::vector<FieldElem> coeffs;  // length degree + 1

  static BinaryForm make(int degree, std::vector<FieldElem> coeffs);
  static BinaryForm zero(int degree);
  bool is_zero() const;
  // Dehomogenization at Y = 1 (trimmed).
  Poly dehomogenized() const;
  // Multiplicity of the point at infinity (Y = 0).
  int infinity_multiplicity() const;

  friend bool operator==(const BinaryForm&, const BinaryForm&) = default;
};

BinaryForm form_mul(const Field& F, const BinaryForm& f, const BinaryForm& g);

// Either infinity or a monic irreducible polynomial in the affine
// coordinate x = X/Y.
class ClosedPoint {
 public:
  static ClosedPoint infinity() { return ClosedPoint(true, {}, 0); }
  static ClosedPoint finite(const Field& F, Poly monic_irreducible);
  static ClosedPoint rational(const Field& F, FieldElem root);

  bool at_infinity() const { return at_infinity_; }
  const Poly& poly() const { return poly_; }
  int degree() const { return at_infinity_ ? 1 : poly::degree(poly_); }
  std::string to_string(const Field& F) const;

  // Order: by degree; within degree 1 by root with infinity last; higher
  // degrees by coefficients from x^{n-1} down.
  std::strong_ordering operator<=>(const ClosedPoint& other) const;
  bool operator==(const ClosedPoint& other) const {
    return at_infinity_ == other.at_infinity_ && poly_ == other.poly_;
  }

 private:
  ClosedPoint(bool inf, Poly p, long long key) : at_infinity_(inf), poly_(std::move(p)), key_(key) {}
  bool at_infinity_;
  Poly poly_;
  // Root index in degree 1, monic index otherwise.
  long long key_;
};

// Finitely supported map from closed points to positive multiplicities,
// kept sorted by point.
class EffectiveDivisor {
 public:
  using Entry = std::pair<ClosedPoint, int>;

  EffectiveDivisor() = default;
  static EffectiveDivisor from_entries(std::vector<Entry> entries);
  static EffectiveDivisor single(const ClosedPoint& c, int mult = 1);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  int degree() const;
  int multiplicity(const ClosedPoint& c) const;
  bool disjoint_from(const EffectiveDivisor& other) const;
  bool contains(const EffectiveDivisor& other) const;  // other <= this pointwise
  std::string to_string(const Field& F) const;

  friend EffectiveDivisor operator+(const EffectiveDivisor& a, const EffectiveDivisor& b);
  friend EffectiveDivisor divisor_min(const EffectiveDivisor& a, const EffectiveDivisor& b);
  friend bool operator==(const EffectiveDivisor&, const EffectiveDivisor&) = default;
  friend auto operator<=>(const EffectiveDivisor& a, const EffectiveDivisor& b) {
    return a.entries_ <=> b.entries_;
  }

 private:
  std::vector<Entry> entries_;
};

struct ZetaIdentityReport {
  bool ok = true;
  std::optional<int> first_mismatch;
  int checked_through = 0;
  // Degrees up to this were counted by explicit enumeration; higher ones by
  // the necklace formula.
  int enumerated_through = 0;
  std::vector<mpz_class> lhs;  // coefficients of prod (1 - t^deg c)^{-1}
  std::vector<mpz_class> rhs;  // coefficients of 1 / ((1 - t)(1 - q t))
};

// Largest q^n for which degree-n closed points are enumerated explicitly.
inline constexpr long long kEnumerationCap = 1LL << 20;

class ProjectiveLine {
 public:
  explicit ProjectiveLine(Field F);

  const Field& field() const { return F_; }

  // All closed points of degree exactly n (deterministic order).
  const std::vector<ClosedPoint>& closed_points_of_degree(int n) const;
  std::vector<ClosedPoint> closed_points_up_to(int N) const;
  bool enumerable(int n) const;
  mpz_class count_closed_points(int n) const;

  EffectiveDivisor divisor_of_form(const BinaryForm& f) const;
  // Divisor of a nonzero affine polynomial plus a multiplicity at infinity.
  EffectiveDivisor divisor_of_poly(const Poly& f, int infinity_mult) const;
  EffectiveDivisor form_gcd(const BinaryForm& f, const BinaryForm& g) const;

  std::vector<EffectiveDivisor> hilb_points(int n) const;
  ZetaIdentityReport zeta_p1_identity_check(int N) const;

 private:
  Field F_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::unique_ptr<std::vector<ClosedPoint>>> by_degree_;
};

mpz_class necklace_count(long long q, int n);
int mobius_integer(long long n);

}  // namespace manin

#pragma once

// Small finite fields F_q, q = p^n with p <= 13 and q <= 13^3.
//
// Elements are table indices: the element with coefficient vector
// (c_0, ..., c_{n-1}) over F_p (polynomial basis modulo the chosen modulus)
// has index c_0 + c_1 p + ... + c_{n-1} p^{n-1}. Index order is the
// canonical enumeration order, so 0 and 1 are always the first two elements.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace manin {

class FieldElem {
 public:
  constexpr FieldElem() = default;
  constexpr explicit FieldElem(std::uint16_t index) : index_(index) {}

  constexpr std::uint16_t index() const { return index_; }
  constexpr bool is_zero() const { return index_ == 0; }

  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;

 private:
  std::uint16_t index_ = 0;
};

inline constexpr int kMaxPrime = 13;
inline constexpr int kMaxFieldSize = 13 * 13 * 13;

class Field {
 public:
  // Validates p, n and the modulus (or picks the lexicographically least
  // monic irreducible of degree n when none is given).
  static Field make(int p, int n, std::optional<std::vector<int>> modulus = std::nullopt);

  int p() const { return tables_->p; }
  int n() const { return tables_->n; }
  int q() const { return tables_->q; }
  // Monic modulus, coefficients low to high including the leading 1.
  // For n = 1 this is {0, 1}.
  const std::vector<int>& modulus() const { return tables_->modulus; }
  std::string describe() const;

  FieldElem zero() const { return FieldElem(0); }
  FieldElem one() const { return FieldElem(1); }
  FieldElem element(int index) const;
  // Image of an integer under Z -> F_p -> F_q.
  FieldElem from_int(long long value) const;
  FieldElem from_coeffs(std::span<const int> coeffs) const;
  std::vector<int> coeffs(FieldElem a) const;
  std::vector<FieldElem> elements() const;

  FieldElem add(FieldElem a, FieldElem b) const {
    return FieldElem(tables_->add[std::size_t(a.index()) * tables_->q + b.index()]);
  }
  FieldElem neg(FieldElem a) const { return FieldElem(tables_->neg[a.index()]); }
  FieldElem sub(FieldElem a, FieldElem b) const { return add(a, neg(b)); }
  FieldElem mul(FieldElem a, FieldElem b) const {
    if (a.is_zero() || b.is_zero()) return zero();
    return FieldElem(tables_->exp[tables_->log[a.index()] + tables_->log[b.index()]]);
  }
  FieldElem inv(FieldElem a) const;
  FieldElem div(FieldElem a, FieldElem b) const { return mul(a, inv(b)); }
  FieldElem pow(FieldElem a, long long e) const;
  FieldElem frobenius(FieldElem a) const { return FieldElem(tables_->frob[a.index()]); }
  // Generator of the multiplicative group used for the log tables.
  FieldElem generator() const { return FieldElem(tables_->generator); }

  friend bool operator==(const Field& x, const Field& y) {
    return x.tables_ == y.tables_ || (x.q() == y.q() && x.modulus() == y.modulus());
  }

 private:
  struct Tables {
    int p = 0;
    int n = 0;
    int q = 0;
    std::vector<int> modulus;
    std::vector<std::uint16_t> add;
    std::vector<std::uint16_t> neg;
    std::vector<std::uint16_t> log;
    std::vector<std::uint16_t> exp;  // length 2(q-1) so log sums need no reduction
    std::vector<std::uint16_t> frob;
    std::uint16_t generator = 1;
  };

  explicit Field(std::shared_ptr<const Tables> t) : tables_(std::move(t)) {}

  std::shared_ptr<const Tables> tables_;
};

bool is_prime(long long n);

// Irreducibility over F_p by trial division against every monic polynomial
// of degree <= deg/2. Coefficients low to high, leading coefficient 1.
bool is_irreducible_mod_p(std::span<const int> monic, int p);

}  // namespace manin

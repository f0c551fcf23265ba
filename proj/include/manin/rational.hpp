#pragma once

// Fractions over mpz that are reduced only on request. Long Euler products
// multiply hundreds of thousands of factors, and canonicalizing after every
// step costs far more than the multiplications themselves.

#include <compare>
#include <string>

#include <gmpxx.h>

namespace manin {

class BigFraction {
 public:
  BigFraction() : num_(0), den_(1) {}
  BigFraction(long n) : num_(n), den_(1) {}  // NOLINT
  BigFraction(mpz_class num, mpz_class den);
  explicit BigFraction(const mpq_class& x) : num_(x.get_num()), den_(x.get_den()) {}

  const mpz_class& num() const { return num_; }
  const mpz_class& den() const { return den_; }

  mpq_class reduced() const;
  // Accurate to double precision even when num and den overflow a double.
  double to_double() const;
  // "n/d" in lowest terms.
  std::string to_string() const;
  int sign() const { return sgn(num_); }

  BigFraction pow(unsigned long e) const;
  BigFraction inverse() const;
  BigFraction abs() const { return BigFraction(mpz_class(::abs(num_)), den_); }

  friend BigFraction operator*(const BigFraction& x, const BigFraction& y);
  friend BigFraction operator/(const BigFraction& x, const BigFraction& y);
  friend BigFraction operator+(const BigFraction& x, const BigFraction& y);
  friend BigFraction operator-(const BigFraction& x, const BigFraction& y);
  BigFraction& operator*=(const BigFraction& y) { return *this = *this * y; }

  friend bool operator==(const BigFraction& x, const BigFraction& y);
  friend std::strong_ordering operator<=>(const BigFraction& x, const BigFraction& y);

 private:
  mpz_class num_, den_;  // den_ > 0
};

}  // namespace manin

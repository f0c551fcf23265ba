#pragma once

// Euler product of the virtual height zeta function, the Tamagawa number
// and the expected size of the section spaces. Everything is exact; doubles
// appear only in reported gaps.

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "manin/rational.hpp"

namespace manin {

using Exponent = std::array<int, 4>;

// Power series in t_1..t_4 truncated at orders[i] in t_i. point_cutoff
// records the largest closed-point degree folded in (0 when not a product).
class TruncatedMultiSeries {
 public:
  explicit TruncatedMultiSeries(const Exponent& orders, int point_cutoff = 0);
  static TruncatedMultiSeries one(const Exponent& orders);

  const Exponent& orders() const { return orders_; }
  int point_cutoff() const { return cutoff_; }
  void set_point_cutoff(int N) { cutoff_ = N; }

  bool in_range(const Exponent& e) const;
  // Zero outside the truncation.
  mpq_class coeff(const Exponent& e) const;
  void set(const Exponent& e, const mpq_class& v);
  void add(const Exponent& e, const mpq_class& v);

  // Nonzero coefficients, exponents in lexicographic order.
  std::vector<std::pair<Exponent, mpq_class>> terms() const;
  // Substitute t_i = t[i] into the truncated polynomial.
  mpq_class evaluate(const std::array<mpq_class, 4>& t) const;

  // Orders must agree (DegreeMismatch). The cutoff of a product is the max.
  friend TruncatedMultiSeries operator*(const TruncatedMultiSeries& x, const TruncatedMultiSeries& y);
  friend TruncatedMultiSeries operator+(const TruncatedMultiSeries& x, const TruncatedMultiSeries& y);
  TruncatedMultiSeries pow(unsigned long e) const;
  friend bool operator==(const TruncatedMultiSeries& x, const TruncatedMultiSeries& y);

 private:
  std::size_t index(const Exponent& e) const;

  Exponent orders_;
  int cutoff_;
  std::vector<mpq_class> c_;
};

struct EulerFactorSpec {
  int degree = 1;  // |c|
  long long q = 2;
  Exponent orders{};
};

// 1 - 6u^2 + 8u^3 - 3u^4 + sum_i sum_{d >= 1} (q t_i)^{|c| d} (u^{2d} - 2u^{2d+1} + 2u^{2d+3} - u^{2d+4}),
// u = q^{-|c|}.
TruncatedMultiSeries local_factor(const EulerFactorSpec& spec);

// Number of closed points of P^1 of degree n over F_q (infinity included at n = 1).
mpz_class closed_point_count(long long q, int n);

// Product of local factors over closed points of degree <= N, equal points
// of one degree grouped into a single power.
TruncatedMultiSeries euler_product(long long q, int N, const Exponent& orders);
// The same product folded one closed point at a time, left to right.
TruncatedMultiSeries euler_product_folded(long long q, int N, const Exponent& orders);

// Coefficient of t_i extracted from the expanded product and from
// prod_c f_c(0) * sum_c [t_i]f_c / f_c(0).
struct LogDerivativeCheck {
  std::array<mpq_class, 4> direct, from_factors;
  bool agrees = false;
};
LogDerivativeCheck log_derivative_check(long long q, int N, const Exponent& orders);

// #S(F_{q^n}) = q^{2n} + 6 q^n + 1.
mpz_class surface_count(long long q, int n);
// #(P^1 x P^1)(F_{q^n}) + 4 q^n, the blow-up count.
mpz_class blowup_point_count(long long q, int n);

struct TamagawaReport {
  long long q = 0;
  int N = 0;
  std::vector<BigFraction> partial;  // partial[n-1]: truncation at degree n
  BigFraction value;
  double last_increment = 0;  // |partial(N) - partial(N-1)| / partial(N)
};
// q^2 (1 - 1/q)^{-6} prod_{|c| <= N} (1 - q^{-|c|})^6 #S(F_{q^|c|}) / q^{2|c|}.
TamagawaReport tamagawa(long long q, int N);

// (1 - 1/q)^{-4} prod_{|c| <= N} (1 - u)^6 (1 + 6u + u^2).
BigFraction limit_rhs(long long q, int N);

struct LimitReport {
  long long q = 0;
  int N = 0, m_max = 0;
  BigFraction rhs;
  std::vector<BigFraction> ratio;  // ratio[m-1] = lhs / rhs at t_i = 1 - 2^{-m}
  std::vector<double> gaps;        // |ratio - 1|
  bool gaps_decreasing = false;  // over m = 2..m_max
};
// The degree cutoff N and the limit t -> 1 do not commute: a finite product
// has no pole, so prod (1 - t_i) Z_N(t) -> 0. Each factor (1 - t_i) is
// therefore written as prod_c (1 - (t_i/q)^{|c|}) / (1 - t_i/q) and the
// points of degree <= N are taken on both sides. The geometric sums over
// d_i are summed in closed form.
LimitReport limit_formula_check(long long q, int N, int m_max);
// The regularized left side at a given t (all four variables equal).
BigFraction regularized_lhs(long long q, int N, const mpq_class& t);

// (q - 1)^2 tau q^{2a + 2a' - sum k}, tau truncated at degree N.
BigFraction expected_section_count(long long q, long long a, long long a_prime, const std::array<int, 4>& k, int N);

std::string series_to_json(const TruncatedMultiSeries& s);

}  // namespace manin

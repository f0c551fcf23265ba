#include "doctest.h"
#include "manin/error.hpp"
#include "manin/heightzeta.hpp"

using namespace manin;

namespace {

mpq_class inv_pow(long q, int e) {
  mpz_class d;
  mpz_ui_pow_ui(d.get_mpz_t(), q, e);
  return mpq_class(mpz_class(1), d);
}

mpq_class power(mpq_class x, unsigned long e) {
  mpq_class r = 1;
  while (e--) r *= x;
  return r;
}

}  // namespace

TEST_CASE("local factor coefficients") {
  for (long q : {2L, 3L, 5L, 7L}) {
    CAPTURE(q);
    const auto f1 = local_factor({1, q, {3, 3, 3, 3}});
    const mpq_class expected_t1 = inv_pow(q, 1) - 2 * inv_pow(q, 2) + 2 * inv_pow(q, 4) - inv_pow(q, 5);
    for (int i = 0; i < 4; ++i) {
      Exponent e{};
      e[i] = 1;
      CHECK(f1.coeff(e) == expected_t1);
      // d = 2: q^2 (q^-4 - 2q^-5 + 2q^-7 - q^-8)
      e[i] = 2;
      CHECK(f1.coeff(e) == inv_pow(q, 2) - 2 * inv_pow(q, 3) + 2 * inv_pow(q, 5) - inv_pow(q, 6));
    }
    CHECK(f1.coeff({0, 0, 0, 0}) == 1 - 6 * inv_pow(q, 2) + 8 * inv_pow(q, 3) - 3 * inv_pow(q, 4));
    CHECK(f1.coeff({1, 1, 0, 0}) == 0);

    const auto f2 = local_factor({2, q, {3, 3, 3, 3}});
    CHECK(f2.coeff({1, 0, 0, 0}) == 0);
    CHECK(f2.coeff({0, 0, 3, 0}) == 0);
    CHECK(f2.coeff({0, 2, 0, 0}) == inv_pow(q, 2) - 2 * inv_pow(q, 4) + 2 * inv_pow(q, 8) - inv_pow(q, 10));
    CHECK(f2.coeff({0, 0, 0, 0}) == 1 - 6 * inv_pow(q, 4) + 8 * inv_pow(q, 6) - 3 * inv_pow(q, 8));
    CHECK(f2.evaluate({0, 0, 0, 0}) == f2.coeff({0, 0, 0, 0}));
  }
  CHECK_THROWS_AS(local_factor({0, 3, {}}), Error);
}

TEST_CASE("euler product") {
  for (long q : {2L, 3L, 5L}) {
    CAPTURE(q);
    const mpq_class c0 = 1 - 6 * inv_pow(q, 2) + 8 * inv_pow(q, 3) - 3 * inv_pow(q, 4);
    CHECK(euler_product(q, 1, {0, 0, 0, 0}).coeff({0, 0, 0, 0}) == power(c0, q + 1));

    // [t_1] of (c0 + c1 t_1 + ...)^{q+1} is (q+1) c1 c0^q.
    const mpq_class c1 = inv_pow(q, 1) - 2 * inv_pow(q, 2) + 2 * inv_pow(q, 4) - inv_pow(q, 5);
    CHECK(euler_product(q, 1, {1, 0, 0, 0}).coeff({1, 0, 0, 0}) == (q + 1) * c1 * power(c0, q));

    for (int N = 1; N <= 3; ++N) {
      const auto chk = log_derivative_check(q, N, {3, 2, 1, 1});
      CHECK(chk.agrees);
      CHECK(chk.direct[0] != 0);
    }

    // Adding the degree N+1 points multiplies by their factors.
    const Exponent o{2, 2, 1, 0};
    const auto p2 = euler_product(q, 2, o);
    const auto p3 = euler_product(q, 3, o);
    auto grown = p2;
    const auto f3 = local_factor({3, q, o});
    for (mpz_class j = 0; j < closed_point_count(q, 3); ++j) grown = grown * f3;
    CHECK(grown == p3);
    CHECK(p3.point_cutoff() == 3);
  }
  // Grouping by degree gives the same result as the left fold.
  CHECK(euler_product(3, 3, {2, 1, 1, 1}) == euler_product_folded(3, 3, {2, 1, 1, 1}));
  CHECK(euler_product(4, 2, {2, 2, 0, 0}) == euler_product_folded(4, 2, {2, 2, 0, 0}));
}

TEST_CASE("closed form of the d-sums") {
  // Evaluate the truncated local series and add the exact geometric tail.
  const long q = 5;
  const mpq_class t(7, 8);
  for (int order : {1, 3, 6}) {
    const auto f = local_factor({1, q, {order, order, order, order}});
    const mpq_class x = t / q, u(1, q);
    const mpq_class tail = 1 - 2 * u + 2 * u * u * u - u * u * u * u;
    const mpq_class full = f.evaluate({t, t, t, t}) + 4 * power(x, order + 1) / (1 - x) * tail;
    const BigFraction expected(mpq_class(power(full * power(1 - x, 4), q + 1) / power(1 - x, 4)));
    CHECK(regularized_lhs(q, 1, t) == expected);
  }
}

TEST_CASE("surface point counts") {
  CHECK(surface_count(3, 1) == 28);
  CHECK(surface_count(5, 1) == 56);
  for (long q : {2L, 3L, 4L, 5L, 7L})
    for (int n = 1; n <= 5; ++n) {
      const mpz_class s = surface_count(q, n);
      CHECK(s == blowup_point_count(q, n));
      CHECK(s % q == 1);
      const mpq_class u = inv_pow(q, n);
      CHECK(power(1 - u, 6) * mpq_class(s) * u * u == power(1 - u, 6) * (1 + 6 * u + u * u));
    }
}

TEST_CASE("tamagawa") {
  for (long q : {3L, 5L}) {
    const auto r = tamagawa(q, 1);
    const mpq_class u(1, q);
    const mpq_class f = power(1 - u, 6) * mpq_class(q * q + 6 * q + 1, q * q);
    CHECK(r.value == BigFraction(mpq_class(power(f, q + 1) * q * q / power(1 - u, 6))));
  }
  const auto r = tamagawa(5, 7);
  REQUIRE(r.partial.size() == 7);
  for (int N = 3; N < 7; ++N) {
    const BigFraction inc_next = (r.partial[N] - r.partial[N - 1]).abs();
    const BigFraction inc = (r.partial[N - 1] - r.partial[N - 2]).abs();
    CHECK(inc_next < inc);
  }
  CHECK(r.last_increment > 0);
  CHECK(r.last_increment < 1e-4);

  // Both displays share the product; (q-1)^2 tau = q^4 (1-1/q)^{-4} prod.
  for (int N = 1; N <= 6; ++N)
    CHECK(BigFraction(mpq_class(16)) * tamagawa(5, N).value == BigFraction(mpq_class(625)) * limit_rhs(5, N));

  // tau / q^2 -> 1 as q grows.
  double prev = 1e9;
  for (long q : {2L, 3L, 5L, 7L, 11L, 13L}) {
    const double d = std::abs(tamagawa(q, 3).value.to_double() / double(q * q) - 1);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("limit formula") {
  const mpq_class u(1, 5);
  const mpq_class f = power(1 - u, 6) * (1 + 6 * u + u * u);
  CHECK(limit_rhs(5, 1) == BigFraction(mpq_class(power(f, 6) / power(1 - u, 4))));

  const auto rep = limit_formula_check(5, 8, 6);
  CHECK(rep.gaps_decreasing);
  CHECK(rep.rhs.sign() > 0);
  for (std::size_t m = 0; m < rep.ratio.size(); ++m) CHECK(rep.ratio[m].sign() > 0);
  // Gaps halve with 1 - t.
  for (int m = 3; m <= 6; ++m) CHECK(rep.gaps[m - 1] == doctest::Approx(rep.gaps[m - 2] / 2).epsilon(0.15));
  // The ratio at t = 1 - 2^-m computed from the two pieces separately.
  const BigFraction lhs3 = regularized_lhs(5, 8, 1 - mpq_class(1, 8));
  CHECK(lhs3 == rep.ratio[2] * rep.rhs);
}

TEST_CASE("expected counts") {
  const BigFraction e1 = expected_section_count(3, 1, 1, {0, 0, 0, 0}, 4);
  const BigFraction e2 = expected_section_count(3, 2, 1, {0, 0, 0, 0}, 4);
  CHECK(e2 == e1 * BigFraction(9));
  CHECK(expected_section_count(3, 2, 1, {1, 0, 0, 1}, 4) == e1);
  CHECK(e1 == BigFraction(mpq_class(4 * 81)) * tamagawa(3, 4).value);
}

TEST_CASE("series json keeps exact rationals") {
  TruncatedMultiSeries s({1, 0, 0, 0}, 2);
  s.set({1, 0, 0, 0}, mpq_class(4, 9));
  s.set({0, 0, 0, 0}, 1);
  CHECK(series_to_json(s) ==
        R"({"orders":[1,0,0,0],"point_cutoff":2,"terms":[{"exponent":[0,0,0,0],"value":"1"},)"
        R"({"exponent":[1,0,0,0],"value":"4/9"}]})");
  CHECK_THROWS_AS(s.set({2, 0, 0, 0}, 1), Error);
  CHECK_THROWS_AS(s * TruncatedMultiSeries({2, 0, 0, 0}), Error);
}

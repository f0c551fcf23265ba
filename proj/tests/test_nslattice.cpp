#include <algorithm>
#include <set>

#include "doctest.h"
#include "manin/error.hpp"
#include "manin/nslattice.hpp"
#include "manin/polytope.hpp"

using namespace manin;

namespace {

const CurveClass F = CurveClass::basis(0), Fp = CurveClass::basis(1);
CurveClass E(int i) { return CurveClass::basis(1 + i); }

// Gram matrix written out entry by entry.
long long gram(int i, int j) {
  if ((i == 0 && j == 1) || (i == 1 && j == 0)) return 1;
  if (i == j && i >= 2) return -1;
  return 0;
}

long long slow_pair(const CurveClass& x, const CurveClass& y) {
  long long s = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) s += x.c[i] * gram(i, j) * y.c[j];
  return s;
}

CurveClass permute(const CurveClass& x, const std::array<int, 4>& perm, bool swap_rulings) {
  CurveClass y = x;
  if (swap_rulings) std::swap(y.c[0], y.c[1]);
  for (int i = 0; i < 4; ++i) y.c[2 + perm[i]] = x.c[2 + i];
  return y;
}

bool nef_by_box(const CurveClass& x) {
  for (const auto& l : minus_one_classes())
    if (slow_pair(x, l) < 0) return false;
  return true;
}

}  // namespace

TEST_CASE("pairing") {
  CHECK(intersect(F, Fp) == 1);
  CHECK(intersect(anticanonical(), anticanonical()) == 4);
  CHECK(intersect(anticanonical(), F) == 2);
  CHECK(F.h() == 2);
  CHECK(F.a() == 0);
  CHECK(F.a_prime() == 1);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(intersect(CurveClass::basis(i), CurveClass::basis(j)) == gram(i, j));
  const auto sig = gram_signature();
  CHECK(sig.positive == 1);
  CHECK(sig.negative == 5);
  CHECK(sig.zero == 0);
  // det(xI - G) = (x - 1)(x + 1)^5
  const auto cp = gram_charpoly();
  CHECK(cp == std::vector<mpz_class>{-1, -4, -5, 0, 5, 4, 1});
}

TEST_CASE("(-1)-classes and conics") {
  const auto& lines = minus_one_classes();
  CHECK(lines.size() == 16);
  CHECK(std::count(lines.begin(), lines.end(), E(1)) == 1);
  CHECK(std::count(lines.begin(), lines.end(), F - E(1)) == 1);
  // Independent oracle: the plain box |c_j| <= 2 from the problem statement.
  std::vector<CurveClass> box;
  CurveClass x;
  auto rec = [&](auto&& self, int j) -> void {
    if (j == 6) {
      if (slow_pair(x, x) == -1 && slow_pair(anticanonical(), x) == 1) box.push_back(x);
      return;
    }
    for (long long v = -2; v <= 2; ++v) {
      x.c[j] = v;
      self(self, j + 1);
    }
  };
  rec(rec, 0);
  std::sort(box.begin(), box.end());
  CHECK(box == lines);
  const auto search = classes_with(-1, 1);
  CHECK(search.s_max - search.s_min <= 2);
  CHECK(search.e_bound <= 2);

  std::array<int, 4> perm{0, 1, 2, 3};
  const std::set<CurveClass> line_set(lines.begin(), lines.end());
  do {
    for (bool sw : {false, true})
      for (const auto& l : lines) CHECK(line_set.count(permute(l, perm, sw)) == 1);
  } while (std::next_permutation(perm.begin(), perm.end()));

  CHECK(conic_classes().size() == 10);
  for (const auto& c : conic_classes()) {
    CHECK(intersect(c, c) == 0);
    CHECK(intersect(anticanonical(), c) == 2);
  }
}

TEST_CASE("markings") {
  const auto& ms = enumerate_markings();
  // The Weyl group of D5 acts simply transitively on markings.
  CHECK(ms.size() == 1920);
  CHECK(ms[0].f == F);
  CHECK(ms[0].f_prime == Fp);
  for (int i = 0; i < 4; ++i) CHECK(ms[0].e[i] == E(i + 1));
  const std::set<Marking> all(ms.begin(), ms.end());
  CHECK(all.size() == ms.size());
  for (const auto& m : ms) {
    CHECK(m.satisfies_invariants());
    CHECK(intersect(m.f, m.f_prime) == 1);
    Marking swapped = m;
    std::swap(swapped.e[0], swapped.e[3]);
    CHECK(all.count(swapped) == 1);
  }
}

TEST_CASE("nefness and enumeration") {
  CHECK(is_nef(F));
  CHECK(is_nef(anticanonical()));
  CHECK_FALSE(is_nef(E(1)));
  for (const auto& l : minus_one_classes()) CHECK(intersect(anticanonical(), l) == 1);

  const auto zero = enumerate_nef_points(0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0] == CurveClass{});
  const auto two = enumerate_nef_points(2);
  CHECK(std::count(two.begin(), two.end(), F) == 1);
  CHECK(std::count(two.begin(), two.end(), Fp) == 1);

  // Brute-force oracle over a generous box of basis coordinates.
  for (long long d = 0; d <= 5; ++d) {
    std::set<CurveClass> brute;
    CurveClass x;
    auto rec = [&](auto&& self, int j) -> void {
      if (j == 6) {
        if (x.h() <= d && nef_by_box(x)) brute.insert(x);
        return;
      }
      const long long lo = j < 2 ? 0 : -d, hi = j < 2 ? 2 * d : 0;
      for (long long v = lo; v <= hi; ++v) {
        x.c[j] = v;
        self(self, j + 1);
      }
    };
    rec(rec, 0);
    const auto listed = enumerate_nef_points(d);
    CHECK(std::set<CurveClass>(listed.begin(), listed.end()) == brute);
    CHECK(mpz_class(long(listed.size())) == count_nef_points(d));
  }
  mpz_class prev = 0;
  for (long long d = 1; d <= 8; ++d) {
    const mpz_class c = count_nef_points(d);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("markings with non-negative slack exist for every nef class up to degree 10") {
  const auto& ms = enumerate_markings();
  for (const auto& alpha : enumerate_nef_points(10)) {
    const auto chosen = choose_marking(alpha);
    CHECK(chosen.min_slack >= 0);
    CHECK(chosen.coords.h() == alpha.h());
    const auto [s1, s2] = ms[0].slacks(alpha);
    const long long ell = ell_functional(alpha);
    CHECK(ell == chosen.min_slack);
    CHECK(ell >= std::min(s1, s2));
    CHECK(ell_functional(2 * alpha) == 2 * ell);
  }
  CHECK(ell_functional(CurveClass{}) == 0);
  CHECK(ell_functional(F + Fp) == 2);
  CHECK(choose_marking(F + Fp).index == 0);
  CHECK(choose_marking(anticanonical()).min_slack == 0);
  CHECK(choose_marking(CurveClass{}).index == 0);
  CHECK_THROWS_AS(choose_marking(E(1)), Error);
}

TEST_CASE("polytope volumes") {
  // Standard simplex in six coordinates.
  std::vector<Halfspace> simplex;
  for (int j = 0; j < 6; ++j) {
    Halfspace h{std::vector<mpq_class>(6, 0), 0};
    h.a[j] = -1;
    simplex.push_back(h);
  }
  simplex.push_back(Halfspace{std::vector<mpq_class>(6, 1), 1});
  CHECK(polytope_volume(simplex, 6).volume == mpq_class(1, 720));
  // Unit square and a triangle in the plane.
  std::vector<Halfspace> square = {{{1, 0}, 1}, {{-1, 0}, 0}, {{0, 1}, 1}, {{0, -1}, 0}};
  CHECK(polytope_volume(square, 2).volume == 1);
  square.push_back({{1, 1}, mpq_class(3, 2)});
  CHECK(polytope_volume(square, 2).volume == mpq_class(7, 8));
  std::vector<Halfspace> open = {{{-1, 0}, 0}, {{0, -1}, 0}, {{0, 1}, 1}};
  CHECK_THROWS_AS(polytope_volume(open, 2), Error);

  const mpq_class v1 = nef_cone_volume(1);
  CHECK(v1 > 0);
  CHECK(nef_cone_volume(2) == 64 * v1);
  CHECK_THROWS_AS(cone_volume({F, Fp}, 1), Error);

  // Lattice-count oracle. The raw ratio converges like 1/d, so compare an
  // extrapolation through d = 20, 30, 40, 60, 80 (polynomial in 1/d).
  const std::vector<long long> ds = {20, 30, 40, 60, 80};
  std::vector<mpq_class> ys;
  for (long long d : ds) {
    mpz_class d6 = 1;
    for (int j = 0; j < 6; ++j) d6 *= long(d);
    ys.push_back(mpq_class(count_nef_points(d)) / mpq_class(d6));
  }
  // Lagrange interpolation in x = 1/d, evaluated at x = 0.
  mpq_class extrapolated = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    mpq_class w = 1;
    for (std::size_t j = 0; j < ds.size(); ++j)
      if (j != i) {
        const mpq_class xi(1, long(ds[i])), xj(1, long(ds[j]));
        w *= (0 - xj) / (xi - xj);
      }
    extrapolated += w * ys[i];
  }
  const double rel = std::abs(mpq_class(extrapolated / v1).get_d() - 1.0);
  CHECK(rel < 0.01);
  // The plain ratio at d = 30 is still well above the volume.
  CHECK(ys[1] > v1);
}

TEST_CASE("shrunken cone") {
  const mpq_class full = nef_cone_volume(1);
  const mpq_class a = shrunken_cone_volume(mpq_class(1, 10));
  const mpq_class b = shrunken_cone_volume(mpq_class(1, 4));
  CHECK(a > 0);
  CHECK(a < full);
  CHECK(b < a);
  CHECK(shrunken_cone_volume(1) == 0);

  const ShrunkenCone cone(mpq_class(1, 4));
  CHECK(cone.contains(F + Fp));
  CHECK_FALSE(cone.contains(anticanonical()));
  CHECK_FALSE(cone.contains(E(1)));
  const auto pts = enumerate_nef_points(12, cone);
  for (const auto& p : pts) CHECK(4 * ell_functional(p) >= p.h());
  CHECK(pts.size() < enumerate_nef_points(12).size());
  CHECK_THROWS_AS(ShrunkenCone(0), Error);
}

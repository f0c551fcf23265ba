#pragma once

// Neron-Severi lattice of the split quartic del Pezzo surface obtained by
// blowing up P^1 x P^1 in four points, basis (F, F', E1, E2, E3, E4).

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace manin {

// Coordinates in the basis (F, F', E1..E4): alpha = c0 F + c1 F' + sum c_{1+i} E_i.
// The intersection numbers with the basis are a = F.alpha = c1,
// a' = F'.alpha = c0 and k_i = E_i.alpha = -c_{1+i}.
struct CurveClass {
  std::array<long long, 6> c{};

  static CurveClass basis(int j);
  // Class with the given intersection numbers against F, F', E1..E4.
  static CurveClass from_intersections(long long a, long long a_prime, const std::array<long long, 4>& k);

  long long a() const { return c[1]; }
  long long a_prime() const { return c[0]; }
  long long k(int i) const { return -c[2 + i]; }
  long long h() const;  // -K . alpha
  std::string to_string() const;

  friend CurveClass operator+(const CurveClass& x, const CurveClass& y);
  friend CurveClass operator-(const CurveClass& x, const CurveClass& y);
  friend CurveClass operator*(long long s, const CurveClass& x);
  friend auto operator<=>(const CurveClass&, const CurveClass&) = default;
};

long long intersect(const CurveClass& x, const CurveClass& y);
CurveClass anticanonical();  // 2F + 2F' - sum E_i

// Intersection numbers of a class against a marking's (f, f', e1..e4).
struct MarkingCoords {
  long long a = 0;
  long long a_prime = 0;
  std::array<long long, 4> k{};

  long long sum_k() const { return k[0] + k[1] + k[2] + k[3]; }
  long long h() const { return 2 * a + 2 * a_prime - sum_k(); }
  friend auto operator<=>(const MarkingCoords&, const MarkingCoords&) = default;
};

struct Marking {
  CurveClass f, f_prime;
  std::array<CurveClass, 4> e;

  MarkingCoords coords(const CurveClass& alpha) const;
  // (2f - sum e).alpha and (2f' - sum e).alpha
  std::pair<long long, long long> slacks(const CurveClass& alpha) const;
  bool satisfies_invariants() const;
  friend auto operator<=>(const Marking&, const Marking&) = default;
};

// All lattice classes with x.x = self_intersection and -K.x = degree,
// by search in a box that is certified to contain every solution.
// Valid for self_intersection >= -1.
struct ClassSearch {
  std::vector<CurveClass> classes;
  long long s_min = 0, s_max = 0;  // bounds on c0 + c1
  long long e_bound = 0;           // bound on |c_{E_i}|
};
ClassSearch classes_with(long long self_intersection, long long degree);

const std::vector<CurveClass>& minus_one_classes();
const std::vector<CurveClass>& conic_classes();
// Identity marking first, then lexicographic.
const std::vector<Marking>& enumerate_markings();

bool is_nef(const CurveClass& alpha);

struct ChosenMarking {
  std::size_t index = 0;  // into enumerate_markings()
  long long min_slack = 0;
  MarkingCoords coords;
};
ChosenMarking choose_marking(const CurveClass& alpha);

// Max over markings of the smaller slack; an integer on lattice points.
long long ell_functional(const CurveClass& alpha);

class ShrunkenCone {
 public:
  explicit ShrunkenCone(mpq_class epsilon);
  const mpq_class& epsilon() const { return epsilon_; }
  bool contains(const CurveClass& alpha) const;

 private:
  mpq_class epsilon_;
};

std::vector<CurveClass> enumerate_nef_points(long long d, const std::optional<ShrunkenCone>& cone = std::nullopt);
// Number of nef lattice points with h <= d, without materializing them.
mpz_class count_nef_points(long long d);

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};
Signature gram_signature();
// Characteristic polynomial det(xI - G) of the Gram matrix, low to high.
std::vector<mpz_class> gram_charpoly();

// Volume of {alpha real : alpha.L >= 0 for L in inequalities, h(alpha) <= level}
// in basis coordinates.
mpq_class cone_volume(const std::vector<CurveClass>& inequalities, const mpq_class& level);
mpq_class nef_cone_volume(const mpq_class& level = 1);
// Volume of the part of the nef cone with ell >= epsilon * h and h <= level.
mpq_class shrunken_cone_volume(const mpq_class& epsilon, const mpq_class& level = 1);

}  // namespace manin

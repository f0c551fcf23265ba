#pragma once

// Brute-force counts of section pairs (s, t) and morphisms P^1 -> S over F_q,
// where S is P^1 x P^1 blown up in four F_q-points.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "manin/field.hpp"
#include "manin/projline.hpp"

namespace manin {

// An F_q-point of P^1: [x : 1], or [1 : 0] when inf is set.
struct P1Point {
  bool inf = false;
  FieldElem x;

  static P1Point affine(FieldElem v) { return P1Point{false, v}; }
  static P1Point infinity() { return P1Point{true, FieldElem()}; }
  std::string to_string() const;
  friend auto operator<=>(const P1Point&, const P1Point&) = default;
};

// Linear form on V = F_q^2 vanishing exactly on the line of p:
// [s1 : s2] = p iff lambda(s) = 0.
struct LinearForm {
  FieldElem c1, c2;  // lambda(s) = c1 s1 + c2 s2
};
LinearForm vanishing_form(const Field& F, const P1Point& p);

struct SurfaceConfig {
  Field field;
  std::array<std::pair<P1Point, P1Point>, 4> points;
  // False only for configurations accepted despite lying on a (1,1)-curve.
  bool general_position = true;

  LinearForm lambda(int i) const { return vanishing_form(field, points[i].first); }
  LinearForm lambda_prime(int i) const { return vanishing_form(field, points[i].second); }
  std::string describe() const;
};

// Determinant of the 4x4 matrix of (x0 y0, x0 y1, x1 y0, x1 y1) at the points.
FieldElem bidegree_determinant(const Field& F, const std::array<std::pair<P1Point, P1Point>, 4>& points);

// Certifies the configuration. With require_general_position = false a
// configuration on a (1,1)-curve is accepted and flagged instead.
SurfaceConfig validate_points(const Field& F, const std::array<std::pair<P1Point, P1Point>, 4>& points,
                              bool require_general_position = true);

// Deterministic default: over F_3 the diagonal (0,1,2,inf) x (0,1,2,inf),
// which necessarily lies on a (1,1)-curve; for q >= 4 the lexicographically
// first general configuration whose first coordinates are the first four
// points of P^1(F_q).
SurfaceConfig default_config(const Field& F);

struct SectionPair {
  std::array<BinaryForm, 2> s;  // degree a
  std::array<BinaryForm, 2> t;  // degree a'
};

struct MultiplicityProfile {
  std::array<int, 4> k{};
  bool s_ok = false;
  bool t_ok = false;
};

// k_i = deg gcd(lambda_i s, lambda'_i t). When both pullbacks vanish
// identically (only possible for constant maps onto the base point) k_i is 0.
MultiplicityProfile multiplicity_profile(const ProjectiveLine& P, const SectionPair& sp, const SurfaceConfig& cfg);

using KVector = std::array<int, 4>;
// A tuple of gcd divisors (w_1..w_4).
using DivisorTuple = std::array<EffectiveDivisor, 4>;

inline constexpr std::uint64_t kDefaultBudget = std::uint64_t(1) << 34;

enum class CountStrategy { Bucket, Raw };

// Histogram of valid section pairs of bidegree (a, a') by their contact
// vector k, optionally refined by the gcd divisors themselves.
struct SectionHistogram {
  int a = 0, a_prime = 0;
  std::map<KVector, std::uint64_t> by_k;
  std::optional<std::map<DivisorTuple, std::uint64_t>> by_divisor;
  std::uint64_t total() const;
};

class SectionCounter {
 public:
  SectionCounter(SurfaceConfig cfg, std::uint64_t budget = kDefaultBudget);

  const SurfaceConfig& config() const { return cfg_; }
  const ProjectiveLine& line() const { return line_; }
  std::uint64_t budget() const { return budget_; }

  // Estimated elementary operations for one (a, a') histogram.
  long double estimated_cost(int a, int a_prime, CountStrategy strategy) const;

  SectionHistogram histogram(int a, int a_prime, CountStrategy strategy = CountStrategy::Bucket,
                             bool with_divisors = false) const;

  std::uint64_t count_sections(int a, int a_prime, const KVector& k,
                               CountStrategy strategy = CountStrategy::Bucket) const;
  std::uint64_t count_morphisms(int a, int a_prime, const KVector& k) const;
  std::uint64_t fiber_count(const DivisorTuple& w, int a, int a_prime) const;

  // Tuples (T_1..T_4) with deg T_i = k_i and pairwise disjoint supports.
  std::vector<DivisorTuple> u_k_points(const KVector& k) const;

 private:
  SurfaceConfig cfg_;
  ProjectiveLine line_;
  std::uint64_t budget_;
  mutable std::mutex mutex_;
  mutable std::map<std::tuple<int, int, bool>, std::shared_ptr<const SectionHistogram>> cache_;
};

// Cardinality of P^n(F_q); 0 for n < 0.
std::uint64_t projective_space_size(long long q, int n);

}  // namespace manin

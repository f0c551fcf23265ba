#pragma once

// Configuration posets over closed points of P^1, expected codimension,
// Moebius functions and truncated sieve sums.
//
// A lattice element is a subspace A + B of V = V1 + V2 (both 2-dimensional)
// where A is V1, one of the four lines l_i, or 0, and B likewise in V2.
// A local condition at a closed point is a nondecreasing chain
// r_1 <= ... <= r_J of non-top elements; its multiplicity function is
// m(p) = #{j : r_j <= p}, and every saturated m arises this way.

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "manin/projline.hpp"
#include "manin/secenum.hpp"

namespace manin {

enum class LatticeKind {
  Listed,    // V, W_i, l_{i,1}, l_{i,2}, 0
  Extended,  // additionally V1 + 0 and 0 + V2
};

// Named linear functionals on V: s1, s2, t1, t2, lambda_i(s), lambda'_i(t).
enum class Functional : std::uint8_t { S1, S2, T1, T2, LamS0, LamS1, LamS2, LamS3, LamT0, LamT1, LamT2, LamT3 };

class QLattice {
 public:
  static const QLattice& of(LatticeKind kind);

  LatticeKind kind() const { return kind_; }
  int size() const { return int(elems_.size()); }
  int top() const { return 0; }
  int zero() const;
  int W(int i) const;
  int ell(int i, int j) const;  // j = 1: line in V1, j = 2: line in V2
  // -1 when the element is not part of this lattice.
  int find(const std::string& name) const;

  const std::string& name(int e) const { return names_[e]; }
  int corank(int e) const { return coranks_[e]; }
  bool leq(int x, int y) const { return leq_[x * size() + y]; }
  int meet(int x, int y) const { return meet_[x * size() + y]; }
  const std::vector<Functional>& annihilator(int e) const { return ann_[e]; }
  bool vanishes_on(Functional f, int e) const;

 private:
  struct Code {
    std::int8_t a, b;  // -1 whole, 0..3 line i, 4 zero
  };
  explicit QLattice(LatticeKind kind);
  int index_of(Code c) const;

  LatticeKind kind_;
  std::vector<Code> elems_;
  std::vector<std::string> names_;
  std::vector<int> coranks_;
  std::vector<char> leq_;
  std::vector<int> meet_;
  std::vector<std::vector<Functional>> ann_;
};

using Chain = std::vector<std::uint8_t>;

int chain_multiplicity(const QLattice& L, const Chain& r, int p);
int chain_corank(const QLattice& L, const Chain& r);
bool chain_valid(const QLattice& L, const Chain& r);
// x >= y pointwise on multiplicities.
bool chain_dominates(const QLattice& L, const Chain& x, const Chain& y);
// Inverse of chain_multiplicity. Throws NotSaturated when m does not come
// from a chain (m(p ^ q) != min(m(p), m(q)) somewhere, or not monotone).
Chain chain_from_multiplicities(const QLattice& L, const std::vector<int>& m);
std::string chain_to_string(const QLattice& L, const Chain& r);

// Finitely supported map from closed points to nonempty chains.
class Configuration {
 public:
  Configuration() = default;
  const std::map<ClosedPoint, Chain>& local() const { return local_; }
  void set(const ClosedPoint& c, Chain r);
  const Chain& at(const ClosedPoint& c) const;
  bool empty() const { return local_.empty(); }
  // sum deg(c) * length of the chain at c
  int degree() const;
  std::string to_string(const QLattice& L, const Field& F) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration& a, const Configuration& b) { return a.local_ <=> b.local_; }

 private:
  std::map<ClosedPoint, Chain> local_;
};

// Configuration induced by w: chain W_i^e at every point of multiplicity e in w_i.
Configuration induced_configuration(const QLattice& L, const DivisorTuple& w);

int gamma(const QLattice& L, const Configuration& x);
bool dominates(const QLattice& L, const Configuration& x, const Configuration& y);

// Codimension of the space of (s, t) of bidegree (a, a') satisfying the
// vanishing conditions of x, by exact rank over F_q.
int gamma_rank_oracle(const QLattice& L, const Configuration& x, int a, int a_prime, const SurfaceConfig& cfg);
// q^{2a + 2a' + 4 - gamma_rank_oracle(x_w)}: the size of E_w.
mpz_class e_w_count(const QLattice& L, const DivisorTuple& w, int a, int a_prime, const SurfaceConfig& cfg);

// All local chains with total corank <= max_corank (nonempty ones only
// unless include_empty).
std::vector<Chain> local_chains(const QLattice& L, int max_corank, bool include_empty = false);

// All x >= x_w with gamma(x) <= gamma(x_w) + D, deterministic order (x_w first).
std::vector<Configuration> enumerate_configs_above(const QLattice& L, const ProjectiveLine& P, const DivisorTuple& w,
                                                   int D, std::size_t limit = 2'000'000);

// Every configuration with 0 < degree() <= max_degree (chains of length
// len at a point of degree d cost d * len).
std::vector<Configuration> configurations_up_to_degree(const QLattice& L, const ProjectiveLine& P, int max_degree,
                                                       std::size_t limit = 2'000'000);

// Moebius function of one local interval [y, x], by the defining recursion.
long long local_mobius(const QLattice& L, const Chain& y, const Chain& x);
// Moebius function of the configuration poset by the defining recursion over
// the whole interval; does not use multiplicativity.
long long mobius(const QLattice& L, const Configuration& w, const Configuration& x);
// Product of local values.
long long mobius_product(const QLattice& L, const Configuration& w, const Configuration& x);

struct SieveSum {
  mpq_class value;
  std::size_t terms = 0;
};
// sum over w in U_k and x above x_w (codimension excess <= D) of mu(x_w, x) q^{-gamma(x)}.
SieveSum sieve_sum(const QLattice& L, const SectionCounter& counter, const KVector& k, int D);

// The stable-range parameter floor(min(2a+1-sum k, 2a'+1-sum k)/8 - 1/2).
long long stable_range_I(long long a, long long a_prime, const KVector& k);

struct SievePrediction {
  long long a = 0, a_prime = 0;
  KVector k{};
  int D = 0;
  mpq_class value;  // q^{2a+2a'+4} * sieve_sum
  long long I = 0;
};
SievePrediction sieve_prediction(const QLattice& L, const SectionCounter& counter, long long a, long long a_prime,
                                 const KVector& k, int D);

// Local sums in the variable u = q^{-deg c}, coefficients of u^0..u^N:
//   sum_x mu(empty, x) u^{corank(x)}           (local_sum_free)
//   sum_{x >= W_1^d} mu(W_1^d, x) u^{corank(x)} (local_sum_above)
std::vector<long long> local_sum_free(const QLattice& L, int N);
std::vector<long long> local_sum_above(const QLattice& L, const Chain& base, int N);

}  // namespace manin

#include "manin/nslattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "manin/error.hpp"
#include "manin/polytope.hpp"

namespace manin {

CurveClass CurveClass::basis(int j) {
  CurveClass x;
  x.c[j] = 1;
  return x;
}

CurveClass CurveClass::from_intersections(long long a, long long a_prime, const std::array<long long, 4>& k) {
  CurveClass x;
  x.c[0] = a_prime;
  x.c[1] = a;
  for (int i = 0; i < 4; ++i) x.c[2 + i] = -k[i];
  return x;
}

long long CurveClass::h() const { return 2 * c[0] + 2 * c[1] + c[2] + c[3] + c[4] + c[5]; }

std::string CurveClass::to_string() const {
  std::ostringstream out;
  out << "(";
  for (int j = 0; j < 6; ++j) out << (j ? "," : "") << c[j];
  out << ")";
  return out.str();
}

CurveClass operator+(const CurveClass& x, const CurveClass& y) {
  CurveClass z;
  for (int j = 0; j < 6; ++j) z.c[j] = x.c[j] + y.c[j];
  return z;
}

CurveClass operator-(const CurveClass& x, const CurveClass& y) {
  CurveClass z;
  for (int j = 0; j < 6; ++j) z.c[j] = x.c[j] - y.c[j];
  return z;
}

CurveClass operator*(long long s, const CurveClass& x) {
  CurveClass z;
  for (int j = 0; j < 6; ++j) z.c[j] = s * x.c[j];
  return z;
}

long long intersect(const CurveClass& x, const CurveClass& y) {
  long long v = x.c[0] * y.c[1] + x.c[1] * y.c[0];
  for (int j = 2; j < 6; ++j) v -= x.c[j] * y.c[j];
  return v;
}

CurveClass anticanonical() { return CurveClass{{2, 2, -1, -1, -1, -1}}; }

MarkingCoords Marking::coords(const CurveClass& alpha) const {
  MarkingCoords m;
  m.a = intersect(f, alpha);
  m.a_prime = intersect(f_prime, alpha);
  for (int i = 0; i < 4; ++i) m.k[i] = intersect(e[i], alpha);
  return m;
}

std::pair<long long, long long> Marking::slacks(const CurveClass& alpha) const {
  const MarkingCoords m = coords(alpha);
  return {2 * m.a - m.sum_k(), 2 * m.a_prime - m.sum_k()};
}

bool Marking::satisfies_invariants() const {
  if (intersect(f, f) != 0 || intersect(f_prime, f_prime) != 0 || intersect(f, f_prime) != 1) return false;
  for (int i = 0; i < 4; ++i) {
    if (intersect(f, e[i]) != 0 || intersect(f_prime, e[i]) != 0) return false;
    for (int j = 0; j < 4; ++j)
      if (intersect(e[i], e[j]) != (i == j ? -1 : 0)) return false;
  }
  CurveClass k = 2 * f + 2 * f_prime;
  for (const auto& x : e) k = k - x;
  return k == anticanonical();
}

ClassSearch classes_with(long long m, long long h) {
  // With s = c0 + c1 and z = (c_{E_i}): x.x = 2 c0 c1 - |z|^2 <= s^2/2 - (h - 2s)^2/4,
  // so 2s^2 - 4hs + h^2 + 4m <= 0, and |z_i|^2 <= s^2/2 - m.
  ClassSearch out;
  auto admissible = [&](long long s) { return 2 * s * s - 4 * h * s + h * h + 4 * m <= 0; };
  const double r = std::sqrt(std::max(0.0, double(h) * h / 2.0 - 2.0 * m));
  long long lo = static_cast<long long>(std::floor(h - r)) - 2;
  long long hi = static_cast<long long>(std::ceil(h + r)) + 2;
  while (lo <= hi && !admissible(lo)) ++lo;
  while (hi >= lo && !admissible(hi)) --hi;
  if (lo > hi) return out;
  out.s_min = lo;
  out.s_max = hi;
  const long long s_abs = std::max(std::llabs(lo), std::llabs(hi));
  long long zb = 0;
  while (2 * (zb + 1) * (zb + 1) <= s_abs * s_abs - 2 * m) ++zb;
  out.e_bound = zb;

  for (long long s = lo; s <= hi; ++s) {
    const long long zsum = h - 2 * s;
    std::array<long long, 4> z{};
    auto rec = [&](auto&& self, int i, long long partial) -> void {
      if (i == 3) {
        z[3] = zsum - partial;
        if (std::llabs(z[3]) > zb) return;
        long long sq = 0;
        for (long long v : z) sq += v * v;
        if ((m + sq) % 2 != 0) return;
        const long long p = (m + sq) / 2;
        for (long long c0 = -std::llabs(s) - zb - 2; c0 <= std::llabs(s) + zb + 2; ++c0) {
          const long long c1 = s - c0;
          if (c0 * c1 != p) continue;
          CurveClass x{{c0, c1, z[0], z[1], z[2], z[3]}};
          if (intersect(x, x) == m && intersect(anticanonical(), x) == h) out.classes.push_back(x);
        }
        return;
      }
      for (long long v = -zb; v <= zb; ++v) {
        z[i] = v;
        self(self, i + 1, partial + v);
      }
    };
    rec(rec, 0, 0);
  }
  std::sort(out.classes.begin(), out.classes.end());
  out.classes.erase(std::unique(out.classes.begin(), out.classes.end()), out.classes.end());
  return out;
}

const std::vector<CurveClass>& minus_one_classes() {
  static const std::vector<CurveClass> classes = classes_with(-1, 1).classes;
  return classes;
}

const std::vector<CurveClass>& conic_classes() {
  static const std::vector<CurveClass> classes = classes_with(0, 2).classes;
  return classes;
}

namespace {

std::vector<Marking> build_markings() {
  const auto& lines = minus_one_classes();
  const auto& conics = conic_classes();
  const CurveClass mk = anticanonical();
  std::vector<Marking> out;
  const std::size_t n = lines.size();
  for (std::size_t i0 = 0; i0 < n; ++i0)
    for (std::size_t i1 = 0; i1 < n; ++i1)
      for (std::size_t i2 = 0; i2 < n; ++i2)
        for (std::size_t i3 = 0; i3 < n; ++i3) {
          const std::array<CurveClass, 4> e{lines[i0], lines[i1], lines[i2], lines[i3]};
          bool disjoint = true;
          for (int a = 0; a < 4 && disjoint; ++a)
            for (int b = a + 1; b < 4 && disjoint; ++b)
              if (intersect(e[a], e[b]) != 0) disjoint = false;
          if (!disjoint) continue;
          const CurveClass sum_e = e[0] + e[1] + e[2] + e[3];
          for (const CurveClass& f : conics) {
            bool orth = true;
            for (const auto& x : e)
              if (intersect(f, x) != 0) orth = false;
            if (!orth) continue;
            const CurveClass twice = mk + sum_e - 2 * f;
            bool even = true;
            for (long long v : twice.c)
              if (v % 2 != 0) even = false;
            if (!even) continue;
            CurveClass fp;
            for (int j = 0; j < 6; ++j) fp.c[j] = twice.c[j] / 2;
            Marking mk_{f, fp, e};
            if (mk_.satisfies_invariants()) out.push_back(mk_);
          }
        }
  const Marking identity{CurveClass::basis(0), CurveClass::basis(1),
                         {CurveClass::basis(2), CurveClass::basis(3), CurveClass::basis(4), CurveClass::basis(5)}};
  std::sort(out.begin(), out.end());
  auto it = std::find(out.begin(), out.end(), identity);
  if (it == out.end()) throw Error(ErrorCode::InvariantViolation, "identity marking missing from search");
  std::rotate(out.begin(), it, it + 1);
  return out;
}

// Distinct (f, f') pairs occurring in markings.
const std::vector<std::pair<CurveClass, CurveClass>>& marking_pairs() {
  static const std::vector<std::pair<CurveClass, CurveClass>> pairs = [] {
    std::set<std::pair<CurveClass, CurveClass>> s;
    for (const auto& m : enumerate_markings()) s.emplace(m.f, m.f_prime);
    return std::vector<std::pair<CurveClass, CurveClass>>(s.begin(), s.end());
  }();
  return pairs;
}

void require_nef(const CurveClass& alpha) {
  if (!is_nef(alpha)) throw Error(ErrorCode::NotNef, "class " + alpha.to_string() + " is not nef");
}

}  // namespace

const std::vector<Marking>& enumerate_markings() {
  static const std::vector<Marking> markings = build_markings();
  return markings;
}

bool is_nef(const CurveClass& alpha) {
  for (const auto& l : minus_one_classes())
    if (intersect(alpha, l) < 0) return false;
  return true;
}

ChosenMarking choose_marking(const CurveClass& alpha) {
  require_nef(alpha);
  const auto& markings = enumerate_markings();
  ChosenMarking best;
  bool found = false;
  for (std::size_t i = 0; i < markings.size(); ++i) {
    const auto [s1, s2] = markings[i].slacks(alpha);
    const long long v = std::min(s1, s2);
    if (!found || v > best.min_slack) {
      best.index = i;
      best.min_slack = v;
      found = true;
    }
  }
  if (best.min_slack < 0)
    throw Error(ErrorCode::LemmaViolation, "no marking with non-negative slack for " + alpha.to_string());
  best.coords = markings[best.index].coords(alpha);
  return best;
}

long long ell_functional(const CurveClass& alpha) {
  require_nef(alpha);
  // min(2f.a - e.a, 2f'.a - e.a) = h - 2 max(f.a, f'.a) since -K = 2f + 2f' - sum e.
  long long best = 0;
  bool found = false;
  for (const auto& [f, fp] : marking_pairs()) {
    const long long v = std::max(intersect(f, alpha), intersect(fp, alpha));
    if (!found || v < best) best = v;
    found = true;
  }
  return alpha.h() - 2 * best;
}

ShrunkenCone::ShrunkenCone(mpq_class epsilon) : epsilon_(std::move(epsilon)) {
  epsilon_.canonicalize();
  if (epsilon_ <= 0) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
}

bool ShrunkenCone::contains(const CurveClass& alpha) const {
  if (!is_nef(alpha)) return false;
  return mpq_class(long(ell_functional(alpha))) >= epsilon_ * long(alpha.h());
}

std::vector<CurveClass> enumerate_nef_points(long long d, const std::optional<ShrunkenCone>& cone) {
  std::vector<CurveClass> out;
  if (d < 0) return out;
  for (long long a = 0; 2 * a <= 3 * d; ++a)
    for (long long ap = 0; 2 * (a + ap) <= 3 * d; ++ap) {
      const long long s = a + ap;
      const long long kmax = std::min(a, ap);
      std::array<long long, 4> k{};
      for (k[0] = 0; k[0] <= kmax; ++k[0])
        for (k[1] = 0; k[1] <= kmax; ++k[1])
          for (k[2] = 0; k[2] <= kmax; ++k[2])
            for (k[3] = 0; k[3] <= kmax; ++k[3]) {
              const long long h = 2 * s - (k[0] + k[1] + k[2] + k[3]);
              if (h > d) continue;
              const CurveClass alpha = CurveClass::from_intersections(a, ap, k);
              if (!is_nef(alpha)) continue;
              if (cone && !cone->contains(alpha)) continue;
              out.push_back(alpha);
            }
    }
  return out;
}

mpz_class count_nef_points(long long d) {
  mpz_class total = 0;
  if (d < 0) return total;
  for (long long a = 0; 2 * a <= 3 * d; ++a)
    for (long long ap = 0; 2 * (a + ap) <= 3 * d; ++ap) {
      const long long s = a + ap;
      const long long kmax = std::min(a, ap);
      for (long long k1 = 0; k1 <= kmax; ++k1)
        for (long long k2 = 0; k2 <= kmax; ++k2)
          for (long long k3 = 0; k3 <= kmax; ++k3) {
            if (k1 + k2 + k3 > s) continue;
            long long hi = std::min({kmax, s - k1 - k2, s - k1 - k3, s - k2 - k3});
            long long lo = std::max(0LL, 2 * s - d - (k1 + k2 + k3));
            if (hi >= lo) total += long(hi - lo + 1);
          }
    }
  return total;
}

std::vector<mpz_class> gram_charpoly() {
  // Faddeev-LeVerrier: M_k = G M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(G M_k) / k.
  constexpr int n = 6;
  using Mat = std::array<std::array<mpz_class, n>, n>;
  Mat G{};
  for (auto& row : G) row.fill(0);
  G[0][1] = G[1][0] = 1;
  for (int j = 2; j < n; ++j) G[j][j] = -1;
  std::vector<mpz_class> c(n + 1, 0);
  c[n] = 1;
  Mat M{};
  for (auto& row : M) row.fill(0);
  for (int k = 1; k <= n; ++k) {
    Mat next{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        mpz_class s = 0;
        for (int l = 0; l < n; ++l) s += G[i][l] * M[l][j];
        if (i == j) s += c[n - k + 1];
        next[i][j] = s;
      }
    M = next;
    mpz_class tr = 0;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) tr += G[i][l] * M[l][i];
    c[n - k] = -tr / k;
  }
  return c;
}

Signature gram_signature() {
  const auto c = gram_charpoly();
  auto sign_changes = [](const std::vector<mpz_class>& p) {
    int changes = 0, last = 0;
    for (const auto& x : p) {
      const int s = sgn(x);
      if (s == 0) continue;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  };
  // The Gram matrix is symmetric, so all roots are real and Descartes'
  // rule is exact.
  Signature sig;
  std::size_t z = 0;
  while (z < c.size() && c[z] == 0) ++z;
  sig.zero = int(z);
  std::vector<mpz_class> reflected(c);
  for (std::size_t j = 1; j < reflected.size(); j += 2) reflected[j] = -reflected[j];
  sig.positive = sign_changes(c);
  sig.negative = sign_changes(reflected);
  return sig;
}

namespace {

// alpha.L as a linear form in basis coordinates.
std::vector<mpq_class> pairing_row(const CurveClass& L) {
  std::vector<mpq_class> r(6);
  for (int j = 0; j < 6; ++j) {
    CurveClass e = CurveClass::basis(j);
    r[j] = long(intersect(e, L));
  }
  return r;
}

Halfspace at_least_zero(const CurveClass& L) {
  Halfspace h;
  for (const auto& v : pairing_row(L)) h.a.push_back(-v);
  h.b = 0;
  return h;
}

Halfspace level_cut(const mpq_class& level) {
  return Halfspace{pairing_row(anticanonical()), level};
}

// c.alpha <= tau h (upper = true) or c.alpha >= tau h.
Halfspace conic_cut(const CurveClass& c, const mpq_class& tau, bool upper) {
  const auto rc = pairing_row(c);
  const auto rk = pairing_row(anticanonical());
  Halfspace h;
  for (int j = 0; j < 6; ++j) {
    mpq_class v = rc[j] - tau * rk[j];
    h.a.push_back(upper ? v : mpq_class(-v));
  }
  h.b = 0;
  return h;
}

}  // namespace

mpq_class cone_volume(const std::vector<CurveClass>& inequalities, const mpq_class& level) {
  if (level < 0) throw Error(ErrorCode::DegenerateInput, "negative level");
  if (level == 0) return 0;
  std::vector<Halfspace> hs;
  for (const auto& L : inequalities) hs.push_back(at_least_zero(L));
  hs.push_back(level_cut(level));
  return polytope_volume(hs, 6).volume;
}

mpq_class nef_cone_volume(const mpq_class& level) { return cone_volume(minus_one_classes(), level); }

mpq_class shrunken_cone_volume(const mpq_class& epsilon, const mpq_class& level) {
  if (epsilon <= 0) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
  if (epsilon >= 1 || level <= 0) return 0;
  // ell >= eps h iff some marking pair (f, f') has f.alpha, f'.alpha <= tau h.
  // The complement splits by the set T of conics c with c.alpha <= tau h;
  // T contains no marking pair. Two conics that are not a marking pair sum
  // to -K, and both being <= tau h < h/2 forces h = 0, so up to measure zero
  // T is empty or a single conic.
  const mpq_class tau = (1 - epsilon) / 2;
  const auto& conics = conic_classes();
  std::set<std::pair<CurveClass, CurveClass>> edges;
  for (const auto& [f, fp] : marking_pairs()) {
    edges.emplace(f, fp);
    edges.emplace(fp, f);
  }
  for (std::size_t i = 0; i < conics.size(); ++i)
    for (std::size_t j = i + 1; j < conics.size(); ++j)
      if (!edges.count({conics[i], conics[j]}) && !(conics[i] + conics[j] == anticanonical()))
        throw Error(ErrorCode::InvariantViolation, "unexpected non-adjacent conic pair");

  std::vector<Halfspace> base;
  for (const auto& L : minus_one_classes()) base.push_back(at_least_zero(L));
  base.push_back(level_cut(level));
  mpq_class volume = polytope_volume(base, 6).volume;
  for (int singled = -1; singled < int(conics.size()); ++singled) {
    std::vector<Halfspace> hs = base;
    for (int j = 0; j < int(conics.size()); ++j) hs.push_back(conic_cut(conics[j], tau, j == singled));
    volume -= polytope_volume(hs, 6).volume;
  }
  return volume;
}

}  // namespace manin

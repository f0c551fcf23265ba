#include "manin/secenum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "manin/error.hpp"

namespace manin {

std::string P1Point::to_string() const { return inf ? std::string("inf") : std::to_string(x.index()); }

LinearForm vanishing_form(const Field& F, const P1Point& p) {
  if (p.inf) return LinearForm{F.zero(), F.one()};
  return LinearForm{F.one(), F.neg(p.x)};
}

std::string SurfaceConfig::describe() const {
  std::ostringstream os;
  os << "q=" << field.q() << " points=";
  for (int i = 0; i < 4; ++i)
    os << (i ? "," : "") << "(" << points[i].first.to_string() << "," << points[i].second.to_string() << ")";
  if (!general_position) os << " [on a (1,1)-curve]";
  return os.str();
}

namespace {

std::array<FieldElem, 2> homogeneous(const Field& F, const P1Point& p) {
  if (p.inf) return {F.one(), F.zero()};
  return {p.x, F.one()};
}

FieldElem det4(const Field& F, std::array<std::array<FieldElem, 4>, 4> m) {
  FieldElem det = F.one();
  for (int col = 0; col < 4; ++col) {
    int piv = -1;
    for (int r = col; r < 4; ++r)
      if (!m[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) return F.zero();
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = F.neg(det);
    }
    det = F.mul(det, m[col][col]);
    const FieldElem inv = F.inv(m[col][col]);
    for (int r = col + 1; r < 4; ++r) {
      const FieldElem f = F.mul(m[r][col], inv);
      if (f.is_zero()) continue;
      for (int c = col; c < 4; ++c) m[r][c] = F.sub(m[r][c], F.mul(f, m[col][c]));
    }
  }
  return det;
}

std::vector<P1Point> p1_points(const Field& F) {
  std::vector<P1Point> out;
  for (FieldElem x : F.elements()) out.push_back(P1Point::affine(x));
  out.push_back(P1Point::infinity());
  return out;
}

BinaryForm apply(const Field& F, const LinearForm& l, const std::array<BinaryForm, 2>& s) {
  BinaryForm r = BinaryForm::zero(s[0].degree);
  for (int j = 0; j <= s[0].degree; ++j)
    r.coeffs[j] = F.add(F.mul(l.c1, s[0].coeffs[j]), F.mul(l.c2, s[1].coeffs[j]));
  return r;
}

// No common zero on P^1 (and not both zero).
bool coprime_pair(const Field& F, const std::array<BinaryForm, 2>& s) {
  const bool z0 = s[0].is_zero(), z1 = s[1].is_zero();
  if (z0 && z1) return false;
  const int d = s[0].degree;
  if (d == 0) return true;
  if (s[0].coeffs[d].is_zero() && s[1].coeffs[d].is_zero()) return false;  // both vanish at infinity
  return poly::degree(poly::gcd(F, s[0].dehomogenized(), s[1].dehomogenized())) <= 0;
}

long double power(long double b, int e) {
  long double r = 1;
  for (int j = 0; j < e; ++j) r *= b;
  return r;
}

std::array<BinaryForm, 2> decode(const Field& F, int a, std::uint64_t index) {
  std::array<BinaryForm, 2> s{BinaryForm::zero(a), BinaryForm::zero(a)};
  const std::uint64_t q = F.q();
  for (int f = 0; f < 2; ++f)
    for (int j = 0; j <= a; ++j) {
      s[f].coeffs[j] = FieldElem(std::uint16_t(index % q));
      index /= q;
    }
  return s;
}

// Leading (first) nonzero coefficient equals one: one representative per
// scalar class.
bool normalized(const std::array<BinaryForm, 2>& s) {
  for (const auto& f : s)
    for (FieldElem c : f.coeffs)
      if (!c.is_zero()) return c.index() == 1;
  return false;
}

std::vector<std::array<BinaryForm, 2>> coprime_representatives(const Field& F, int a) {
  std::uint64_t total = 1;
  for (int j = 0; j < 2 * a + 2; ++j) total *= F.q();
  std::vector<std::array<BinaryForm, 2>> out;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    auto s = decode(F, a, idx);
    if (normalized(s) && coprime_pair(F, s)) out.push_back(std::move(s));
  }
  return out;
}

struct Contact {
  std::uint8_t i;
  std::uint32_t point;
  std::uint8_t order;
};

// Interns closed points so that the join works on small integers.
class PointIndex {
 public:
  std::uint32_t id(const ClosedPoint& c) {
    auto [it, fresh] = ids_.try_emplace(c, std::uint32_t(points_.size()));
    if (fresh) points_.push_back(c);
    return it->second;
  }
  const ClosedPoint& point(std::uint32_t id) const { return points_[id]; }
  int degree(std::uint32_t id) const { return points_[id].degree(); }
  std::size_t size() const { return points_.size(); }

 private:
  std::map<ClosedPoint, std::uint32_t> ids_;
  std::vector<ClosedPoint> points_;
};

std::vector<Contact> contacts(const ProjectiveLine& P, const std::array<BinaryForm, 2>& s,
                              const std::array<LinearForm, 4>& lams, PointIndex& index) {
  std::vector<Contact> out;
  for (int i = 0; i < 4; ++i) {
    const BinaryForm pulled = apply(P.field(), lams[i], s);
    // Only constant sections can pull back to zero, and those are routed to
    // the pairwise path.
    if (pulled.is_zero()) throw Error(ErrorCode::InvariantViolation, "zero pullback in bucket path");
    const EffectiveDivisor D = P.divisor_of_form(pulled);
    for (const auto& [c, m] : D.entries())
      out.push_back(Contact{std::uint8_t(i), index.id(c), std::uint8_t(m)});
  }
  return out;
}

DivisorTuple tuple_from(const std::vector<Contact>& cs, const PointIndex& index) {
  std::array<std::vector<EffectiveDivisor::Entry>, 4> entries;
  for (const auto& c : cs) entries[c.i].emplace_back(index.point(c.point), c.order);
  DivisorTuple out;
  for (int i = 0; i < 4; ++i) out[i] = EffectiveDivisor::from_entries(std::move(entries[i]));
  return out;
}

}  // namespace

FieldElem bidegree_determinant(const Field& F, const std::array<std::pair<P1Point, P1Point>, 4>& points) {
  std::array<std::array<FieldElem, 4>, 4> m;
  for (int i = 0; i < 4; ++i) {
    const auto x = homogeneous(F, points[i].first), y = homogeneous(F, points[i].second);
    m[i] = {F.mul(x[0], y[0]), F.mul(x[0], y[1]), F.mul(x[1], y[0]), F.mul(x[1], y[1])};
  }
  return det4(F, m);
}

SurfaceConfig validate_points(const Field& F, const std::array<std::pair<P1Point, P1Point>, 4>& points,
                              bool require_general_position) {
  if (F.q() < 3) throw Error(ErrorCode::FieldTooSmall, "need q >= 3 for four distinct points on P^1");
  for (const auto& [x, y] : points)
    for (const P1Point& p : {x, y})
      if (!p.inf && p.x.index() >= F.q()) throw Error(ErrorCode::InvalidConfig, "point outside the field");
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (points[i].first == points[j].first)
        throw Error(ErrorCode::CoincidentFirstCoords, "p_" + std::to_string(i + 1) + " = p_" + std::to_string(j + 1));
      if (points[i].second == points[j].second)
        throw Error(ErrorCode::CoincidentSecondCoords,
                    "p'_" + std::to_string(i + 1) + " = p'_" + std::to_string(j + 1));
    }
  const bool general = !bidegree_determinant(F, points).is_zero();
  if (!general && require_general_position)
    throw Error(ErrorCode::OnBidegreeCurve, "a (1,1)-curve passes through all four points");
  return SurfaceConfig{F, points, general};
}

SurfaceConfig default_config(const Field& F) {
  if (F.q() < 3) throw Error(ErrorCode::FieldTooSmall, "need q >= 3");
  const auto pts = p1_points(F);
  std::array<std::pair<P1Point, P1Point>, 4> cfg;
  if (F.q() == 3) {
    // Every configuration over F_3 lies on the graph of a Moebius map.
    for (int i = 0; i < 4; ++i) cfg[i] = {pts[i], pts[i]};
    return validate_points(F, cfg, false);
  }
  for (int i = 0; i < 4; ++i) cfg[i].first = pts[i];
  const std::size_t n = pts.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
          cfg[0].second = pts[a];
          cfg[1].second = pts[b];
          cfg[2].second = pts[c];
          cfg[3].second = pts[d];
          if (!bidegree_determinant(F, cfg).is_zero()) return validate_points(F, cfg);
        }
  throw Error(ErrorCode::InvariantViolation, "no general configuration found");
}

MultiplicityProfile multiplicity_profile(const ProjectiveLine& P, const SectionPair& sp, const SurfaceConfig& cfg) {
  const Field& F = P.field();
  if (sp.s[0].is_zero() && sp.s[1].is_zero()) throw Error(ErrorCode::ZeroSection, "s is identically zero");
  if (sp.t[0].is_zero() && sp.t[1].is_zero()) throw Error(ErrorCode::ZeroSection, "t is identically zero");
  MultiplicityProfile out;
  for (int i = 0; i < 4; ++i) {
    const BinaryForm ls = apply(F, cfg.lambda(i), sp.s), lt = apply(F, cfg.lambda_prime(i), sp.t);
    out.k[i] = (ls.is_zero() && lt.is_zero()) ? 0 : P.form_gcd(ls, lt).degree();
  }
  out.s_ok = coprime_pair(F, sp.s);
  out.t_ok = coprime_pair(F, sp.t);
  return out;
}

std::uint64_t SectionHistogram::total() const {
  std::uint64_t t = 0;
  for (const auto& [k, n] : by_k) t += n;
  return t;
}

std::uint64_t projective_space_size(long long q, int n) {
  if (n < 0) return 0;
  std::uint64_t r = 1;
  for (int j = 0; j < n; ++j) r = r * std::uint64_t(q) + 1;
  return r;
}

SectionCounter::SectionCounter(SurfaceConfig cfg, std::uint64_t budget)
    : cfg_(std::move(cfg)), line_(cfg_.field), budget_(budget) {}

long double SectionCounter::estimated_cost(int a, int a_prime, CountStrategy strategy) const {
  const long double q = cfg_.field.q();
  const long double s = power(q, 2 * a + 2), t = power(q, 2 * a_prime + 2);
  if (strategy == CountStrategy::Raw) return s * t;
  return s + t + s * t / ((q - 1) * (q - 1));
}

SectionHistogram SectionCounter::histogram(int a, int a_prime, CountStrategy strategy, bool with_divisors) const {
  if (a < 0 || a_prime < 0) throw Error(ErrorCode::InvalidConfig, "negative bidegree");
  const long double cost = estimated_cost(a, a_prime, strategy);
  if (cost > static_cast<long double>(budget_))
    throw Error(ErrorCode::BudgetExceeded, "estimated " + std::to_string(double(cost)) + " operations for (a, a') = (" +
                                               std::to_string(a) + ", " + std::to_string(a_prime) + ")");
  if (strategy == CountStrategy::Bucket) {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(std::make_tuple(a, a_prime, with_divisors));
    if (it != cache_.end()) return *it->second;
    if (!with_divisors) {
      it = cache_.find(std::make_tuple(a, a_prime, true));
      if (it != cache_.end()) return *it->second;
    }
  }

  const Field& F = cfg_.field;
  const std::uint64_t units = std::uint64_t(F.q() - 1) * std::uint64_t(F.q() - 1);
  std::array<LinearForm, 4> lam, lamp;
  for (int i = 0; i < 4; ++i) {
    lam[i] = cfg_.lambda(i);
    lamp[i] = cfg_.lambda_prime(i);
  }
  SectionHistogram out;
  out.a = a;
  out.a_prime = a_prime;
  if (with_divisors) out.by_divisor.emplace();

  auto record_pair = [&](const std::array<BinaryForm, 2>& s, const std::array<BinaryForm, 2>& t, std::uint64_t weight) {
    KVector k{};
    DivisorTuple w;
    for (int i = 0; i < 4; ++i) {
      const BinaryForm ls = apply(F, lam[i], s), lt = apply(F, lamp[i], t);
      if (ls.is_zero() && lt.is_zero()) continue;
      w[i] = line_.form_gcd(ls, lt);
      k[i] = w[i].degree();
    }
    out.by_k[k] += weight;
    if (with_divisors) (*out.by_divisor)[w] += weight;
  };

  if (strategy == CountStrategy::Raw) {
    // Every coefficient tuple on both sides, no scalar reduction.
    std::uint64_t ns = 1, nt = 1;
    for (int j = 0; j < 2 * a + 2; ++j) ns *= F.q();
    for (int j = 0; j < 2 * a_prime + 2; ++j) nt *= F.q();
    std::vector<std::array<BinaryForm, 2>> ts;
    for (std::uint64_t j = 0; j < nt; ++j) {
      auto t = decode(F, a_prime, j);
      if (coprime_pair(F, t)) ts.push_back(std::move(t));
    }
    for (std::uint64_t j = 0; j < ns; ++j) {
      const auto s = decode(F, a, j);
      if (!coprime_pair(F, s)) continue;
      for (const auto& t : ts) record_pair(s, t, 1);
    }
  } else if (a == 0 || a_prime == 0) {
    // Constant maps on one side: few representatives, pair them directly.
    const auto ss = coprime_representatives(F, a), ts = coprime_representatives(F, a_prime);
    for (const auto& s : ss)
      for (const auto& t : ts) record_pair(s, t, units);
  } else {
    PointIndex index;
    const auto ss = coprime_representatives(F, a), ts = coprime_representatives(F, a_prime);
    std::vector<std::vector<Contact>> s_contacts;
    s_contacts.reserve(ss.size());
    for (const auto& s : ss) s_contacts.push_back(contacts(line_, s, lam, index));
    // t side, bucketed by (i, point).
    std::vector<std::array<std::vector<std::pair<std::uint32_t, std::uint8_t>>, 4>> lists;
    for (std::uint32_t j = 0; j < ts.size(); ++j)
      for (const auto& c : contacts(line_, ts[j], lamp, index)) {
        if (lists.size() <= c.point) lists.resize(c.point + 1);
        lists[c.point][c.i].emplace_back(j, c.order);
      }
    lists.resize(index.size());
    std::vector<int> degree(index.size());
    for (std::uint32_t p = 0; p < index.size(); ++p) degree[p] = index.degree(p);

    // Disjoint ranges of s representatives, merged by addition.
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t chunks = with_divisors ? 1 : std::min<std::size_t>(hw, std::max<std::size_t>(1, ss.size() / 64));
    std::vector<std::map<KVector, std::uint64_t>> partial(chunks);
    std::map<DivisorTuple, std::uint64_t> divisor_counts;
    auto work = [&](std::size_t chunk) {
      std::vector<KVector> acc(ts.size(), KVector{});
      std::vector<std::uint8_t> seen(ts.size(), 0);
      std::vector<std::uint32_t> touched;
      std::vector<std::vector<Contact>> common(with_divisors ? ts.size() : 0);
      auto& hist = partial[chunk];
      for (std::size_t si = chunk; si < ss.size(); si += chunks) {
        touched.clear();
        for (const auto& c : s_contacts[si])
          for (const auto& [tj, o] : lists[c.point][c.i]) {
            if (!seen[tj]) {
              seen[tj] = 1;
              touched.push_back(tj);
            }
            const std::uint8_t m = std::min(c.order, o);
            acc[tj][c.i] += degree[c.point] * m;
            if (with_divisors) common[tj].push_back(Contact{c.i, c.point, m});
          }
        hist[KVector{}] += ts.size() - touched.size();
        if (with_divisors && touched.size() < ts.size()) divisor_counts[DivisorTuple{}] += ts.size() - touched.size();
        for (std::uint32_t tj : touched) {
          hist[acc[tj]] += 1;
          acc[tj] = KVector{};
          seen[tj] = 0;
          if (with_divisors) {
            divisor_counts[tuple_from(common[tj], index)] += 1;
            common[tj].clear();
          }
        }
      }
    };
    if (chunks == 1) {
      work(0);
    } else {
      std::vector<std::thread> threads;
      for (std::size_t c = 0; c < chunks; ++c) threads.emplace_back(work, c);
      for (auto& th : threads) th.join();
    }
    for (const auto& part : partial)
      for (const auto& [k, n] : part) out.by_k[k] += n * units;
    if (with_divisors)
      for (const auto& [w, n] : divisor_counts) (*out.by_divisor)[w] += n * units;
  }

  for (auto it = out.by_k.begin(); it != out.by_k.end();) it = it->second == 0 ? out.by_k.erase(it) : std::next(it);
  if (strategy == CountStrategy::Bucket) {
    std::lock_guard lock(mutex_);
    cache_[std::make_tuple(a, a_prime, with_divisors)] = std::make_shared<const SectionHistogram>(out);
  }
  return out;
}

std::uint64_t SectionCounter::count_sections(int a, int a_prime, const KVector& k, CountStrategy strategy) const {
  for (int v : k)
    if (v < 0) throw Error(ErrorCode::InvalidConfig, "negative contact order");
  const auto h = histogram(a, a_prime, strategy);
  const auto it = h.by_k.find(k);
  return it == h.by_k.end() ? 0 : it->second;
}

std::uint64_t SectionCounter::count_morphisms(int a, int a_prime, const KVector& k) const {
  const std::uint64_t units = std::uint64_t(cfg_.field.q() - 1) * std::uint64_t(cfg_.field.q() - 1);
  const std::uint64_t n = count_sections(a, a_prime, k);
  if (n % units != 0) throw Error(ErrorCode::InvariantViolation, "section count not divisible by (q-1)^2");
  return n / units;
}

std::uint64_t SectionCounter::fiber_count(const DivisorTuple& w, int a, int a_prime) const {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (!w[i].disjoint_from(w[j])) throw Error(ErrorCode::OverlappingSupports, "T_i supports meet");
  for (const auto& wi : w)
    if (wi.degree() > std::max(a, a_prime))
      throw Error(ErrorCode::DegreeMismatch, "divisor degree exceeds the bidegree");
  const auto h = histogram(a, a_prime, CountStrategy::Bucket, true);
  const auto it = h.by_divisor->find(w);
  return it == h.by_divisor->end() ? 0 : it->second;
}

std::vector<DivisorTuple> SectionCounter::u_k_points(const KVector& k) const {
  std::array<std::vector<EffectiveDivisor>, 4> choices;
  long double total = 1;
  for (int i = 0; i < 4; ++i) {
    if (k[i] < 0) throw Error(ErrorCode::InvalidConfig, "negative contact order");
    choices[i] = line_.hilb_points(k[i]);
    total *= choices[i].size();
  }
  if (total > 1e7L) throw Error(ErrorCode::TooLarge, "U_k has too many candidate tuples");
  std::vector<DivisorTuple> out;
  DivisorTuple cur;
  auto rec = [&](auto&& self, int i) -> void {
    if (i == 4) {
      out.push_back(cur);
      return;
    }
    for (const auto& D : choices[i]) {
      bool ok = true;
      for (int j = 0; j < i && ok; ++j) ok = D.disjoint_from(cur[j]);
      if (!ok) continue;
      cur[i] = D;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace manin

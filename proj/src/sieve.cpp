#include "manin/sieve.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "manin/error.hpp"

namespace manin {

namespace {

constexpr std::int8_t kWhole = -1;
constexpr std::int8_t kZero = 4;

int dim_part(std::int8_t a) { return a == kWhole ? 2 : (a == kZero ? 0 : 1); }
std::int8_t meet_part(std::int8_t a, std::int8_t b) {
  if (a == kWhole) return b;
  if (b == kWhole) return a;
  return a == b ? a : kZero;
}
bool leq_part(std::int8_t a, std::int8_t b) { return b == kWhole || a == kZero || a == b; }

bool vanishes(Functional f, std::int8_t a, std::int8_t b) {
  const int v = int(f);
  if (v <= 1) return a == kZero;                       // s1, s2
  if (v <= 3) return b == kZero;                       // t1, t2
  if (v <= 7) return a == kZero || a == v - 4;         // lambda_i(s)
  return b == kZero || b == v - 8;                     // lambda'_i(t)
}

}  // namespace

QLattice::QLattice(LatticeKind kind) : kind_(kind) {
  auto add = [&](std::int8_t a, std::int8_t b, std::string name) {
    elems_.push_back(Code{a, b});
    names_.push_back(std::move(name));
  };
  add(kWhole, kWhole, "V");
  for (int i = 0; i < 4; ++i) add(std::int8_t(i), std::int8_t(i), "W" + std::to_string(i + 1));
  for (int i = 0; i < 4; ++i) {
    add(std::int8_t(i), kZero, "l" + std::to_string(i + 1) + "1");
    add(kZero, std::int8_t(i), "l" + std::to_string(i + 1) + "2");
  }
  add(kZero, kZero, "0");
  if (kind == LatticeKind::Extended) {
    add(kWhole, kZero, "V1+0");
    add(kZero, kWhole, "0+V2");
  }
  const int n = size();
  leq_.assign(n * n, 0);
  meet_.assign(n * n, -1);
  for (int x = 0; x < n; ++x) {
    const Code cx = elems_[x];
    coranks_.push_back(4 - dim_part(cx.a) - dim_part(cx.b));
    std::vector<Functional> ann;
    for (int f = 0; f < 12; ++f) {
      const auto fn = Functional(f);
      if (!vanishes(fn, cx.a, cx.b)) continue;
      // Keep a spanning set: lambda_i is implied once both coordinates vanish.
      if (f >= 4 && f <= 7 && cx.a == kZero) continue;
      if (f >= 8 && cx.b == kZero) continue;
      ann.push_back(fn);
    }
    ann_.push_back(std::move(ann));
    for (int y = 0; y < n; ++y) {
      const Code cy = elems_[y];
      leq_[x * n + y] = leq_part(cx.a, cy.a) && leq_part(cx.b, cy.b);
      const int m = index_of(Code{meet_part(cx.a, cy.a), meet_part(cx.b, cy.b)});
      if (m < 0) throw Error(ErrorCode::InvariantViolation, "lattice not closed under meets");
      meet_[x * n + y] = m;
    }
  }
}

int QLattice::index_of(Code c) const {
  for (int i = 0; i < int(elems_.size()); ++i)
    if (elems_[i].a == c.a && elems_[i].b == c.b) return i;
  return -1;
}

bool QLattice::vanishes_on(Functional f, int e) const { return vanishes(f, elems_[e].a, elems_[e].b); }

const QLattice& QLattice::of(LatticeKind kind) {
  static const QLattice listed(LatticeKind::Listed), extended(LatticeKind::Extended);
  return kind == LatticeKind::Listed ? listed : extended;
}

int QLattice::zero() const { return index_of(Code{kZero, kZero}); }
int QLattice::W(int i) const { return index_of(Code{std::int8_t(i), std::int8_t(i)}); }
int QLattice::ell(int i, int j) const {
  return j == 1 ? index_of(Code{std::int8_t(i), kZero}) : index_of(Code{kZero, std::int8_t(i)});
}
int QLattice::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (names_[i] == name) return i;
  return -1;
}

// --- chains -----------------------------------------------------------------

int chain_multiplicity(const QLattice& L, const Chain& r, int p) {
  int m = 0;
  for (auto e : r) m += L.leq(e, p);
  return m;
}

int chain_corank(const QLattice& L, const Chain& r) {
  int c = 0;
  for (auto e : r) c += L.corank(e);
  return c;
}

bool chain_valid(const QLattice& L, const Chain& r) {
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (r[j] >= L.size() || r[j] == L.top()) return false;
    if (j > 0 && !L.leq(r[j - 1], r[j])) return false;
  }
  return true;
}

bool chain_dominates(const QLattice& L, const Chain& x, const Chain& y) {
  if (x.size() < y.size()) return false;
  for (std::size_t j = 0; j < y.size(); ++j)
    if (!L.leq(x[j], y[j])) return false;
  return true;
}

Chain chain_from_multiplicities(const QLattice& L, const std::vector<int>& m) {
  const int n = L.size();
  if (int(m.size()) != n) throw Error(ErrorCode::InvalidConfig, "multiplicity vector has the wrong length");
  auto value = [&](int p) { return p == L.top() ? 1 << 30 : m[p]; };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (L.leq(p, q) && value(p) > value(q)) throw Error(ErrorCode::NotSaturated, "multiplicities not monotone");
      if (value(L.meet(p, q)) != std::min(value(p), value(q)))
        throw Error(ErrorCode::NotSaturated, "m(" + L.name(p) + " ^ " + L.name(q) + ") != min");
    }
  int J = 0;
  for (int p = 0; p < n; ++p)
    if (p != L.top()) J = std::max(J, m[p]);
  Chain r;
  for (int j = 1; j <= J; ++j) {
    int e = L.top();
    for (int p = 0; p < n; ++p)
      if (value(p) >= j) e = L.meet(e, p);
    r.push_back(std::uint8_t(e));
  }
  for (int p = 0; p < n; ++p)
    if (p != L.top() && chain_multiplicity(L, r, p) != m[p])
      throw Error(ErrorCode::NotSaturated, "multiplicities do not come from a chain");
  return r;
}

std::string chain_to_string(const QLattice& L, const Chain& r) {
  std::string s;
  for (std::size_t j = 0; j < r.size(); ++j) s += (j ? "<=" : "") + L.name(r[j]);
  return s.empty() ? "-" : s;
}

// --- configurations ------------------------------------------------------------

void Configuration::set(const ClosedPoint& c, Chain r) {
  if (r.empty())
    local_.erase(c);
  else
    local_[c] = std::move(r);
}

const Chain& Configuration::at(const ClosedPoint& c) const {
  static const Chain empty;
  const auto it = local_.find(c);
  return it == local_.end() ? empty : it->second;
}

int Configuration::degree() const {
  int d = 0;
  for (const auto& [c, r] : local_) d += c.degree() * int(r.size());
  return d;
}

std::string Configuration::to_string(const QLattice& L, const Field& F) const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [c, r] : local_) {
    os << (first ? "" : ", ") << c.to_string(F) << ": " << chain_to_string(L, r);
    first = false;
  }
  os << "}";
  return os.str();
}

Configuration induced_configuration(const QLattice& L, const DivisorTuple& w) {
  Configuration x;
  for (int i = 0; i < 4; ++i)
    for (const auto& [c, e] : w[i].entries()) {
      if (!x.at(c).empty()) throw Error(ErrorCode::OverlappingSupports, "w_i supports meet");
      x.set(c, Chain(std::size_t(e), std::uint8_t(L.W(i))));
    }
  return x;
}

int gamma(const QLattice& L, const Configuration& x) {
  int g = 0;
  for (const auto& [c, r] : x.local()) g += c.degree() * chain_corank(L, r);
  return g;
}

bool dominates(const QLattice& L, const Configuration& x, const Configuration& y) {
  for (const auto& [c, r] : y.local())
    if (!chain_dominates(L, x.at(c), r)) return false;
  return true;
}

// --- exact rank -------------------------------------------------------------------

namespace {

int rank_over(const Field& F, std::vector<std::vector<FieldElem>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows[0].size();
  int rank = 0;
  for (std::size_t col = 0; col < cols && rank < int(rows.size()); ++col) {
    int piv = -1;
    for (int r = rank; r < int(rows.size()); ++r)
      if (!rows[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    const FieldElem inv = F.inv(rows[rank][col]);
    for (int r = 0; r < int(rows.size()); ++r) {
      if (r == rank || rows[r][col].is_zero()) continue;
      const FieldElem f = F.mul(rows[r][col], inv);
      for (std::size_t k = col; k < cols; ++k) rows[r][k] = F.sub(rows[r][k], F.mul(f, rows[rank][k]));
    }
    ++rank;
  }
  return rank;
}

}  // namespace

int gamma_rank_oracle(const QLattice& L, const Configuration& x, int a, int a_prime, const SurfaceConfig& cfg) {
  const Field& F = cfg.field;
  const int ncols = 2 * (a + 1) + 2 * (a_prime + 1);
  std::vector<std::vector<FieldElem>> rows;
  for (const auto& [c, r] : x.local()) {
    for (int f = 0; f < 12; ++f) {
      const auto fn = Functional(f);
      int n = 0;
      for (auto e : r) n += L.vanishes_on(fn, e);
      if (n == 0) continue;
      // fn = c1 * first + c2 * second on one side.
      const bool t_side = f == 2 || f == 3 || f >= 8;
      const int deg = t_side ? a_prime : a;
      const int offset = t_side ? 2 * (a + 1) : 0;
      LinearForm lf{F.zero(), F.zero()};
      if (f == 0 || f == 2) lf = LinearForm{F.one(), F.zero()};
      if (f == 1 || f == 3) lf = LinearForm{F.zero(), F.one()};
      if (f >= 4 && f <= 7) lf = cfg.lambda(f - 4);
      if (f >= 8) lf = cfg.lambda_prime(f - 8);
      auto put = [&](std::vector<FieldElem>& row, int j, FieldElem v) {
        row[offset + j] = F.add(row[offset + j], F.mul(lf.c1, v));
        row[offset + deg + 1 + j] = F.add(row[offset + deg + 1 + j], F.mul(lf.c2, v));
      };
      if (c.at_infinity()) {
        for (int j = deg; j > deg - n && j >= 0; --j) {
          std::vector<FieldElem> row(ncols, F.zero());
          put(row, j, F.one());
          rows.push_back(std::move(row));
        }
        continue;
      }
      Poly M{F.one()};
      for (int j = 0; j < n; ++j) M = poly::mul(F, M, c.poly());
      const int md = poly::degree(M);
      std::vector<Poly> residues;
      Poly xj{F.one()};
      for (int j = 0; j <= deg; ++j) {
        residues.push_back(poly::rem(F, xj, M));
        xj = poly::mul(F, xj, Poly{F.zero(), F.one()});
      }
      for (int coord = 0; coord < md; ++coord) {
        std::vector<FieldElem> row(ncols, F.zero());
        for (int j = 0; j <= deg; ++j)
          if (coord < int(residues[j].size())) put(row, j, residues[j][coord]);
        rows.push_back(std::move(row));
      }
    }
  }
  return rank_over(F, std::move(rows));
}

mpz_class e_w_count(const QLattice& L, const DivisorTuple& w, int a, int a_prime, const SurfaceConfig& cfg) {
  const int rank = gamma_rank_oracle(L, induced_configuration(L, w), a, a_prime, cfg);
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), cfg.field.q(), 2 * a + 2 * a_prime + 4 - rank);
  return r;
}

// --- enumeration -----------------------------------------------------------------------

namespace {

// Chains z with lower <= z (pointwise domination of z over `lower`, i.e.
// z_j <= lower_j) and optionally z <= upper, corank(z) <= max_corank.
void chains_between(const QLattice& L, const Chain* lower, const Chain* upper, int max_corank,
                    std::vector<Chain>& out) {
  Chain cur;
  const std::size_t min_len = lower ? lower->size() : 0;
  const std::size_t max_len = upper ? upper->size() : std::size_t(max_corank / 2);
  std::function<void(int)> rec = [&](int budget) {
    const std::size_t j = cur.size();
    if (j >= min_len) out.push_back(cur);
    if (j == max_len) return;
    for (int e = 0; e < L.size(); ++e) {
      if (e == L.top() || L.corank(e) > budget) continue;
      if (j > 0 && !L.leq(cur[j - 1], e)) continue;
      if (lower && j < lower->size() && !L.leq(e, (*lower)[j])) continue;
      if (upper && !L.leq((*upper)[j], e)) continue;
      cur.push_back(std::uint8_t(e));
      rec(budget - L.corank(e));
      cur.pop_back();
    }
  };
  rec(max_corank);
}

}  // namespace

std::vector<Chain> local_chains(const QLattice& L, int max_corank, bool include_empty) {
  std::vector<Chain> out;
  chains_between(L, nullptr, nullptr, max_corank, out);
  if (!include_empty) out.erase(std::remove_if(out.begin(), out.end(), [](const Chain& c) { return c.empty(); }), out.end());
  std::sort(out.begin(), out.end(), [&](const Chain& x, const Chain& y) {
    const int cx = chain_corank(L, x), cy = chain_corank(L, y);
    return cx != cy ? cx < cy : x < y;
  });
  return out;
}

std::vector<Configuration> enumerate_configs_above(const QLattice& L, const ProjectiveLine& P, const DivisorTuple& w,
                                                   int D, std::size_t limit) {
  if (D < 0) throw Error(ErrorCode::InvalidConfig, "negative truncation");
  const Configuration base = induced_configuration(L, w);
  struct Slot {
    ClosedPoint c;
    std::vector<std::pair<Chain, int>> options;  // chain and its excess cost
  };
  std::vector<Slot> slots;
  for (const auto& [c, r] : base.local()) {
    Slot s{c, {}};
    std::vector<Chain> zs;
    const int base_corank = chain_corank(L, r);
    chains_between(L, &r, nullptr, base_corank + D / c.degree(), zs);
    for (auto& z : zs) {
      const int cost = c.degree() * (chain_corank(L, z) - base_corank);
      if (cost <= D) s.options.emplace_back(std::move(z), cost);
    }
    slots.push_back(std::move(s));
  }
  // Fresh points need corank >= 2, so only degrees up to D / 2 matter.
  for (int d = 1; 2 * d <= D; ++d) {
    if (!P.enumerable(d)) throw Error(ErrorCode::TooLarge, "closed points of degree " + std::to_string(d));
    const auto chains = local_chains(L, D / d, true);
    for (const auto& c : P.closed_points_of_degree(d)) {
      if (!base.at(c).empty()) continue;
      Slot s{c, {}};
      for (const auto& z : chains) s.options.emplace_back(z, d * chain_corank(L, z));
      slots.push_back(std::move(s));
    }
  }
  for (auto& s : slots)
    std::stable_sort(s.options.begin(), s.options.end(), [](const auto& x, const auto& y) { return x.second < y.second; });

  std::vector<Configuration> out;
  Configuration cur;
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int budget) {
    if (i == slots.size()) {
      if (out.size() >= limit) throw Error(ErrorCode::TooLarge, "more than " + std::to_string(limit) + " configurations");
      out.push_back(cur);
      return;
    }
    for (const auto& [z, cost] : slots[i].options) {
      if (cost > budget) break;
      cur.set(slots[i].c, z);
      rec(i + 1, budget - cost);
    }
    cur.set(slots[i].c, {});
  };
  rec(0, D);
  std::stable_sort(out.begin(), out.end(), [&](const Configuration& x, const Configuration& y) {
    const int gx = gamma(L, x), gy = gamma(L, y);
    return gx != gy ? gx < gy : x < y;
  });
  return out;
}

std::vector<Configuration> configurations_up_to_degree(const QLattice& L, const ProjectiveLine& P, int max_degree,
                                                       std::size_t limit) {
  // Chains by length.
  std::vector<std::vector<Chain>> by_len(max_degree + 1);
  for (auto& z : local_chains(L, 4 * max_degree))
    if (int(z.size()) <= max_degree) by_len[z.size()].push_back(std::move(z));
  std::vector<ClosedPoint> pts;
  for (int d = 1; d <= max_degree; ++d) {
    if (!P.enumerable(d)) throw Error(ErrorCode::TooLarge, "closed points of degree " + std::to_string(d));
    for (const auto& c : P.closed_points_of_degree(d)) pts.push_back(c);
  }
  std::vector<Configuration> out;
  Configuration cur;
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int budget) {
    if (i == pts.size()) {
      if (cur.empty()) return;
      if (out.size() >= limit) throw Error(ErrorCode::TooLarge, "more than " + std::to_string(limit) + " configurations");
      out.push_back(cur);
      return;
    }
    rec(i + 1, budget);
    const int d = pts[i].degree();
    for (int len = 1; len * d <= budget; ++len)
      for (const auto& z : by_len[len]) {
        cur.set(pts[i], z);
        rec(i + 1, budget - len * d);
      }
    cur.set(pts[i], {});
  };
  rec(0, max_degree);
  return out;
}

// --- Moebius ---------------------------------------------------------------------------

long long local_mobius(const QLattice& L, const Chain& y, const Chain& x) {
  if (!chain_dominates(L, x, y)) throw Error(ErrorCode::NotComparable, "local chains are not comparable");
  static std::mutex mutex;
  static std::map<std::tuple<LatticeKind, Chain, Chain>, long long> memo;
  const auto key = std::make_tuple(L.kind(), y, x);
  {
    std::lock_guard lock(mutex);
    const auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  std::vector<Chain> interval;
  chains_between(L, &y, &x, chain_corank(L, x), interval);
  std::sort(interval.begin(), interval.end(), [&](const Chain& a, const Chain& b) {
    return chain_corank(L, a) < chain_corank(L, b);
  });
  std::vector<long long> mu(interval.size(), 0);
  long long result = 0;
  for (std::size_t i = 0; i < interval.size(); ++i) {
    if (interval[i] == y) {
      mu[i] = 1;
    } else {
      long long s = 0;
      for (std::size_t j = 0; j < i; ++j)
        if (interval[j] != interval[i] && chain_dominates(L, interval[i], interval[j])) s += mu[j];
      mu[i] = -s;
    }
    if (interval[i] == x) result = mu[i];
  }
  std::lock_guard lock(mutex);
  memo[key] = result;
  return result;
}

long long mobius(const QLattice& L, const Configuration& w, const Configuration& x) {
  if (!dominates(L, x, w)) throw Error(ErrorCode::NotComparable, "x does not dominate w");
  std::vector<ClosedPoint> pts;
  for (const auto& [c, r] : x.local()) pts.push_back(c);
  std::vector<std::vector<Chain>> locals;
  for (const auto& c : pts) {
    std::vector<Chain> iv;
    const Chain& lo = w.at(c);
    const Chain& hi = x.at(c);
    chains_between(L, &lo, &hi, chain_corank(L, hi), iv);
    locals.push_back(std::move(iv));
  }
  // Whole interval as tuples of local indices.
  std::vector<std::vector<std::size_t>> elems{{}};
  for (const auto& iv : locals) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& e : elems)
      for (std::size_t j = 0; j < iv.size(); ++j) {
        auto f = e;
        f.push_back(j);
        next.push_back(std::move(f));
      }
    elems = std::move(next);
  }
  auto corank_of = [&](const std::vector<std::size_t>& e) {
    int g = 0;
    for (std::size_t p = 0; p < e.size(); ++p) g += pts[p].degree() * chain_corank(L, locals[p][e[p]]);
    return g;
  };
  std::sort(elems.begin(), elems.end(), [&](const auto& a, const auto& b) { return corank_of(a) < corank_of(b); });
  auto leq = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    for (std::size_t p = 0; p < a.size(); ++p)
      if (!chain_dominates(L, locals[p][b[p]], locals[p][a[p]])) return false;
    return true;
  };
  std::vector<long long> mu(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (i == 0) {
      mu[i] = 1;  // w itself has the smallest codimension
      continue;
    }
    long long s = 0;
    for (std::size_t j = 0; j < i; ++j)
      if (elems[j] != elems[i] && leq(elems[j], elems[i])) s += mu[j];
    mu[i] = -s;
  }
  return mu.back();
}

long long mobius_product(const QLattice& L, const Configuration& w, const Configuration& x) {
  if (!dominates(L, x, w)) throw Error(ErrorCode::NotComparable, "x does not dominate w");
  long long m = 1;
  for (const auto& [c, r] : x.local()) {
    m *= local_mobius(L, w.at(c), r);
    if (m == 0) return 0;
  }
  return m;
}

// --- sums ------------------------------------------------------------------------------

SieveSum sieve_sum(const QLattice& L, const SectionCounter& counter, const KVector& k, int D) {
  const long q = counter.config().field.q();
  SieveSum out;
  for (const auto& w : counter.u_k_points(k)) {
    const Configuration xw = induced_configuration(L, w);
    for (const auto& x : enumerate_configs_above(L, counter.line(), w, D)) {
      const long long mu = mobius_product(L, xw, x);
      ++out.terms;
      if (mu == 0) continue;
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), q, gamma(L, x));
      out.value += mpq_class(mpz_class(long(mu)), den);
    }
  }
  out.value.canonicalize();
  return out;
}

long long stable_range_I(long long a, long long a_prime, const KVector& k) {
  const long long sk = k[0] + k[1] + k[2] + k[3];
  const long long m = std::min(2 * a + 1 - sk, 2 * a_prime + 1 - sk);
  // floor(m/8 - 1/2) = floor((m - 4) / 8)
  const long long num = m - 4;
  return num >= 0 ? num / 8 : -((-num + 7) / 8);
}

SievePrediction sieve_prediction(const QLattice& L, const SectionCounter& counter, long long a, long long a_prime,
                                 const KVector& k, int D) {
  SievePrediction p;
  p.a = a;
  p.a_prime = a_prime;
  p.k = k;
  p.D = D;
  p.I = stable_range_I(a, a_prime, k);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), counter.config().field.q(), 2 * a + 2 * a_prime + 4);
  p.value = mpq_class(scale) * sieve_sum(L, counter, k, D).value;
  return p;
}

std::vector<long long> local_sum_free(const QLattice& L, int N) {
  std::vector<long long> out(N + 1, 0);
  for (const auto& z : local_chains(L, N, true)) out[chain_corank(L, z)] += local_mobius(L, Chain{}, z);
  return out;
}

std::vector<long long> local_sum_above(const QLattice& L, const Chain& base, int N) {
  std::vector<long long> out(N + 1, 0);
  std::vector<Chain> zs;
  chains_between(L, &base, nullptr, N, zs);
  for (const auto& z : zs) out[chain_corank(L, z)] += local_mobius(L, base, z);
  return out;
}

}  // namespace manin

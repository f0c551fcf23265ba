#include "manin/projline.hpp"

#include <algorithm>
#include <sstream>

#include "manin/error.hpp"

namespace manin {

BinaryForm BinaryForm::make(int degree, std::vector<FieldElem> coeffs) {
  if (degree < 0 || int(coeffs.size()) != degree + 1)
    throw Error(ErrorCode::DegreeMismatch, "binary form needs degree+1 coefficients");
  return BinaryForm{degree, std::move(coeffs)};
}

BinaryForm BinaryForm::zero(int degree) { return BinaryForm{degree, std::vector<FieldElem>(degree + 1)}; }

bool BinaryForm::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](FieldElem c) { return c.is_zero(); });
}

Poly BinaryForm::dehomogenized() const {
  Poly f(coeffs.begin(), coeffs.end());
  poly::trim(f);
  return f;
}

int BinaryForm::infinity_multiplicity() const { return degree - poly::degree(dehomogenized()); }

BinaryForm form_mul(const Field& F, const BinaryForm& f, const BinaryForm& g) {
  BinaryForm out = BinaryForm::zero(f.degree + g.degree);
  for (int i = 0; i <= f.degree; ++i)
    for (int j = 0; j <= g.degree; ++j)
      out.coeffs[i + j] = F.add(out.coeffs[i + j], F.mul(f.coeffs[i], g.coeffs[j]));
  return out;
}

ClosedPoint ClosedPoint::finite(const Field& F, Poly monic_irreducible) {
  poly::trim(monic_irreducible);
  if (poly::degree(monic_irreducible) < 1 || monic_irreducible.back() != F.one())
    throw Error(ErrorCode::DegreeMismatch, "closed point needs a monic polynomial of positive degree");
  const long long key = poly::degree(monic_irreducible) == 1 ? F.neg(monic_irreducible[0]).index()
                                                             : poly::monic_index(F, monic_irreducible);
  return ClosedPoint(false, std::move(monic_irreducible), key);
}

ClosedPoint ClosedPoint::rational(const Field& F, FieldElem root) {
  return finite(F, Poly{F.neg(root), F.one()});
}

std::strong_ordering ClosedPoint::operator<=>(const ClosedPoint& other) const {
  if (auto c = degree() <=> other.degree(); c != 0) return c;
  if (auto c = at_infinity_ <=> other.at_infinity_; c != 0) return c;
  return key_ <=> other.key_;
}

std::string ClosedPoint::to_string(const Field& F) const {
  if (at_infinity_) return "inf";
  std::ostringstream out;
  if (degree() == 1) {
    out << int(F.neg(poly_[0]).index());
    return out.str();
  }
  out << "[";
  for (std::size_t j = 0; j < poly_.size(); ++j) out << (j ? "," : "") << int(poly_[j].index());
  out << "]";
  return out.str();
}

EffectiveDivisor EffectiveDivisor::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  EffectiveDivisor d;
  for (auto& [c, m] : entries) {
    if (m < 0) throw Error(ErrorCode::DegreeMismatch, "negative multiplicity");
    if (m == 0) continue;
    if (!d.entries_.empty() && d.entries_.back().first == c)
      d.entries_.back().second += m;
    else
      d.entries_.emplace_back(c, m);
  }
  return d;
}

EffectiveDivisor EffectiveDivisor::single(const ClosedPoint& c, int mult) {
  return from_entries({{c, mult}});
}

int EffectiveDivisor::degree() const {
  int d = 0;
  for (const auto& [c, m] : entries_) d += c.degree() * m;
  return d;
}

int EffectiveDivisor::multiplicity(const ClosedPoint& c) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), c,
                             [](const Entry& e, const ClosedPoint& p) { return e.first < p; });
  return (it != entries_.end() && it->first == c) ? it->second : 0;
}

bool EffectiveDivisor::disjoint_from(const EffectiveDivisor& other) const {
  for (const auto& [c, m] : entries_)
    if (other.multiplicity(c) > 0) return false;
  return true;
}

bool EffectiveDivisor::contains(const EffectiveDivisor& other) const {
  for (const auto& [c, m] : other.entries_)
    if (multiplicity(c) < m) return false;
  return true;
}

std::string EffectiveDivisor::to_string(const Field& F) const {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [c, m] : entries_) {
    out << (first ? "" : ", ") << c.to_string(F) << ":" << m;
    first = false;
  }
  out << "}";
  return out.str();
}

EffectiveDivisor operator+(const EffectiveDivisor& a, const EffectiveDivisor& b) {
  auto entries = a.entries_;
  entries.insert(entries.end(), b.entries_.begin(), b.entries_.end());
  return EffectiveDivisor::from_entries(std::move(entries));
}

EffectiveDivisor divisor_min(const EffectiveDivisor& a, const EffectiveDivisor& b) {
  std::vector<EffectiveDivisor::Entry> entries;
  for (const auto& [c, m] : a.entries_) {
    const int other = b.multiplicity(c);
    if (other > 0) entries.emplace_back(c, std::min(m, other));
  }
  return EffectiveDivisor::from_entries(std::move(entries));
}

int mobius_integer(long long n) {
  int result = 1;
  for (long long d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    n /= d;
    if (n % d == 0) return 0;
    result = -result;
  }
  if (n > 1) result = -result;
  return result;
}

mpz_class necklace_count(long long q, int n) {
  if (n == 1) return mpz_class(long(q)) + 1;
  mpz_class total = 0;
  for (int d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    const int mu = mobius_integer(d);
    if (mu == 0) continue;
    mpz_class term;
    mpz_ui_pow_ui(term.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(n / d));
    total += mu * term;
  }
  return total / n;
}

ProjectiveLine::ProjectiveLine(Field F) : F_(std::move(F)) {}

bool ProjectiveLine::enumerable(int n) const {
  long long size = 1;
  for (int j = 0; j < n; ++j) {
    size *= F_.q();
    if (size > kEnumerationCap) return false;
  }
  return true;
}

const std::vector<ClosedPoint>& ProjectiveLine::closed_points_of_degree(int n) const {
  if (n < 1) throw Error(ErrorCode::TooLarge, "closed point degree must be >= 1");
  {
    std::lock_guard lock(mutex_);
    if (auto it = by_degree_.find(n); it != by_degree_.end()) return *it->second;
  }
  if (!enumerable(n))
    throw Error(ErrorCode::TooLarge, "q^" + std::to_string(n) + " exceeds the enumeration cap");

  auto points = std::make_unique<std::vector<ClosedPoint>>();
  const int q = F_.q();
  if (n == 1) {
    for (FieldElem a : F_.elements()) points->push_back(ClosedPoint::rational(F_, a));
    points->push_back(ClosedPoint::infinity());
  } else {
    // Sieve: mark every monic product P * G with P irreducible of degree
    // i <= n/2; what remains unmarked is irreducible.
    long long total = 1;
    for (int j = 0; j < n; ++j) total *= q;
    std::vector<bool> reducible(total, false);
    for (int i = 1; i <= n / 2; ++i) {
      long long cofactors = 1;
      for (int j = 0; j < n - i; ++j) cofactors *= q;
      for (const ClosedPoint& c : closed_points_of_degree(i)) {
        if (c.at_infinity()) continue;
        for (long long g = 0; g < cofactors; ++g) {
          const Poly prod = poly::mul(F_, c.poly(), poly::monic_from_index(F_, n - i, g));
          reducible[poly::monic_index(F_, prod)] = true;
        }
      }
    }
    for (long long idx = 0; idx < total; ++idx)
      if (!reducible[idx]) points->push_back(ClosedPoint::finite(F_, poly::monic_from_index(F_, n, idx)));
  }
  std::sort(points->begin(), points->end());

  std::lock_guard lock(mutex_);
  auto [it, inserted] = by_degree_.emplace(n, std::move(points));
  return *it->second;
}

std::vector<ClosedPoint> ProjectiveLine::closed_points_up_to(int N) const {
  std::vector<ClosedPoint> out;
  for (int n = 1; n <= N; ++n) {
    const auto& pts = closed_points_of_degree(n);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

mpz_class ProjectiveLine::count_closed_points(int n) const {
  if (n < 1) throw Error(ErrorCode::TooLarge, "closed point degree must be >= 1");
  return necklace_count(F_.q(), n);
}

EffectiveDivisor ProjectiveLine::divisor_of_poly(const Poly& f_in, int infinity_mult) const {
  Poly f = f_in;
  poly::trim(f);
  if (f.empty()) throw Error(ErrorCode::ZeroForm, "divisor of the zero polynomial");
  std::vector<EffectiveDivisor::Entry> entries;
  if (infinity_mult > 0) entries.emplace_back(ClosedPoint::infinity(), infinity_mult);
  f = poly::monic(F_, f);
  // Trial division by closed points of increasing degree. Once deg f < 2n
  // every factor of degree < n is gone, so a nonconstant rest is irreducible.
  for (int n = 1; poly::degree(f) >= 1; ++n) {
    if (poly::degree(f) < 2 * n) {
      entries.emplace_back(ClosedPoint::finite(F_, f), 1);
      break;
    }
    for (const ClosedPoint& c : closed_points_of_degree(n)) {
      if (c.at_infinity()) continue;
      int mult = 0;
      while (poly::degree(f) >= n) {
        Poly quo, rem;
        poly::divmod(F_, f, c.poly(), quo, rem);
        if (!rem.empty()) break;
        f = std::move(quo);
        ++mult;
      }
      if (mult > 0) entries.emplace_back(c, mult);
    }
  }
  return EffectiveDivisor::from_entries(std::move(entries));
}

EffectiveDivisor ProjectiveLine::divisor_of_form(const BinaryForm& f) const {
  if (f.is_zero()) throw Error(ErrorCode::ZeroForm, "divisor of the zero form");
  return divisor_of_poly(f.dehomogenized(), f.infinity_multiplicity());
}

EffectiveDivisor ProjectiveLine::form_gcd(const BinaryForm& f, const BinaryForm& g) const {
  const bool fz = f.is_zero(), gz = g.is_zero();
  if (fz && gz) throw Error(ErrorCode::BothZero, "gcd of two zero forms");
  if (fz) return divisor_of_form(g);
  if (gz) return divisor_of_form(f);
  const Poly common = poly::gcd(F_, f.dehomogenized(), g.dehomogenized());
  const int inf = std::min(f.infinity_multiplicity(), g.infinity_multiplicity());
  return divisor_of_poly(common, inf);
}

std::vector<EffectiveDivisor> ProjectiveLine::hilb_points(int n) const {
  if (n < 0) throw Error(ErrorCode::TooLarge, "negative degree");
  // #P^n(F_q) divisors; refuse anything beyond a million.
  long double expected = 1;
  for (int j = 0; j < n; ++j) expected = expected * F_.q() + 1;
  if (expected > 1e6L) throw Error(ErrorCode::TooLarge, "too many effective divisors of degree " + std::to_string(n));

  const std::vector<ClosedPoint> points = closed_points_up_to(std::max(n, 1));
  std::vector<EffectiveDivisor> out;
  std::vector<EffectiveDivisor::Entry> current;
  auto recurse = [&](auto&& self, std::size_t start, int remaining) -> void {
    if (remaining == 0) {
      out.push_back(EffectiveDivisor::from_entries(current));
      return;
    }
    for (std::size_t i = start; i < points.size(); ++i) {
      const int d = points[i].degree();
      if (d > remaining) break;  // points are sorted by degree
      for (int m = 1; m * d <= remaining; ++m) {
        current.emplace_back(points[i], m);
        self(self, i + 1, remaining - m * d);
        current.pop_back();
      }
    }
  };
  recurse(recurse, 0, n);
  std::sort(out.begin(), out.end());
  return out;
}

ZetaIdentityReport ProjectiveLine::zeta_p1_identity_check(int N) const {
  if (N < 1) throw Error(ErrorCode::TooLarge, "N must be >= 1");
  ZetaIdentityReport report;
  report.checked_through = N;
  std::vector<mpz_class> series(N + 1, 0);
  series[0] = 1;
  for (int d = 1; d <= N; ++d) {
    mpz_class count;
    if (enumerable(d)) {
      count = mpz_class(static_cast<unsigned long>(closed_points_of_degree(d).size()));
      report.enumerated_through = d;
    } else {
      count = necklace_count(F_.q(), d);
    }
    // Multiply by (1 - t^d)^{-count} = sum_k C(count + k - 1, k) t^{dk}.
    std::vector<mpz_class> factor(N / d + 1);
    factor[0] = 1;
    for (int k = 1; k <= N / d; ++k) factor[k] = factor[k - 1] * (count + k - 1) / k;
    std::vector<mpz_class> next(N + 1, 0);
    for (int i = 0; i <= N; ++i) {
      if (series[i] == 0) continue;
      for (int k = 0; i + d * k <= N; ++k) next[i + d * k] += series[i] * factor[k];
    }
    series = std::move(next);
  }
  report.lhs = series;
  report.rhs.resize(N + 1);
  mpz_class qn = 1, sum = 0;
  for (int n = 0; n <= N; ++n) {
    sum += qn;  // 1 + q + ... + q^n = #P^n(F_q)
    qn *= F_.q();
    report.rhs[n] = sum;
    if (report.ok && report.lhs[n] != report.rhs[n]) {
      report.ok = false;
      report.first_mismatch = n;
    }
  }
  return report;
}

}  // namespace manin

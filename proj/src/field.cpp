#include "manin/field.hpp"

#include <sstream>

#include "manin/error.hpp"

namespace manin {

namespace {

using PrimePoly = std::vector<int>;

void trim(PrimePoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

int inverse_mod(int a, int p) {
  int result = 1;
  for (int e = p - 2, base = a % p; e > 0; e >>= 1, base = base * base % p)
    if (e & 1) result = result * base % p;
  return result;
}

// Remainder of f modulo a nonzero g over F_p.
PrimePoly poly_rem(PrimePoly f, const PrimePoly& g, int p) {
  trim(f);
  const int dg = int(g.size()) - 1;
  const int lead_inv = inverse_mod(g.back(), p);
  while (int(f.size()) - 1 >= dg) {
    const int shift = int(f.size()) - 1 - dg;
    const int factor = f.back() * lead_inv % p;
    for (int j = 0; j <= dg; ++j) f[shift + j] = ((f[shift + j] - factor * g[j]) % p + p) % p;
    trim(f);
  }
  return f;
}

PrimePoly poly_mulmod(const PrimePoly& a, const PrimePoly& b, const PrimePoly& m, int p) {
  if (a.empty() || b.empty()) return {};
  PrimePoly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = (out[i + j] + a[i] * b[j]) % p;
  return poly_rem(std::move(out), m, p);
}

PrimePoly digits(int index, int p, int n) {
  PrimePoly c(n);
  for (int j = 0; j < n; ++j, index /= p) c[j] = index % p;
  return c;
}

int undigits(const PrimePoly& c, int p, int n) {
  int index = 0;
  for (int j = n - 1; j >= 0; --j) index = index * p + (j < int(c.size()) ? c[j] : 0);
  return index;
}

}  // namespace

bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool is_irreducible_mod_p(std::span<const int> monic, int p) {
  const int deg = int(monic.size()) - 1;
  if (deg < 1) return false;
  PrimePoly f(monic.begin(), monic.end());
  for (int d = 1; d <= deg / 2; ++d) {
    int count = 1;
    for (int j = 0; j < d; ++j) count *= p;
    for (int index = 0; index < count; ++index) {
      PrimePoly g = digits(index, p, d);
      g.push_back(1);
      if (poly_rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

Field Field::make(int p, int n, std::optional<std::vector<int>> modulus) {
  if (!is_prime(p)) throw Error(ErrorCode::NonPrime, "p = " + std::to_string(p) + " is not prime");
  if (p > kMaxPrime || n < 1)
    throw Error(ErrorCode::UnsupportedSize, "need p <= 13 and n >= 1");
  long long q = 1;
  for (int j = 0; j < n; ++j) q *= p;
  if (q > kMaxFieldSize) throw Error(ErrorCode::UnsupportedSize, "q exceeds 13^3");

  auto t = std::make_shared<Tables>();
  t->p = p;
  t->n = n;
  t->q = int(q);

  if (n == 1) {
    t->modulus = {0, 1};
  } else if (modulus) {
    PrimePoly m = *modulus;
    if (int(m.size()) == n) m.push_back(1);  // leading 1 may be omitted
    for (int& c : m) c = ((c % p) + p) % p;
    if (int(m.size()) != n + 1 || m.back() != 1)
      throw Error(ErrorCode::ReducibleModulus, "modulus must be monic of degree n");
    if (!is_irreducible_mod_p(m, p))
      throw Error(ErrorCode::ReducibleModulus, "modulus is reducible over F_p");
    t->modulus = std::move(m);
  } else {
    // Lexicographically least: smallest index of the non-leading part.
    for (int index = 0; index < q; ++index) {
      PrimePoly m = digits(index, p, n);
      m.push_back(1);
      if (is_irreducible_mod_p(m, p)) {
        t->modulus = std::move(m);
        break;
      }
    }
  }

  const int qq = t->q;
  const PrimePoly& mod = t->modulus;
  std::vector<PrimePoly> rep(qq);
  for (int i = 0; i < qq; ++i) rep[i] = digits(i, p, n);

  t->add.resize(std::size_t(qq) * qq);
  t->neg.resize(qq);
  for (int a = 0; a < qq; ++a) {
    PrimePoly neg(n);
    for (int j = 0; j < n; ++j) neg[j] = (p - rep[a][j]) % p;
    t->neg[a] = std::uint16_t(undigits(neg, p, n));
    for (int b = 0; b < qq; ++b) {
      PrimePoly s(n);
      for (int j = 0; j < n; ++j) s[j] = (rep[a][j] + rep[b][j]) % p;
      t->add[std::size_t(a) * qq + b] = std::uint16_t(undigits(s, p, n));
    }
  }

  // Multiplicative structure through a generator; the first element of
  // order q-1 in index order is used.
  auto mulmod = [&](int a, int b) {
    PrimePoly x = rep[a], y = rep[b];
    trim(x);
    trim(y);
    return undigits(poly_mulmod(x, y, mod, p), p, n);
  };
  t->log.assign(qq, 0);
  t->exp.assign(std::size_t(2) * (qq - 1), 0);
  for (int g = 1; g < qq; ++g) {
    std::vector<std::uint16_t> powers;
    int x = 1;
    bool ok = true;
    for (int e = 0; e < qq - 1; ++e) {
      if (e > 0 && x == 1) {
        ok = false;
        break;
      }
      powers.push_back(std::uint16_t(x));
      x = mulmod(x, g);
    }
    if (!ok) continue;
    t->generator = std::uint16_t(g);
    for (int e = 0; e < qq - 1; ++e) {
      t->exp[e] = t->exp[e + qq - 1] = powers[e];
      t->log[powers[e]] = std::uint16_t(e);
    }
    break;
  }

  t->frob.resize(qq);
  for (int a = 0; a < qq; ++a) {
    if (a == 0) {
      t->frob[a] = 0;
      continue;
    }
    const long long e = (static_cast<long long>(t->log[a]) * p) % (qq - 1);
    t->frob[a] = t->exp[e];
  }
  return Field(std::move(t));
}

std::string Field::describe() const {
  std::ostringstream out;
  out << "F_" << q();
  if (n() > 1) {
    out << " = F_" << p() << "[x]/(";
    bool first = true;
    for (int j = n(); j >= 0; --j) {
      const int c = modulus()[j];
      if (c == 0) continue;
      if (!first) out << " + ";
      first = false;
      if (j == 0 || c != 1) out << c;
      if (j >= 1) out << "x";
      if (j >= 2) out << "^" << j;
    }
    out << ")";
  }
  return out.str();
}

FieldElem Field::element(int index) const {
  if (index < 0 || index >= q())
    throw Error(ErrorCode::InvalidConfig, "field element index out of range: " + std::to_string(index));
  return FieldElem(std::uint16_t(index));
}

FieldElem Field::from_int(long long value) const {
  const long long r = ((value % p()) + p()) % p();
  return FieldElem(std::uint16_t(r));
}

FieldElem Field::from_coeffs(std::span<const int> coeffs) const {
  PrimePoly c(n(), 0);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (int(j) >= n()) {
      if (coeffs[j] % p() != 0) throw Error(ErrorCode::InvalidConfig, "coefficient vector too long");
      continue;
    }
    c[j] = ((coeffs[j] % p()) + p()) % p();
  }
  return FieldElem(std::uint16_t(undigits(c, p(), n())));
}

std::vector<int> Field::coeffs(FieldElem a) const { return digits(a.index(), p(), n()); }

std::vector<FieldElem> Field::elements() const {
  std::vector<FieldElem> out;
  out.reserve(q());
  for (int i = 0; i < q(); ++i) out.emplace_back(std::uint16_t(i));
  return out;
}

FieldElem Field::inv(FieldElem a) const {
  if (a.is_zero()) throw Error(ErrorCode::DivisionByZero, "inverse of zero");
  const int qm1 = q() - 1;
  return FieldElem(tables_->exp[(qm1 - tables_->log[a.index()]) % qm1]);
}

FieldElem Field::pow(FieldElem a, long long e) const {
  if (e == 0) return one();
  if (a.is_zero()) {
    if (e < 0) throw Error(ErrorCode::DivisionByZero, "negative power of zero");
    return zero();
  }
  const long long qm1 = q() - 1;
  long long r = (static_cast<long long>(tables_->log[a.index()]) * (e % qm1)) % qm1;
  if (r < 0) r += qm1;
  return FieldElem(tables_->exp[r]);
}

}  // namespace manin

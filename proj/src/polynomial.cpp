#include "manin/polynomial.hpp"

#include "manin/error.hpp"

namespace manin::poly {

void trim(Poly& f) {
  while (!f.empty() && f.back().is_zero()) f.pop_back();
}

int degree(const Poly& f) { return int(f.size()) - 1; }

Poly add(const Field& F, const Poly& f, const Poly& g) {
  Poly out(std::max(f.size(), g.size()), F.zero());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = F.add(out[i], g[i]);
  trim(out);
  return out;
}

Poly sub(const Field& F, const Poly& f, const Poly& g) {
  Poly out(std::max(f.size(), g.size()), F.zero());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = F.sub(out[i], g[i]);
  trim(out);
  return out;
}

Poly mul(const Field& F, const Poly& f, const Poly& g) {
  if (f.empty() || g.empty()) return {};
  Poly out(f.size() + g.size() - 1, F.zero());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].is_zero()) continue;
    for (std::size_t j = 0; j < g.size(); ++j) out[i + j] = F.add(out[i + j], F.mul(f[i], g[j]));
  }
  trim(out);
  return out;
}

Poly scale(const Field& F, const Poly& f, FieldElem c) {
  if (c.is_zero()) return {};
  Poly out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = F.mul(f[i], c);
  return out;
}

void divmod(const Field& F, const Poly& f, const Poly& g, Poly& quotient, Poly& remainder) {
  if (g.empty()) throw Error(ErrorCode::DivisionByZero, "polynomial division by zero");
  remainder = f;
  trim(remainder);
  const int dg = degree(g);
  quotient.assign(std::max(0, degree(remainder) - dg + 1), F.zero());
  const FieldElem lead_inv = F.inv(g.back());
  while (degree(remainder) >= dg) {
    const int shift = degree(remainder) - dg;
    const FieldElem factor = F.mul(remainder.back(), lead_inv);
    quotient[shift] = factor;
    for (int j = 0; j <= dg; ++j)
      remainder[shift + j] = F.sub(remainder[shift + j], F.mul(factor, g[j]));
    trim(remainder);
  }
  trim(quotient);
}

Poly rem(const Field& F, const Poly& f, const Poly& g) {
  Poly q, r;
  divmod(F, f, g, q, r);
  return r;
}

Poly monic(const Field& F, const Poly& f) {
  if (f.empty()) return {};
  return scale(F, f, F.inv(f.back()));
}

Poly gcd(const Field& F, Poly f, Poly g) {
  trim(f);
  trim(g);
  while (!g.empty()) {
    Poly r = rem(F, f, g);
    f = std::move(g);
    g = std::move(r);
  }
  return monic(F, f);
}

FieldElem eval(const Field& F, const Poly& f, FieldElem x) {
  FieldElem acc = F.zero();
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = F.add(F.mul(acc, x), *it);
  return acc;
}

long long monic_index(const Field& F, const Poly& f) {
  long long index = 0;
  for (int j = degree(f) - 1; j >= 0; --j) index = index * F.q() + f[j].index();
  return index;
}

Poly monic_from_index(const Field& F, int n, long long index) {
  Poly f(n + 1);
  for (int j = 0; j < n; ++j, index /= F.q()) f[j] = FieldElem(std::uint16_t(index % F.q()));
  f[n] = F.one();
  return f;
}

}  // namespace manin::poly

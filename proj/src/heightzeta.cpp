#include "manin/heightzeta.hpp"

#include <map>
#include <mutex>

#include "json.hpp"
#include "manin/error.hpp"
#include "manin/projline.hpp"

namespace manin {

namespace {

mpz_class zpow(long long q, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(q), e);
  return r;
}

mpq_class qpow(long long q, long e) {
  if (e >= 0) return mpq_class(zpow(q, e));
  return mpq_class(mpz_class(1), zpow(q, -e));
}

mpq_class mpow(const mpq_class& x, unsigned long e) {
  mpq_class r;
  mpz_pow_ui(r.get_num_mpz_t(), x.get_num_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), x.get_den_mpz_t(), e);
  return r;
}

void check_q(long long q) {
  if (q < 2) throw Error(ErrorCode::InvalidConfig, "q must be at least 2");
}

unsigned long as_exponent(const mpz_class& n) {
  if (!n.fits_ulong_p()) throw Error(ErrorCode::TooLarge, "exponent " + n.get_str());
  return n.get_ui();
}

}  // namespace

TruncatedMultiSeries::TruncatedMultiSeries(const Exponent& orders, int point_cutoff)
    : orders_(orders), cutoff_(point_cutoff) {
  std::size_t n = 1;
  for (int o : orders_) {
    if (o < 0) throw Error(ErrorCode::InvalidConfig, "negative truncation order");
    n *= std::size_t(o + 1);
  }
  c_.assign(n, mpq_class(0));
}

TruncatedMultiSeries TruncatedMultiSeries::one(const Exponent& orders) {
  TruncatedMultiSeries s(orders);
  s.c_[0] = 1;
  return s;
}

bool TruncatedMultiSeries::in_range(const Exponent& e) const {
  for (int i = 0; i < 4; ++i)
    if (e[i] < 0 || e[i] > orders_[i]) return false;
  return true;
}

std::size_t TruncatedMultiSeries::index(const Exponent& e) const {
  std::size_t idx = 0;
  for (int i = 0; i < 4; ++i) idx = idx * std::size_t(orders_[i] + 1) + std::size_t(e[i]);
  return idx;
}

mpq_class TruncatedMultiSeries::coeff(const Exponent& e) const { return in_range(e) ? c_[index(e)] : mpq_class(0); }

void TruncatedMultiSeries::set(const Exponent& e, const mpq_class& v) {
  if (!in_range(e)) throw Error(ErrorCode::DegreeMismatch, "exponent outside truncation");
  c_[index(e)] = v;
}

void TruncatedMultiSeries::add(const Exponent& e, const mpq_class& v) {
  if (in_range(e)) c_[index(e)] += v;
}

std::vector<std::pair<Exponent, mpq_class>> TruncatedMultiSeries::terms() const {
  std::vector<std::pair<Exponent, mpq_class>> out;
  Exponent e{};
  for (e[0] = 0; e[0] <= orders_[0]; ++e[0])
    for (e[1] = 0; e[1] <= orders_[1]; ++e[1])
      for (e[2] = 0; e[2] <= orders_[2]; ++e[2])
        for (e[3] = 0; e[3] <= orders_[3]; ++e[3]) {
          const mpq_class& v = c_[index(e)];
          if (v != 0) out.emplace_back(e, v);
        }
  return out;
}

mpq_class TruncatedMultiSeries::evaluate(const std::array<mpq_class, 4>& t) const {
  mpq_class total = 0;
  for (const auto& [e, v] : terms()) {
    mpq_class term = v;
    for (int i = 0; i < 4; ++i) term *= mpow(t[i], e[i]);
    total += term;
  }
  return total;
}

TruncatedMultiSeries operator*(const TruncatedMultiSeries& x, const TruncatedMultiSeries& y) {
  if (x.orders_ != y.orders_) throw Error(ErrorCode::DegreeMismatch, "series truncated differently");
  TruncatedMultiSeries r(x.orders_, std::max(x.cutoff_, y.cutoff_));
  const auto tx = x.terms();
  const auto ty = y.terms();
  for (const auto& [ex, vx] : tx)
    for (const auto& [ey, vy] : ty) {
      const Exponent e{ex[0] + ey[0], ex[1] + ey[1], ex[2] + ey[2], ex[3] + ey[3]};
      if (r.in_range(e)) r.c_[r.index(e)] += vx * vy;
    }
  return r;
}

TruncatedMultiSeries operator+(const TruncatedMultiSeries& x, const TruncatedMultiSeries& y) {
  if (x.orders_ != y.orders_) throw Error(ErrorCode::DegreeMismatch, "series truncated differently");
  TruncatedMultiSeries r = x;
  r.cutoff_ = std::max(x.cutoff_, y.cutoff_);
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += y.c_[i];
  return r;
}

TruncatedMultiSeries TruncatedMultiSeries::pow(unsigned long e) const {
  TruncatedMultiSeries result = one(orders_);
  result.cutoff_ = cutoff_;
  TruncatedMultiSeries base = *this;
  while (e) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

bool operator==(const TruncatedMultiSeries& x, const TruncatedMultiSeries& y) {
  return x.orders_ == y.orders_ && x.c_ == y.c_;
}

TruncatedMultiSeries local_factor(const EulerFactorSpec& spec) {
  check_q(spec.q);
  if (spec.degree < 1) throw Error(ErrorCode::InvalidConfig, "closed point degree must be >= 1");
  const long n = spec.degree;
  const mpq_class u = qpow(spec.q, -n);
  TruncatedMultiSeries f(spec.orders, spec.degree);
  f.set({0, 0, 0, 0}, 1 - 6 * mpow(u, 2) + 8 * mpow(u, 3) - 3 * mpow(u, 4));
  for (int i = 0; i < 4; ++i) {
    for (long d = 1; n * d <= spec.orders[i]; ++d) {
      const mpq_class inner = mpow(u, 2 * d) - 2 * mpow(u, 2 * d + 1) + 2 * mpow(u, 2 * d + 3) - mpow(u, 2 * d + 4);
      Exponent e{};
      e[i] = int(n * d);
      f.set(e, qpow(spec.q, n * d) * inner);
    }
  }
  return f;
}

mpz_class closed_point_count(long long q, int n) {
  check_q(q);
  return necklace_count(q, n);
}

TruncatedMultiSeries euler_product(long long q, int N, const Exponent& orders) {
  if (N < 1) throw Error(ErrorCode::InvalidConfig, "N must be >= 1");
  TruncatedMultiSeries r = TruncatedMultiSeries::one(orders);
  for (int n = 1; n <= N; ++n) r = r * local_factor({n, q, orders}).pow(as_exponent(closed_point_count(q, n)));
  r.set_point_cutoff(N);
  return r;
}

TruncatedMultiSeries euler_product_folded(long long q, int N, const Exponent& orders) {
  if (N < 1) throw Error(ErrorCode::InvalidConfig, "N must be >= 1");
  TruncatedMultiSeries r = TruncatedMultiSeries::one(orders);
  for (int n = 1; n <= N; ++n) {
    const TruncatedMultiSeries f = local_factor({n, q, orders});
    const unsigned long count = as_exponent(closed_point_count(q, n));
    for (unsigned long j = 0; j < count; ++j) r = r * f;
  }
  r.set_point_cutoff(N);
  return r;
}

LogDerivativeCheck log_derivative_check(long long q, int N, const Exponent& orders) {
  LogDerivativeCheck out;
  const TruncatedMultiSeries prod = euler_product(q, N, orders);
  const mpq_class c0 = prod.coeff({0, 0, 0, 0});
  for (int i = 0; i < 4; ++i) {
    Exponent e{};
    e[i] = 1;
    out.direct[i] = prod.coeff(e);
    mpq_class log_deriv = 0;
    for (int n = 1; n <= N; ++n) {
      const TruncatedMultiSeries f = local_factor({n, q, orders});
      log_deriv += mpq_class(closed_point_count(q, n)) * f.coeff(e) / f.coeff({0, 0, 0, 0});
    }
    out.from_factors[i] = c0 * log_deriv;
  }
  out.agrees = out.direct == out.from_factors;
  return out;
}

mpz_class surface_count(long long q, int n) {
  check_q(q);
  const mpz_class Q = zpow(q, n);
  return Q * Q + 6 * Q + 1;
}

mpz_class blowup_point_count(long long q, int n) {
  check_q(q);
  const mpz_class Q = zpow(q, n);
  return (Q + 1) * (Q + 1) + 4 * Q;
}

TamagawaReport tamagawa(long long q, int N) {
  check_q(q);
  if (N < 1) throw Error(ErrorCode::InvalidConfig, "N must be >= 1");
  static std::mutex mutex;
  static std::map<std::pair<long long, int>, TamagawaReport> memo;
  {
    std::lock_guard lock(mutex);
    auto it = memo.find({q, N});
    if (it != memo.end()) return it->second;
  }
  TamagawaReport rep;
  rep.q = q;
  rep.N = N;
  // q^2 (1 - 1/q)^{-6} = q^8 / (q - 1)^6
  BigFraction acc(zpow(q, 8), zpow(q - 1, 6));
  for (int n = 1; n <= N; ++n) {
    const mpz_class Q = zpow(q, n);
    mpz_class one_minus_u6 = Q - 1;  // (1 - q^-n)^6 = (q^n - 1)^6 / q^{6n}
    mpz_pow_ui(one_minus_u6.get_mpz_t(), one_minus_u6.get_mpz_t(), 6);
    const BigFraction factor(one_minus_u6 * surface_count(q, n), zpow(q, 8 * n));
    const BigFraction step = factor.pow(as_exponent(closed_point_count(q, n)));
    acc *= step;
    rep.partial.push_back(acc);
    // (partial(n) - partial(n-1)) / partial(n) = 1 - 1/step
    if (n == N && N >= 2) rep.last_increment = BigFraction(step.num() - step.den(), step.num()).abs().to_double();
  }
  rep.value = acc;
  std::lock_guard lock(mutex);
  memo.emplace(std::make_pair(q, N), rep);
  return rep;
}

namespace {

// (1 - u)^6 (1 + 6u + u^2), u = q^{-n}
mpq_class rhs_local(long long q, int n) {
  const mpq_class u = qpow(q, -n);
  return mpow(1 - u, 6) * (1 + 6 * u + u * u);
}

// f_c(t, t, t, t) (1 - x)^4 with x = (t/q)^n, the sums over d_i in closed form
mpq_class lhs_local(long long q, int n, const mpq_class& tq) {
  const mpq_class u = qpow(q, -n);
  const mpq_class x = mpow(tq, n);
  const mpq_class tail = 1 - 2 * u + 2 * mpow(u, 3) - mpow(u, 4);
  const mpq_class f = 1 - 6 * mpow(u, 2) + 8 * mpow(u, 3) - 3 * mpow(u, 4) + 4 * (x / (1 - x)) * tail;
  return f * mpow(1 - x, 4);
}

mpq_class checked_tq(long long q, const mpq_class& t) {
  check_q(q);
  const mpq_class tq = t / mpq_class(long(q));
  if (tq <= 0 || tq >= 1) throw Error(ErrorCode::InvalidConfig, "need 0 < t < q");
  return tq;
}

}  // namespace

BigFraction limit_rhs(long long q, int N) {
  check_q(q);
  const mpq_class one_minus = 1 - mpq_class(1, long(q));
  BigFraction acc(mpq_class(1 / mpow(one_minus, 4)));
  for (int n = 1; n <= N; ++n) acc *= BigFraction(rhs_local(q, n)).pow(as_exponent(closed_point_count(q, n)));
  return acc;
}

BigFraction regularized_lhs(long long q, int N, const mpq_class& t) {
  const mpq_class tq = checked_tq(q, t);
  BigFraction acc(mpq_class(1 / mpow(1 - tq, 4)));
  for (int n = 1; n <= N; ++n) acc *= BigFraction(lhs_local(q, n, tq)).pow(as_exponent(closed_point_count(q, n)));
  return acc;
}

LimitReport limit_formula_check(long long q, int N, int m_max) {
  if (N < 1 || m_max < 1) throw Error(ErrorCode::InvalidConfig, "N and m_max must be >= 1");
  LimitReport rep;
  rep.q = q;
  rep.N = N;
  rep.m_max = m_max;
  rep.rhs = limit_rhs(q, N);
  const mpq_class one_minus = 1 - mpq_class(1, long(q));
  for (int m = 1; m <= m_max; ++m) {
    // lhs / rhs factor by factor; each local ratio is small once reduced.
    const mpq_class tq = checked_tq(q, 1 - mpq_class(1, zpow(2, m)));
    BigFraction ratio(mpq_class(mpow(one_minus / (1 - tq), 4)));
    for (int n = 1; n <= N; ++n)
      ratio *= BigFraction(mpq_class(lhs_local(q, n, tq) / rhs_local(q, n))).pow(as_exponent(closed_point_count(q, n)));
    rep.gaps.push_back((ratio - BigFraction(1)).abs().to_double());
    rep.ratio.push_back(std::move(ratio));
  }
  rep.gaps_decreasing = true;
  for (int m = 3; m <= m_max; ++m)
    if (!(rep.gaps[m - 1] < rep.gaps[m - 2])) rep.gaps_decreasing = false;
  return rep;
}

BigFraction expected_section_count(long long q, long long a, long long a_prime, const std::array<int, 4>& k, int N) {
  const long e = long(2 * a + 2 * a_prime - (k[0] + k[1] + k[2] + k[3]));
  return BigFraction(mpq_class(zpow(q - 1, 2) * qpow(q, e))) * tamagawa(q, N).value;
}

std::string series_to_json(const TruncatedMultiSeries& s) {
  nlohmann::ordered_json j;
  j["orders"] = s.orders();
  j["point_cutoff"] = s.point_cutoff();
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& [e, v] : s.terms()) j["terms"].push_back({{"exponent", e}, {"value", v.get_str()}});
  return j.dump();
}

}  // namespace manin

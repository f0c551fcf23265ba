#include "manin/rational.hpp"

#include <cmath>

#include "manin/error.hpp"

namespace manin {

BigFraction::BigFraction(mpz_class num, mpz_class den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw Error(ErrorCode::DivisionByZero, "zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
}

mpq_class BigFraction::reduced() const {
  mpq_class r(num_, den_);
  r.canonicalize();
  return r;
}

double BigFraction::to_double() const {
  if (num_ == 0) return 0.0;
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, num_.get_mpz_t());
  const double md = mpz_get_d_2exp(&ed, den_.get_mpz_t());
  return std::ldexp(mn / md, int(en - ed));
}

std::string BigFraction::to_string() const {
  const mpq_class r = reduced();
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

BigFraction BigFraction::pow(unsigned long e) const {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), num_.get_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), den_.get_mpz_t(), e);
  return BigFraction(std::move(n), std::move(d));
}

BigFraction BigFraction::inverse() const { return BigFraction(den_, num_); }

BigFraction operator*(const BigFraction& x, const BigFraction& y) {
  return BigFraction(x.num_ * y.num_, x.den_ * y.den_);
}

BigFraction operator/(const BigFraction& x, const BigFraction& y) {
  return BigFraction(x.num_ * y.den_, x.den_ * y.num_);
}

BigFraction operator+(const BigFraction& x, const BigFraction& y) {
  if (x.den_ == y.den_) return BigFraction(x.num_ + y.num_, x.den_);
  return BigFraction(x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_);
}

BigFraction operator-(const BigFraction& x, const BigFraction& y) {
  if (x.den_ == y.den_) return BigFraction(x.num_ - y.num_, x.den_);
  return BigFraction(x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_);
}

bool operator==(const BigFraction& x, const BigFraction& y) { return x.num_ * y.den_ == y.num_ * x.den_; }

std::strong_ordering operator<=>(const BigFraction& x, const BigFraction& y) {
  const int c = cmp(x.num_ * y.den_, y.num_ * x.den_);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

}  // namespace manin

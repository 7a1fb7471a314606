#include "cdense/rational.hpp"

#include <cctype>
#include <functional>

namespace cdense {

Rational::Rational(long num, long den) {
  if (den == 0) throw InputError("rational with zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational Rational::operator/(const Rational& o) const {
  if (o.v_ == 0) throw std::domain_error("division by zero");
  return Rational(mpq_class(v_ / o.v_));
}

static bool all_digits(std::string_view s, bool allow_sign) {
  if (s.empty()) return false;
  std::size_t i = 0;
  if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

Rational Rational::parse(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!all_digits(num, true) || !all_digits(den, false))
    throw InputError("malformed rational \"" + std::string(text) + "\"");
  mpz_class n(std::string(num[0] == '+' ? num.substr(1) : num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw InputError("malformed rational \"" + std::string(text) + "\" (zero denominator)");
  mpq_class q(n, d);
  q.canonicalize();
  return Rational(q);
}

std::string Rational::str() const {
  if (v_.get_den() == 1) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

long Rational::floor_mul(long L) const {
  mpz_class p = v_.get_num() * L, q;
  mpz_fdiv_q(q.get_mpz_t(), p.get_mpz_t(), v_.get_den().get_mpz_t());
  return q.get_si();
}

long Rational::ceil_mul(long L) const {
  mpz_class p = v_.get_num() * L, q;
  mpz_cdiv_q(q.get_mpz_t(), p.get_mpz_t(), v_.get_den().get_mpz_t());
  return q.get_si();
}

std::size_t Rational::hash() const {
  std::size_t h1 = std::hash<std::string>{}(v_.get_num().get_str(16));
  std::size_t h2 = std::hash<std::string>{}(v_.get_den().get_str(16));
  return h1 ^ (h2 * 0x9e3779b97f4a7c15ULL);
}

}  // namespace cdense

#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cdense {

/// Raised for malformed input files, flags or literals.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact rational in lowest terms. Thin value wrapper over mpq_class so the
// rest of the code never sees GMP's expression templates.
class Rational {
 public:
  Rational() = default;
  Rational(long num) : v_(num) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  /// Accepts "p/q" or an integer; throws InputError on a zero denominator or junk.
  static Rational parse(std::string_view text);

  std::string str() const;

  const mpq_class& raw() const { return v_; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  // floor(v * L) and ceil(v * L); callers keep v in a small range.
  long floor_mul(long L) const;
  long ceil_mul(long L) const;

  Rational operator+(const Rational& o) const { return Rational(mpq_class(v_ + o.v_)); }
  Rational operator-(const Rational& o) const { return Rational(mpq_class(v_ - o.v_)); }
  Rational operator*(const Rational& o) const { return Rational(mpq_class(v_ * o.v_)); }
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }

  bool operator==(const Rational& o) const { return v_ == o.v_; }
  std::strong_ordering operator<=>(const Rational& o) const {
    int c = cmp(v_, o.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  std::size_t hash() const;

 private:
  mpq_class v_;
};

inline Rational monus(const Rational& a, const Rational& b) {
  return a > b ? a - b : Rational(0);
}
inline const Rational& rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational cap1(const Rational& a) { return a > Rational(1) ? Rational(1) : a; }

struct RationalHash {
  std::size_t operator()(const Rational& r) const { return r.hash(); }
};

}  // namespace cdense

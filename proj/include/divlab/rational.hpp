#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "divlab/error.hpp"

namespace divlab {

/*
 * Exact rational number over 64-bit integers.
 *
 * Invariant: den_ > 0 and gcd(|num_|, den_) == 1, so equality is structural.
 * Intermediate products use 128-bit arithmetic; a result that does not fit
 * back into 64 bits throws Error(kOverflow) rather than wrapping.
 */
class Rat {
 public:
  constexpr Rat() = default;
  constexpr Rat(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rat(std::int64_t n, std::int64_t d) { assign(n, d); }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  constexpr bool is_zero() const { return num_ == 0; }
  constexpr bool is_negative() const { return num_ < 0; }
  constexpr bool is_integer() const { return den_ == 1; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// "p" for integers, "p/q" otherwise.
  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "p", "p/q" and finite decimals such as "-1.25" or ".5".
  static Rat parse(std::string_view text);

  friend Rat operator+(const Rat& a, const Rat& b) {
    if (a.den_ == b.den_) return from_wide(Wide{a.num_} + b.num_, a.den_);
    return from_wide(Wide{a.num_} * b.den_ + Wide{b.num_} * a.den_, Wide{a.den_} * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    if (a.den_ == b.den_) return from_wide(Wide{a.num_} - b.num_, a.den_);
    return from_wide(Wide{a.num_} * b.den_ - Wide{b.num_} * a.den_, Wide{a.den_} * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return from_wide(Wide{a.num_} * b.num_, Wide{a.den_} * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw Error(ErrorKind::kInvalidArgument, "division by zero");
    Wide n = Wide{a.num_} * b.den_;
    Wide d = Wide{a.den_} * b.num_;
    return from_wide(n, d);
  }
  Rat operator-() const {
    Rat r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend constexpr bool operator==(const Rat& a, const Rat& b) = default;
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    Wide l = Wide{a.num_} * b.den_;
    Wide r = Wide{b.num_} * a.den_;
    return l < r ? std::strong_ordering::less
                 : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.to_string(); }

 private:
  __extension__ typedef __int128 Wide;

  static Wide wide_gcd(Wide a, Wide b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      Wide t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rat from_wide(Wide n, Wide d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) return Rat{};
    if (d != 1) {
      Wide g = wide_gcd(n, d);
      if (g != 1) {
        n /= g;
        d /= g;
      }
    }
    constexpr Wide kMax = INT64_MAX;
    if (n > kMax || n < -kMax || d > kMax) {
      throw Error(ErrorKind::kOverflow, "rational value exceeds 64-bit range");
    }
    Rat r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  void assign(std::int64_t n, std::int64_t d) {
    if (d == 0) throw Error(ErrorKind::kInvalidArgument, "zero denominator");
    *this = from_wide(n, d);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rat abs(const Rat& r) { return r.is_negative() ? -r : r; }

inline Rat Rat::parse(std::string_view text) {
  auto fail = [&]() -> Error {
    return Error(ErrorKind::kParse, "not a rational: \"" + std::string(text) + "\"");
  };
  if (text.empty()) throw fail();

  auto parse_int = [&](std::string_view digits, bool allow_sign) -> Wide {
    bool neg = false;
    if (allow_sign && !digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
      neg = digits[0] == '-';
      digits.remove_prefix(1);
    }
    if (digits.empty()) throw fail();
    Wide v = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') throw fail();
      v = v * 10 + (c - '0');
      if (v > Wide{INT64_MAX}) throw Error(ErrorKind::kOverflow, "literal too large: " + std::string(text));
    }
    return neg ? -v : v;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Wide n = parse_int(text.substr(0, slash), true);
    Wide d = parse_int(text.substr(slash + 1), false);
    if (d == 0) throw Error(ErrorKind::kParse, "zero denominator in \"" + std::string(text) + "\"");
    return from_wide(n, d);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.remove_prefix(1);
    if (whole.empty() && frac.empty()) throw fail();
    if (frac.size() > 18) throw Error(ErrorKind::kOverflow, "too many decimals: " + std::string(text));
    Wide w = whole.empty() ? 0 : parse_int(whole, false);
    Wide f = frac.empty() ? 0 : parse_int(frac, false);
    Wide scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Wide n = w * scale + f;
    return from_wide(neg ? -n : n, scale);
  }
  return from_wide(parse_int(text, true), 1);
}

}  // namespace divlab

#include "pml/scalar.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace pml {

namespace {

// GMP's string constructor treats a leading zero as an octal prefix, so
// integers are validated and stripped by hand before conversion.
Int parse_int(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  size_t pos = 0;
  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    pos = 1;
  }
  if (pos == s.size()) throw std::invalid_argument("bad integer literal '" + s + "'");
  for (size_t i = pos; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw std::invalid_argument("bad integer literal '" + s + "'");
  while (pos + 1 < s.size() && s[pos] == '0') ++pos;
  Int v(s.substr(pos));
  return neg ? Int(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw std::invalid_argument("empty numeric literal");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Int num = parse_int(s.substr(0, slash));
    Int den = parse_int(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  // Decimal literal: mantissa with optional fraction part and exponent.
  auto epos = s.find_first_of("eE");
  long long exp10 = 0;
  std::string mant = s;
  if (epos != std::string::npos) {
    exp10 = std::stoll(s.substr(epos + 1));
    mant = s.substr(0, epos);
  }
  auto dot = mant.find('.');
  if (dot != std::string::npos) {
    exp10 -= static_cast<long long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant.empty() || mant == "+" || mant == "-")
    throw std::invalid_argument("bad numeric literal '" + text + "'");
  Int m = parse_int(mant);
  Rational r(m);
  Int p10 = 1;
  for (long long i = 0; i < std::llabs(exp10); ++i) p10 *= 10;
  if (exp10 >= 0)
    r *= Rational(p10);
  else
    r /= Rational(p10);
  return r;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::optional<Rational> rationalize(double x, double rel_err, const Int& max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  const double tol = rel_err * std::max(1.0, std::fabs(x));
  // Continued fraction expansion of x, testing each convergent.
  Int p_prev = 0, q_prev = 1;
  Int p = 1, q = 0;  // seeded so the first step produces floor(x)/1
  double frac = x;
  for (int iter = 0; iter < 64; ++iter) {
    double fl = std::floor(frac);
    if (fl > 9e18 || fl < -9e18) break;
    Int a = static_cast<long long>(fl);
    Int p_next = a * p + p_prev;
    Int q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    if (q > max_den) break;
    Rational cand(p, q);
    if (std::fabs(to_double(cand) - x) <= tol) return cand;
    double rem = frac - fl;
    if (rem < 1e-18) break;
    frac = 1.0 / rem;
  }
  return std::nullopt;
}

bool is_perfect_square(const Rational& r, Rational& root) {
  if (r < 0) return false;
  if (r == 0) {
    root = 0;
    return true;
  }
  const Int num = boost::multiprecision::numerator(r);
  const Int den = boost::multiprecision::denominator(r);
  const Int sn = boost::multiprecision::sqrt(num);
  const Int sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return false;
  root = Rational(sn, sd);
  return true;
}

}  // namespace pml

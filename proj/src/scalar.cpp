#include "cohft/scalar.hpp"

#include <cctype>

namespace cohft {

namespace {

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Scalar parse_scalar(const std::string& text) {
  const auto slash = text.find('/');
  const std::string num = text.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+')
    throw Error("malformed scalar '" + text + "'");
  mpz_class p(num[0] == '+' ? num.substr(1) : num, 10);
  mpz_class q(den, 10);
  if (q == 0) throw Error("zero denominator in '" + text + "'");
  Scalar x(p, q);
  x.canonicalize();
  return x;
}

std::string to_string(const Scalar& x) {
  Scalar y = x;
  y.canonicalize();
  if (y.get_den() == 1) return y.get_num().get_str();
  return y.get_num().get_str() + "/" + y.get_den().get_str();
}

Scalar factorial(int n) {
  mpz_class r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return Scalar(r);
}

Scalar double_factorial_odd(int k) {
  mpz_class r = 1;
  for (int i = 2 * k - 1; i > 1; i -= 2) r *= i;
  return Scalar(r);
}

Scalar binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Scalar(r);
}

Scalar power(const Scalar& base, int exponent) {
  Scalar b = exponent < 0 ? Scalar(1) / base : base;
  int e = exponent < 0 ? -exponent : exponent;
  Scalar r = 1;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

}  // namespace cohft

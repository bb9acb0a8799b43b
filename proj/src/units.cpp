#include "iqsched/units.hpp"

#include <cctype>

namespace iqsched {

Rational parseDecimal(const std::string& text) {
  size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  std::int64_t num = 0, den = 1;
  bool sawDigit = false, sawDot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (sawDot) throw std::invalid_argument("bad decimal: " + text);
      sawDot = true;
      continue;
    }
    if (!std::isdigit((unsigned char)c))
      throw std::invalid_argument("bad decimal: " + text);
    if (num > (INT64_MAX - 9) / 10 || den > INT64_MAX / 10)
      throw std::invalid_argument("decimal out of range: " + text);
    num = num * 10 + (c - '0');
    if (sawDot) den *= 10;
    sawDigit = true;
  }
  if (!sawDigit) throw std::invalid_argument("bad decimal: " + text);
  return Rational(neg ? -num : num, den);
}

}  // namespace iqsched

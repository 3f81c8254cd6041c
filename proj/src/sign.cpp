#include "dqcp/sign.hpp"

namespace dqcp {
namespace {

// Bit set over {-, 0, +}.
constexpr std::uint8_t kNeg = 1;
constexpr std::uint8_t kZero = 2;
constexpr std::uint8_t kPos = 4;

std::uint8_t mask(Sign s) {
  switch (s) {
    case Sign::zero: return kZero;
    case Sign::positive: return kPos;
    case Sign::nonnegative: return kZero | kPos;
    case Sign::negative: return kNeg;
    case Sign::nonpositive: return kNeg | kZero;
    case Sign::unknown: break;
  }
  return kNeg | kZero | kPos;
}

Sign from_mask(std::uint8_t m) {
  switch (m) {
    case kZero: return Sign::zero;
    case kPos: return Sign::positive;
    case kZero | kPos: return Sign::nonnegative;
    case kNeg: return Sign::negative;
    case kNeg | kZero: return Sign::nonpositive;
    default: return Sign::unknown;
  }
}

template <class Op>
Sign combine(Sign a, Sign b, Op op) {
  std::uint8_t out = 0;
  const std::uint8_t ma = mask(a), mb = mask(b);
  for (std::uint8_t x : {kNeg, kZero, kPos}) {
    if (!(ma & x)) continue;
    for (std::uint8_t y : {kNeg, kZero, kPos}) {
      if (mb & y) out |= op(x, y);
    }
  }
  return from_mask(out);
}

int as_int(std::uint8_t bit) { return bit == kNeg ? -1 : (bit == kZero ? 0 : 1); }

}  // namespace

std::string_view to_string(Sign s) {
  switch (s) {
    case Sign::zero: return "zero";
    case Sign::positive: return "positive";
    case Sign::nonnegative: return "nonnegative";
    case Sign::negative: return "negative";
    case Sign::nonpositive: return "nonpositive";
    case Sign::unknown: break;
  }
  return "unknown";
}

bool parse_sign(std::string_view w, Sign& out) {
  if (w == "pos" || w == "positive") out = Sign::positive;
  else if (w == "nonneg" || w == "nonnegative") out = Sign::nonnegative;
  else if (w == "neg" || w == "negative") out = Sign::negative;
  else if (w == "nonpos" || w == "nonpositive") out = Sign::nonpositive;
  else if (w == "zero") out = Sign::zero;
  else if (w == "unknown") out = Sign::unknown;
  else return false;
  return true;
}

bool sign_leq(Sign a, Sign b) { return (mask(a) & ~mask(b)) == 0; }

Sign sign_join(Sign a, Sign b) { return from_mask(mask(a) | mask(b)); }

Sign sign_negate(Sign s) {
  std::uint8_t m = mask(s);
  std::uint8_t out = m & kZero;
  if (m & kNeg) out |= kPos;
  if (m & kPos) out |= kNeg;
  return from_mask(out);
}

Sign sign_add(Sign a, Sign b) {
  return combine(a, b, [](std::uint8_t x, std::uint8_t y) -> std::uint8_t {
    const int sx = as_int(x), sy = as_int(y);
    if (sx == 0) return y;
    if (sy == 0) return x;
    if (sx == sy) return x;
    return kNeg | kZero | kPos;
  });
}

Sign sign_mul(Sign a, Sign b) {
  return combine(a, b, [](std::uint8_t x, std::uint8_t y) -> std::uint8_t {
    const int p = as_int(x) * as_int(y);
    return p < 0 ? kNeg : (p == 0 ? kZero : kPos);
  });
}

Sign sign_div(Sign a, Sign b) {
  // Division never produces a zero denominator in-domain; drop 0 from b.
  std::uint8_t mb = mask(b) & ~kZero;
  if (mb == 0) return Sign::unknown;
  return sign_mul(a, from_mask(mb));
}

Sign sign_of_value(double v) {
  if (v > 0) return Sign::positive;
  if (v < 0) return Sign::negative;
  return Sign::zero;
}

bool sign_contains(Sign s, double v) { return sign_leq(sign_of_value(v), s); }

}  // namespace dqcp

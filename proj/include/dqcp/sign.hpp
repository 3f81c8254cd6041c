#pragma once

#include <cstdint>
#include <string_view>

namespace dqcp {

// Sign of an expression, as a set of possible signs {-, 0, +}. The lattice is
// ordered by set inclusion; {-, +} has no name of its own and widens to
// unknown.
enum class Sign : std::uint8_t {
  zero,
  positive,
  nonnegative,
  negative,
  nonpositive,
  unknown,
};

std::string_view to_string(Sign s);
// Parses the attribute spelling used in problem documents ("pos", "nonneg",
// ...) as well as the full names. Returns false on an unknown word.
bool parse_sign(std::string_view word, Sign& out);

// Partial order: a ⊑ b iff every value admitted by a is admitted by b.
bool sign_leq(Sign a, Sign b);
Sign sign_join(Sign a, Sign b);

Sign sign_negate(Sign s);
Sign sign_add(Sign a, Sign b);
Sign sign_mul(Sign a, Sign b);
// Sign of a / b, assuming b is nonzero wherever the quotient is defined.
Sign sign_div(Sign a, Sign b);

Sign sign_of_value(double v);
bool sign_contains(Sign s, double v);

inline bool is_nonneg(Sign s) { return sign_leq(s, Sign::nonnegative); }
inline bool is_nonpos(Sign s) { return sign_leq(s, Sign::nonpositive); }
inline bool is_positive(Sign s) { return sign_leq(s, Sign::positive); }
inline bool is_negative(Sign s) { return sign_leq(s, Sign::negative); }

}  // namespace dqcp

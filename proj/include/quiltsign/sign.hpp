#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "quiltsign/error.hpp"

namespace quiltsign {

/// An element of {+1, -1}.
class Sign {
 public:
  constexpr Sign() = default;

  static constexpr Sign plus() { return Sign(false); }
  static constexpr Sign minus() { return Sign(true); }

  /// (-1)^e for an exact integer exponent.
  static constexpr Sign from_exponent(std::int64_t e) { return Sign((e & 1) != 0); }
  static constexpr Sign from_bool(bool positive) { return Sign(!positive); }

  constexpr int value() const { return neg_ ? -1 : 1; }
  constexpr bool positive() const { return !neg_; }

  constexpr Sign operator*(Sign o) const { return Sign(neg_ != o.neg_); }
  constexpr Sign& operator*=(Sign o) {
    neg_ = neg_ != o.neg_;
    return *this;
  }
  constexpr Sign operator-() const { return Sign(!neg_); }
  constexpr bool operator==(const Sign&) const = default;

  constexpr Sign pow(std::int64_t k) const { return neg_ ? from_exponent(k) : plus(); }

  std::string str() const { return neg_ ? "-1" : "+1"; }

 private:
  constexpr explicit Sign(bool neg) : neg_(neg) {}
  bool neg_ = false;
};

inline std::ostream& operator<<(std::ostream& os, Sign s) { return os << s.str(); }

/// Sign of a permutation given in one-line notation (perm[i] = image of i).
inline Sign permutation_sign(const std::vector<std::size_t>& perm) {
  std::vector<char> seen(perm.size(), 0);
  std::int64_t transpositions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size()) throw PreconditionError("not a permutation: entry out of range");
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = 1;
      ++len;
    }
    transpositions += static_cast<std::int64_t>(len) - 1;
  }
  std::vector<std::size_t> sorted(perm);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != i) throw PreconditionError("not a permutation: repeated entry");
  return Sign::from_exponent(transpositions);
}

/// Koszul sign of rearranging graded letters. `order` lists the original
/// positions in their new order; each inverted pair contributes deg*deg.
inline Sign koszul_sign(const std::vector<std::int64_t>& degrees, const std::vector<std::size_t>& order) {
  if (order.size() != degrees.size()) throw PreconditionError("koszul_sign: size mismatch");
  std::int64_t e = 0;
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a + 1; b < order.size(); ++b)
      if (order[a] > order[b]) e += degrees[order[a]] * degrees[order[b]];
  return Sign::from_exponent(e);
}

}  // namespace quiltsign

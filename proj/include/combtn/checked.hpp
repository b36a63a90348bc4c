#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace combtn {

/// Multiplication count. All cost arithmetic is overflow-checked; wraparound
/// is reported as std::overflow_error instead of saturating.
using Count = std::uint64_t;
using SignedCount = std::int64_t;

inline Count checked_mul(Count a, Count b) {
  Count out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("multiplication count overflows 64 bits: " + std::to_string(a) +
                              " * " + std::to_string(b));
  }
  return out;
}

inline Count checked_add(Count a, Count b) {
  Count out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("multiplication count overflows 64 bits: " + std::to_string(a) +
                              " + " + std::to_string(b));
  }
  return out;
}

inline Count checked_sub(Count a, Count b) {
  if (b > a) {
    throw std::overflow_error("negative count in unsigned arithmetic: " + std::to_string(a) +
                              " - " + std::to_string(b));
  }
  return a - b;
}

/// a - b as a signed count; throws if the difference leaves the int64 range.
inline SignedCount signed_difference(Count a, Count b) {
  SignedCount out = 0;
  if (__builtin_sub_overflow(a, b, &out)) {
    throw std::overflow_error("count difference overflows signed 64 bits");
  }
  return out;
}

template <typename... Ts>
Count checked_product(Count first, Ts... rest) {
  Count acc = first;
  ((acc = checked_mul(acc, static_cast<Count>(rest))), ...);
  return acc;
}

}  // namespace combtn

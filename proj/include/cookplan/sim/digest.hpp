#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace cookplan::sim {

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// splitmix64 finalizer; spreads FNV output before summation.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// 16 lowercase hex digits.
inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::optional<std::uint64_t> parse_hex64(std::string_view text) {
  if (text.size() != 16) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : text) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else return std::nullopt;
  }
  return v;
}

/// Order-independent digest of a set of atom texts such as `(in water pot)`.
/// Feed each atom once; the result does not depend on insertion order.
class StateDigest {
 public:
  void add(std::string_view atom_text) { sum_ += mix64(fnv1a(atom_text)); }
  std::uint64_t value() const noexcept { return sum_; }
  std::string hex() const { return hex64(sum_); }

 private:
  std::uint64_t sum_ = 0;
};

template <typename Range>
std::string digest_atoms(const Range& atom_texts) {
  StateDigest d;
  for (const auto& a : atom_texts) d.add(a);
  return d.hex();
}

/// Next link of the per-action hash chain recorded in plan files.
inline std::string chain_next(std::string_view previous, std::string_view action,
                              std::string_view post_digest) {
  std::string text;
  text.reserve(previous.size() + action.size() + post_digest.size() + 2);
  text.append(previous).append(" ").append(action).append(" ").append(post_digest);
  return hex64(fnv1a(text));
}

}  // namespace cookplan::sim

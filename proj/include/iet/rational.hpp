#pragma once
#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace iet {

/* Exact rationals are GMP mpq throughout; this header only adds the text
   conventions used by configs and records ("p/q" for rationals, plain
   decimal strings for reals) plus the content hash used for run records. */

// Accepts "p", "-p", "p/q"; canonicalizes sign and gcd. Throws config_error.
mpq_class parse_rational(std::string_view s);

// Canonical rendering: "p/q", or just "p" when the denominator is 1.
std::string rational_str(const mpq_class& q);

struct DecimalReal {
    mpq_class value;  // exact value of the digit string
    long frac_digits; // digits after the decimal point (resolution)
};

// Accepts "[-]ddd[.ddd...]". Throws config_error on anything else.
DecimalReal parse_decimal(std::string_view s);

// FNV-1a 64-bit; used as the content hash for configs and inputs.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

// splitmix64 step; also the hash mixer for composite keys.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
}

} // namespace iet

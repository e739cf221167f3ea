#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>

namespace botdetect {

/// splitmix64 finalizer; used to derive independent RNG streams from a
/// base seed plus an index so parallel and serial fits stay bit-identical.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(mix_seed(seed, index));
}

/// Shortest round-trippable decimal text for a binary64 value. The same
/// bits always produce the same bytes, so serialized models are canonical.
std::string format_double(double v);

/// Strict parse of format_double output (raises ParseError on anything else).
double parse_double(std::string_view text);

std::string format_int(std::int64_t v);
std::int64_t parse_int(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

/// FNV-1a 64-bit digest, reported in run logs so configs are comparable.
std::uint64_t fnv1a(std::string_view bytes);

/// Runs fn(i) for i in [0, n). Work is chunked across `workers` threads;
/// each index writes only its own output slot, so results are identical
/// for every worker count.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace botdetect

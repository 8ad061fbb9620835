#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace daggp {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed splitter: derives a child seed from a master seed and a path of
/// stream identifiers. derive_seed(m, {a, b}) == derive_seed(derive_seed(m, {a}), {b}).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// FNV-1a over a label, for naming streams ("obs", "interventional", ...).
std::uint64_t stream_id(std::string_view label) noexcept;

/// Hash of the exact bit patterns of a vector of doubles (-0.0 folded to 0.0).
std::uint64_t hash_values(std::span<const double> values) noexcept;

} // namespace daggp

#include "daggp/rng.hpp"

#include <bit>

namespace daggp {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = master;
    for (std::uint64_t id : path) {
        s = splitmix64(s ^ splitmix64(id + 0x632be59bd9b4e019ULL));
    }
    return s;
}

std::uint64_t stream_id(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_values(std::span<const double> values) noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL ^ values.size();
    for (double v : values) {
        if (v == 0.0) v = 0.0;
        h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
    }
    return h;
}

} // namespace daggp

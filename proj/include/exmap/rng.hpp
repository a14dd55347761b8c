#pragma once

#include <cstdint>
#include <random>

namespace exmap {

using Rng = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

// Domain tags keep unrelated consumers of the same root seed independent.
enum class RngDomain : std::uint64_t {
    Network = 1,
    Assignment = 2,
    Compliance = 3,
    Outcome = 4,
    Design = 5,
    Draw = 6,
    Probe = 7,
    NullGraph = 8,
};

inline std::uint64_t derive_seed(std::uint64_t root, RngDomain domain, std::uint64_t index) {
    std::uint64_t s = detail::splitmix64(root);
    s = detail::splitmix64(s ^ (static_cast<std::uint64_t>(domain) * 0x9e3779b97f4a7c15ULL));
    return detail::splitmix64(s ^ index);
}

// Deterministic substream for (root seed, domain, index). Draw r of a test
// uses sub_rng(seed, Draw, r), so results do not depend on scheduling.
inline Rng sub_rng(std::uint64_t root, RngDomain domain, std::uint64_t index) {
    return Rng(derive_seed(root, domain, index));
}

inline Rng sub_rng(std::uint64_t root, RngDomain domain) { return sub_rng(root, domain, 0); }

}  // namespace exmap

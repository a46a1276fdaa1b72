#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace tsode::bench {

inline std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of one grid task, a pure function of its coordinates, so results do not depend on
/// execution order.
inline std::uint64_t cell_seed(std::uint64_t master, std::string_view dataset, std::string_view model, double sigma,
                               std::size_t horizon, std::size_t repeat) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "|%.17g|%zu|%zu", sigma, horizon, repeat);
    std::string key(dataset);
    key += '|';
    key += model;
    key += buf;
    return splitmix64(fnv1a(key) ^ splitmix64(master));
}

}  // namespace tsode::bench

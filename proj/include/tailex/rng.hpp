#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tailex {

/// splitmix64 finalizer; used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e9b5ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and one or more
/// stream identifiers (tag, replicate, column, ...). Identical inputs give
/// identical streams, so parallel work can be scheduled in any order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t s = mix64(master);
    for (std::uint64_t id : ids) s = mix64(s ^ mix64(id));
    return s;
}

/// Stream tags keeping unrelated draws on disjoint substreams.
namespace stream {
inline constexpr std::uint64_t kColumn = 0x01;
inline constexpr std::uint64_t kRowLength = 0x02;
inline constexpr std::uint64_t kPersonalization = 0x03;
inline constexpr std::uint64_t kDominatingCount = 0x04;
inline constexpr std::uint64_t kAttachment = 0x05;
inline constexpr std::uint64_t kMemberPick = 0x06;
inline constexpr std::uint64_t kBootstrap = 0x07;
inline constexpr std::uint64_t kGraph = 0x08;
inline constexpr std::uint64_t kReplicate = 0x09;
}  // namespace stream

/// Seeded mt19937_64 wrapper emitting uniforms directly from engine words,
/// so draws are bit-reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1); safe under log/reciprocal.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection sampling keeps the distribution exactly uniform.
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace tailex

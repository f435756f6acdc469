#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace refscout {

/// Deterministic splitmix64 stream. Unlike the standard distributions, every
/// draw here is fully specified, so runs reproduce bit-for-bit across
/// platforms and across serial/parallel execution.
///
/// Parallel tasks never share a stream: derive a child stream per task index
/// with derive() so results do not depend on scheduling order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        // Multiply-shift; bias below 2^-53 of a draw is irrelevant here and
        // the result is identical on every platform.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool next_bool() { return (next_u64() & 1u) != 0; }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        double u1 = next_unit();
        double u2 = next_unit();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Fisher-Yates; spelled out because std::shuffle is not portable
    /// bit-for-bit.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

    /// Independent child stream for task `tag`. Derivation depends only on
    /// this stream's construction seed, never on draws already made.
    Rng derive(std::uint64_t tag) const { return Rng(mix(seed_, tag)); }

    Rng derive(std::uint64_t tag_a, std::uint64_t tag_b) const {
        return Rng(mix(mix(seed_, tag_a), tag_b));
    }

    Rng derive(std::string_view name) const { return Rng(mix(seed_, fnv1a(name))); }

    Rng derive(std::string_view name, std::uint64_t tag) const {
        return derive(name).derive(tag);
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

}  // namespace refscout

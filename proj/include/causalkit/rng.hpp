#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace causalkit {

// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// Counter-based random stream. Draw k of a stream with key K is
// mix64(K + (k+1)*gamma), so any position can be read without generating its
// predecessors, and consumers that hand out disjoint counter ranges stay
// reproducible under internal parallelism. Substreams are derived by hashing
// (key, index); a node keyed this way keeps its draws when unrelated streams
// are added or removed.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t key) : key_(key) {}

    static RandomStream seeded(std::uint64_t seed) {
        return RandomStream(mix64(seed + 0x9E3779B97F4A7C15ull));
    }

    RandomStream substream(std::uint64_t index) const {
        return RandomStream(mix64(key_ ^ (0xD1B54A32D192ED03ull * (index + 1))));
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix64(key_ + 0x9E3779B97F4A7C15ull * (counter + 1));
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe under log().
    double uniform_open(std::uint64_t counter) const {
        return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes counters 2i and 2i+1.
    double normal(std::uint64_t pair_index) const {
        const double u1 = uniform_open(2 * pair_index);
        const double u2 = uniform01(2 * pair_index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Integer in [0, n) by multiply-shift; n must be nonzero.
    std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
        const unsigned __int128 wide = static_cast<unsigned __int128>(bits(counter)) * n;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    std::uint64_t key() const { return key_; }

  private:
    std::uint64_t key_;
};

// Sequential view over a stream for code that draws in a fixed order.
class StreamCursor {
  public:
    explicit StreamCursor(RandomStream stream) : stream_(stream) {}

    std::uint64_t bits() { return stream_.bits(pos_++); }
    double uniform01() { return stream_.uniform01(pos_++); }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
    double normal() {
        const double u1 = stream_.uniform_open(pos_++);
        const double u2 = stream_.uniform01(pos_++);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::uint64_t below(std::uint64_t n) { return stream_.below(pos_++, n); }

  private:
    RandomStream stream_;
    std::uint64_t pos_ = 0;
};

// Fisher-Yates shuffle driven by a cursor.
template <class T>
void shuffle(std::vector<T>& values, StreamCursor& cursor) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(cursor.below(i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace causalkit

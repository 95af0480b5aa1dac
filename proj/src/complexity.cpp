#include "causalkit/complexity.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace {

constexpr std::array<unsigned char, 4> kSeparator = {0x00, 0xB7, 0x4D, 0xE1};

std::size_t deflate_bytes(std::span<const unsigned char> data, int level) {
    uLongf dest_len = compressBound(static_cast<uLong>(data.size()));
    std::vector<unsigned char> dest(dest_len);
    const int rc = compress2(dest.data(), &dest_len, data.empty() ? dest.data() : data.data(),
                             static_cast<uLong>(data.size()), level);
    if (rc != Z_OK) {
        throw NumericError("compress_len: deflate failed");
    }
    return static_cast<std::size_t>(dest_len);
}

std::size_t empty_baseline_bytes(int level) {
    // One probe per level; deflate is deterministic, so this is a constant.
    static std::array<std::size_t, 10> cache{};
    static std::array<bool, 10> known{};
    const std::size_t idx = static_cast<std::size_t>(level);
    if (!known[idx]) {
        cache[idx] = deflate_bytes({}, level);
        known[idx] = true;
    }
    return cache[idx];
}

}  // namespace

std::int64_t compress_len(std::span<const unsigned char> data, const CompressorConfig& config) {
    if (config.level < 1 || config.level > 9) {
        throw std::invalid_argument("compress_len: deflate level must lie in [1,9]");
    }
    const std::int64_t raw =
        8 * static_cast<std::int64_t>(deflate_bytes(data, config.level));
    const std::int64_t baseline =
        8 * static_cast<std::int64_t>(empty_baseline_bytes(config.level));
    return std::max<std::int64_t>(0, raw - baseline);
}

double mutual_info_proxy(std::span<const unsigned char> a, std::span<const unsigned char> b,
                         const CompressorConfig& config) {
    std::vector<unsigned char> joined;
    joined.reserve(a.size() + kSeparator.size() + b.size());
    joined.insert(joined.end(), a.begin(), a.end());
    joined.insert(joined.end(), kSeparator.begin(), kSeparator.end());
    joined.insert(joined.end(), b.begin(), b.end());
    return static_cast<double>(compress_len(a, config)) +
           static_cast<double>(compress_len(b, config)) -
           static_cast<double>(compress_len(joined, config));
}

BitState::BitState(std::size_t bit_count) : bit_count_(bit_count) {
    if (bit_count_ == 0) {
        throw std::invalid_argument("BitState: length must be positive");
    }
    bytes_.assign((bit_count_ + 7) / 8, 0);
}

BitState BitState::ones_run(std::size_t bit_count, std::size_t start, std::size_t length) {
    BitState state(bit_count);
    for (std::size_t i = 0; i < length; ++i) {
        state.set_bit((start + i) % bit_count, true);
    }
    return state;
}

bool BitState::bit(std::size_t index) const {
    return (bytes_[index / 8] >> (7 - index % 8)) & 1u;
}

void BitState::set_bit(std::size_t index, bool value) {
    const unsigned char mask = static_cast<unsigned char>(1u << (7 - index % 8));
    if (value) {
        bytes_[index / 8] |= mask;
    } else {
        bytes_[index / 8] &= static_cast<unsigned char>(~mask);
    }
}

ReversibleRule::ReversibleRule(int block_bits, std::vector<std::uint32_t> table)
    : block_bits_(block_bits), table_(std::move(table)) {
    if (block_bits_ < 2 || block_bits_ > 20 || block_bits_ % 2 != 0) {
        throw std::invalid_argument("ReversibleRule: block size must be even and in [2,20]");
    }
    const std::size_t values = std::size_t{1} << block_bits_;
    if (table_.size() != values) {
        throw std::invalid_argument("ReversibleRule: table must cover every block value");
    }
    inverse_.assign(values, 0);
    std::vector<bool> seen(values, false);
    for (std::size_t v = 0; v < values; ++v) {
        const std::uint32_t out = table_[v];
        if (out >= values || seen[out]) {
            throw std::invalid_argument("ReversibleRule: table is not a permutation of block values");
        }
        seen[out] = true;
        inverse_[out] = static_cast<std::uint32_t>(v);
    }
}

ReversibleRule ReversibleRule::identity(int block_bits) {
    std::vector<std::uint32_t> table(std::size_t{1} << block_bits);
    std::iota(table.begin(), table.end(), 0u);
    return ReversibleRule(block_bits, std::move(table));
}

ReversibleRule ReversibleRule::random_mixing(int block_bits, std::uint64_t seed) {
    std::vector<std::uint32_t> table(std::size_t{1} << block_bits);
    std::iota(table.begin(), table.end(), 0u);
    StreamCursor cursor(RandomStream::seeded(seed));
    shuffle(table, cursor);
    return ReversibleRule(block_bits, std::move(table));
}

BitState ReversibleRule::substitute(const BitState& state, int step_index,
                                    const std::vector<std::uint32_t>& table) const {
    const std::size_t n = state.size();
    if (n % static_cast<std::size_t>(block_bits_) != 0) {
        throw std::invalid_argument("ReversibleRule: state length must be a multiple of the block size");
    }
    const std::size_t offset =
        (step_index % 2 == 0) ? 0 : static_cast<std::size_t>(block_bits_ / 2);
    const std::size_t blocks = n / static_cast<std::size_t>(block_bits_);

    BitState next(n);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::uint32_t value = 0;
        const std::size_t base = offset + b * static_cast<std::size_t>(block_bits_);
        for (int k = 0; k < block_bits_; ++k) {
            value = (value << 1) | (state.bit((base + static_cast<std::size_t>(k)) % n) ? 1u : 0u);
        }
        const std::uint32_t out = table[value];
        for (int k = 0; k < block_bits_; ++k) {
            next.set_bit((base + static_cast<std::size_t>(k)) % n,
                         (out >> (block_bits_ - 1 - k)) & 1u);
        }
    }
    return next;
}

BitState ReversibleRule::apply(const BitState& state, int step_index) const {
    return substitute(state, step_index, table_);
}

BitState ReversibleRule::apply_inverse(const BitState& state, int step_index) const {
    return substitute(state, step_index, inverse_);
}

std::vector<std::int64_t> second_law_run(const BitState& initial, const ReversibleRule& rule,
                                         int steps, const CompressorConfig& config) {
    if (steps < 0) {
        throw std::invalid_argument("second_law_run: steps must be >= 0");
    }

    std::vector<std::int64_t> series;
    series.reserve(static_cast<std::size_t>(steps) + 1);
    BitState state = initial;
    series.push_back(compress_len(state.bytes(), config));
    for (int k = 0; k < steps; ++k) {
        state = rule.apply(state, k);
        series.push_back(compress_len(state.bytes(), config));
    }

    // Reversibility check: the inverse rule, replayed with matching offsets,
    // must land exactly on the initial configuration.
    BitState back = state;
    for (int k = steps; k-- > 0;) {
        back = rule.apply_inverse(back, k);
    }
    if (!(back == initial)) {
        throw NumericError("second_law_run: inverse replay failed to recover the initial state");
    }
    return series;
}

}  // namespace causalkit

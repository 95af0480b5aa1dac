#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace causalkit {

// Deterministic lossless compressor (deflate) at a fixed level. The length of
// an empty compression is measured once and subtracted as format overhead.
struct CompressorConfig {
    int level = 9;
};

// Compressed size in bits, overhead-subtracted, clamped at zero.
std::int64_t compress_len(std::span<const unsigned char> data, const CompressorConfig& config = {});

// compress_len(a) + compress_len(b) - compress_len(a || sep || b), with a
// fixed 4-byte separator. Slightly negative values are reported as-is.
double mutual_info_proxy(std::span<const unsigned char> a, std::span<const unsigned char> b,
                         const CompressorConfig& config = {});

// Fixed-length binary string, packed 8 bits per byte (bit 0 = MSB of byte 0).
class BitState {
  public:
    explicit BitState(std::size_t bit_count);
    static BitState ones_run(std::size_t bit_count, std::size_t start, std::size_t length);

    std::size_t size() const { return bit_count_; }
    bool bit(std::size_t index) const;
    void set_bit(std::size_t index, bool value);
    const std::vector<unsigned char>& bytes() const { return bytes_; }

    bool operator==(const BitState& other) const = default;

  private:
    std::size_t bit_count_;
    std::vector<unsigned char> bytes_;
};

// Block-partitioned invertible substitution with alternating offsets: a 1D
// reversible cellular automaton. The table must be a permutation of block
// values; the inverse is derived from it. Even steps partition at offset 0,
// odd steps at half a block (circular).
class ReversibleRule {
  public:
    ReversibleRule(int block_bits, std::vector<std::uint32_t> table);

    static ReversibleRule identity(int block_bits);
    // Rule drawn from the seed alone, before any state is seen.
    static ReversibleRule random_mixing(int block_bits, std::uint64_t seed);

    int block_bits() const { return block_bits_; }

    BitState apply(const BitState& state, int step_index) const;
    BitState apply_inverse(const BitState& state, int step_index) const;

  private:
    BitState substitute(const BitState& state, int step_index,
                        const std::vector<std::uint32_t>& table) const;

    int block_bits_;
    std::vector<std::uint32_t> table_;
    std::vector<std::uint32_t> inverse_;
};

// Complexity trajectory under a reversible rule: series[k] is the compressed
// size of the state after k steps (length steps + 1). Before returning, the
// inverse rule is replayed from the final state and the exact return to the
// initial state is asserted.
std::vector<std::int64_t> second_law_run(const BitState& initial, const ReversibleRule& rule,
                                         int steps, const CompressorConfig& config = {});

}  // namespace causalkit

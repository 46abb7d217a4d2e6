#pragma once
// Counter-based pseudo-random generator (Philox 4x32-10). Output depends only
// on (seed, stream, position), so independently seeded streams are disjoint
// and every run is reproducible regardless of call interleaving.

#include <array>
#include <cstdint>

namespace snsrate {

class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) {
        key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        block_ = {0, 0,
                  static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        pos_ = 4;
    }

    std::uint32_t next_u32() {
        if (pos_ >= 4) refill();
        return out_[pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // uniform double in [0, 1) with 53 random bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // unbiased integer in [0, bound); small bounds draw a single 32-bit word
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) return 0;
        if (bound <= 0xFFFFFFFFull) {
            const std::uint32_t b32 = static_cast<std::uint32_t>(bound);
            const std::uint32_t threshold = static_cast<std::uint32_t>(0u - b32) % b32;
            for (;;) {
                std::uint32_t r = next_u32();
                if (r >= threshold) return r % b32;
            }
        }
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void refill() {
        std::array<std::uint32_t, 4> c = block_;
        std::array<std::uint32_t, 2> k = key_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, c[0], hi0, lo0);
            mulhilo(0xCD9E8D57u, c[2], hi1, lo1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
            k[0] += 0x9E3779B9u;
            k[1] += 0xBB67AE85u;
        }
        out_ = c;
        pos_ = 0;
        // 64-bit block counter in lanes 0..1; lanes 2..3 hold the stream id
        if (++block_[0] == 0) ++block_[1];
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> block_;
    std::array<std::uint32_t, 4> out_{};
    int pos_;
};

} // namespace snsrate
